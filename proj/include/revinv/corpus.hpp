#pragma once

#include "revinv/extract.hpp"
#include "revinv/sources.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace revinv {

/// One failed transaction. Field names and order follow the corpus file.
struct TransactionRecord {
    std::string hash;            // 0x + 64 hex
    std::string failure_reason;
    std::uint64_t block_number = 0;
    std::string from_address;    // 0x + 40 hex
    std::string to_address;      // 0x + 40 hex
    std::string tx_input;        // 0x + even number of hex digits
    std::uint64_t gas = 0;
    std::uint64_t gas_price = 0;
    std::uint64_t gas_limit = 0;
    std::string value;           // wei as decimal digits; may exceed 64 bits
    std::uint64_t tx_index = 0;
    std::optional<std::string> failure_message;
    std::optional<std::string> failure_invariant;
    std::optional<std::string> failure_file;      // "path:line"
    std::optional<std::string> failure_function;
    std::optional<std::string> failure_contract;  // 0x + 40 hex
    std::uint64_t timestamp = 0;

    bool operator==(const TransactionRecord&) const = default;
};

inline constexpr std::size_t kRecordFieldCount = 17;

enum class FailureClass {
    OutOfGas,
    Arithmetic,
    NoSourceCode,
    ExtractionFailure,
    InvariantRequire,
    InvariantAssert,
    InvariantIfRevert,
};

inline constexpr std::array<FailureClass, 7> kFailureClasses{
    FailureClass::OutOfGas,         FailureClass::Arithmetic,      FailureClass::NoSourceCode,
    FailureClass::ExtractionFailure, FailureClass::InvariantRequire, FailureClass::InvariantAssert,
    FailureClass::InvariantIfRevert,
};

std::string_view to_string(FailureClass cls);
bool is_invariant_class(FailureClass cls);

/// Parse one corpus line. Throws ParseError (without line number) on
/// malformed JSON, unknown or missing fields, bad hex, or broken record
/// invariants.
TransactionRecord parse_record(std::string_view json_line);
std::string serialize_record(const TransactionRecord& record);

/// Newline-delimited JSON corpus; blank lines are skipped. Errors carry
/// the 1-based line number. Duplicate hashes raise CorpusError.
std::vector<TransactionRecord> load_corpus(std::istream& in);
std::vector<TransactionRecord> load_corpus(const std::filesystem::path& path);

enum class OutOfGasMatch { None, Exact, Lowercase };

/// "Out of gas" is matched as quoted; the lowercase spelling is also
/// accepted and reported separately.
OutOfGasMatch out_of_gas_match(const TransactionRecord& record);

/// Classification together with the guard that was extracted, if any.
struct Classification {
    FailureClass cls = FailureClass::ExtractionFailure;
    std::optional<Extraction> extraction;
    std::optional<FailureLocation> location;
    std::string contract;  // bundle the guard was read from
};

Classification classify(const TransactionRecord& record, const SourceCatalog& sources);

inline FailureClass classify_failure(const TransactionRecord& record, const SourceCatalog& sources) {
    return classify(record, sources).cls;
}

struct ClassShare {
    std::size_t count = 0;
    std::optional<double> percent;  // one decimal; nullopt for an empty corpus
};

struct CorpusStatistics {
    std::size_t total = 0;
    std::array<ClassShare, kFailureClasses.size()> by_class{};
    std::size_t out_of_gas_lowercase = 0;

    const ClassShare& operator[](FailureClass cls) const { return by_class[static_cast<std::size_t>(cls)]; }
};

CorpusStatistics corpus_statistics(std::span<const FailureClass> classes);

/// ceil(z^2 p (1-p) / margin^2) with z looked up for confidence 0.90, 0.95
/// or 0.99.
std::uint64_t cochran_sample_size(double confidence, double margin, double p);

}  // namespace revinv
