#include "revinv/corpus.hpp"

#include "revinv/error.hpp"
#include "revinv/util.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>

namespace revinv {

namespace {

constexpr const char* kModule = "corpus";

using ojson = nlohmann::ordered_json;

constexpr std::array<std::string_view, kRecordFieldCount> kFields{
    "hash",           "failure_reason",    "block_number",      "from_address",    "to_address",
    "tx_input",       "gas",               "gas_price",         "gas_limit",       "value",
    "tx_index",       "failure_message",   "failure_invariant", "failure_file",    "failure_function",
    "failure_contract", "timestamp",
};

bool is_hex_digit(char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }

// 0x-prefixed hex; `bytes` == 0 accepts any even length.
void check_hex(const std::string& field, const std::string& v, std::size_t bytes) {
    if (v.size() < 2 || v[0] != '0' || (v[1] != 'x' && v[1] != 'X')) {
        throw ParseError(kModule, field + " must carry a 0x prefix");
    }
    const std::size_t digits = v.size() - 2;
    if (bytes ? digits != 2 * bytes : digits % 2 != 0) {
        throw ParseError(kModule, field + " has wrong hex length");
    }
    for (std::size_t i = 2; i < v.size(); ++i) {
        if (!is_hex_digit(v[i])) throw ParseError(kModule, field + " is not hex");
    }
}

std::string get_string(const nlohmann::json& j, std::string_view field) {
    const auto& v = j.at(std::string(field));
    if (!v.is_string()) throw ParseError(kModule, std::string(field) + " must be a string");
    return v.get<std::string>();
}

std::optional<std::string> get_optional(const nlohmann::json& j, std::string_view field) {
    const auto& v = j.at(std::string(field));
    if (v.is_null()) return std::nullopt;
    if (!v.is_string()) throw ParseError(kModule, std::string(field) + " must be a string or null");
    return v.get<std::string>();
}

std::uint64_t get_uint(const nlohmann::json& j, std::string_view field) {
    const auto& v = j.at(std::string(field));
    if (!v.is_number_unsigned()) throw ParseError(kModule, std::string(field) + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string get_wei(const nlohmann::json& j) {
    const auto& v = j.at("value");
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (!v.is_string()) throw ParseError(kModule, "value must be a decimal string or non-negative integer");
    const auto s = v.get<std::string>();
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError(kModule, "value must contain decimal digits only");
    }
    return s;
}

bool non_empty(const std::optional<std::string>& v) { return v && !v->empty(); }

bool contains_ci(std::string_view haystack, std::string_view needle) {
    return to_lower(std::string(haystack)).find(needle) != std::string::npos;
}

const std::array<std::string_view, 6> kArithmeticMarkers{
    "overflow", "underflow", "division by zero", "divide by zero", "panic code 0x11", "panic code 0x12",
};

}  // namespace

std::string_view to_string(FailureClass cls) {
    switch (cls) {
        case FailureClass::OutOfGas: return "out_of_gas";
        case FailureClass::Arithmetic: return "arithmetic";
        case FailureClass::NoSourceCode: return "no_source_code";
        case FailureClass::ExtractionFailure: return "extraction_failure";
        case FailureClass::InvariantRequire: return "invariant_require";
        case FailureClass::InvariantAssert: return "invariant_assert";
        case FailureClass::InvariantIfRevert: return "invariant_if_revert";
    }
    return "extraction_failure";
}

bool is_invariant_class(FailureClass cls) {
    return cls == FailureClass::InvariantRequire || cls == FailureClass::InvariantAssert ||
           cls == FailureClass::InvariantIfRevert;
}

TransactionRecord parse_record(std::string_view json_line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(kModule, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(kModule, "record must be a JSON object");

    const std::set<std::string_view> known(kFields.begin(), kFields.end());
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw ParseError(kModule, "unknown field '" + key + "'");
    }
    for (auto field : kFields) {
        if (!j.contains(std::string(field))) throw ParseError(kModule, "missing field '" + std::string(field) + "'");
    }

    TransactionRecord r;
    r.hash = get_string(j, "hash");
    r.failure_reason = get_string(j, "failure_reason");
    r.block_number = get_uint(j, "block_number");
    r.from_address = get_string(j, "from_address");
    r.to_address = get_string(j, "to_address");
    r.tx_input = get_string(j, "tx_input");
    r.gas = get_uint(j, "gas");
    r.gas_price = get_uint(j, "gas_price");
    r.gas_limit = get_uint(j, "gas_limit");
    r.value = get_wei(j);
    r.tx_index = get_uint(j, "tx_index");
    r.failure_message = get_optional(j, "failure_message");
    r.failure_invariant = get_optional(j, "failure_invariant");
    r.failure_file = get_optional(j, "failure_file");
    r.failure_function = get_optional(j, "failure_function");
    r.failure_contract = get_optional(j, "failure_contract");
    r.timestamp = get_uint(j, "timestamp");

    check_hex("hash", r.hash, 32);
    check_hex("from_address", r.from_address, 20);
    check_hex("to_address", r.to_address, 20);
    check_hex("tx_input", r.tx_input, 0);
    if (non_empty(r.failure_contract)) check_hex("failure_contract", *r.failure_contract, 20);

    if (r.gas > r.gas_limit) throw ParseError(kModule, "gas exceeds gas_limit");
    if (non_empty(r.failure_invariant) &&
        !(non_empty(r.failure_file) && non_empty(r.failure_function) && non_empty(r.failure_contract))) {
        throw ParseError(kModule, "failure_invariant requires failure_file, failure_function and failure_contract");
    }
    return r;
}

std::string serialize_record(const TransactionRecord& r) {
    auto opt = [](const std::optional<std::string>& v) { return v ? ojson(*v) : ojson(nullptr); };
    ojson j;
    j["hash"] = r.hash;
    j["failure_reason"] = r.failure_reason;
    j["block_number"] = r.block_number;
    j["from_address"] = r.from_address;
    j["to_address"] = r.to_address;
    j["tx_input"] = r.tx_input;
    j["gas"] = r.gas;
    j["gas_price"] = r.gas_price;
    j["gas_limit"] = r.gas_limit;
    j["value"] = r.value;
    j["tx_index"] = r.tx_index;
    j["failure_message"] = opt(r.failure_message);
    j["failure_invariant"] = opt(r.failure_invariant);
    j["failure_file"] = opt(r.failure_file);
    j["failure_function"] = opt(r.failure_function);
    j["failure_contract"] = opt(r.failure_contract);
    j["timestamp"] = r.timestamp;
    return j.dump();
}

std::vector<TransactionRecord> load_corpus(std::istream& in) {
    std::vector<TransactionRecord> records;
    std::set<std::string> hashes;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        TransactionRecord rec;
        try {
            rec = parse_record(line);
        } catch (const ParseError& e) {
            // Re-raise with the line number attached.
            const std::string what = e.what();
            throw ParseError(kModule, what.substr(what.find(": ") + 2), lineno);
        }
        if (!hashes.insert(to_lower(rec.hash)).second) {
            throw CorpusError(kModule, "duplicate transaction hash " + rec.hash + " at line " + std::to_string(lineno));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<TransactionRecord> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError(kModule, "cannot open corpus " + path.string());
    return load_corpus(in);
}

OutOfGasMatch out_of_gas_match(const TransactionRecord& record) {
    const std::string_view message = record.failure_message ? std::string_view(*record.failure_message) : "";
    for (std::string_view text : {std::string_view(record.failure_reason), message}) {
        if (text.find("Out of gas") != std::string_view::npos) return OutOfGasMatch::Exact;
    }
    for (std::string_view text : {std::string_view(record.failure_reason), message}) {
        if (text.find("out of gas") != std::string_view::npos) return OutOfGasMatch::Lowercase;
    }
    return OutOfGasMatch::None;
}

Classification classify(const TransactionRecord& record, const SourceCatalog& sources) {
    Classification out;
    if (out_of_gas_match(record) != OutOfGasMatch::None) {
        out.cls = FailureClass::OutOfGas;
        return out;
    }
    for (auto marker : kArithmeticMarkers) {
        if (contains_ci(record.failure_reason, marker) ||
            (record.failure_message && contains_ci(*record.failure_message, marker))) {
            out.cls = FailureClass::Arithmetic;
            return out;
        }
    }
    if (!sources.contains(record.to_address)) {
        out.cls = FailureClass::NoSourceCode;
        return out;
    }

    // The guard may live in a different contract than to_address (proxies,
    // libraries); prefer failure_contract when its source is known.
    const SourceBundle* bundle = sources.find(record.to_address);
    if (non_empty(record.failure_contract)) {
        if (const auto* other = sources.find(*record.failure_contract)) bundle = other;
    }
    out.contract = bundle->contract_address;
    out.cls = FailureClass::ExtractionFailure;

    if (!record.failure_file) return out;
    out.location = parse_failure_location(*record.failure_file);
    if (!out.location || !bundle->files.contains(out.location->file)) return out;

    try {
        out.extraction = extract_predicate(*bundle, out.location->file, out.location->line);
    } catch (const Error&) {
        return out;
    }
    switch (out.extraction->kind) {
        case StatementKind::Require: out.cls = FailureClass::InvariantRequire; break;
        case StatementKind::Assert: out.cls = FailureClass::InvariantAssert; break;
        case StatementKind::IfRevert: out.cls = FailureClass::InvariantIfRevert; break;
    }
    return out;
}

CorpusStatistics corpus_statistics(std::span<const FailureClass> classes) {
    CorpusStatistics stats;
    stats.total = classes.size();
    for (auto cls : classes) ++stats.by_class[static_cast<std::size_t>(cls)].count;
    if (stats.total == 0) return stats;
    for (auto& share : stats.by_class) {
        share.percent = round_half_even(100.0 * static_cast<double>(share.count) / static_cast<double>(stats.total), 1);
    }
    return stats;
}

std::uint64_t cochran_sample_size(double confidence, double margin, double p) {
    double z;
    if (std::abs(confidence - 0.90) < 1e-12) z = 1.645;
    else if (std::abs(confidence - 0.95) < 1e-12) z = 1.96;
    else if (std::abs(confidence - 0.99) < 1e-12) z = 2.576;
    else throw ArgumentError(kModule, "confidence must be one of 0.90, 0.95, 0.99");
    if (!(margin > 0.0 && margin < 1.0)) throw ArgumentError(kModule, "margin must lie in (0, 1)");
    if (!(p > 0.0 && p < 1.0)) throw ArgumentError(kModule, "p must lie in (0, 1)");

    const double n = z * z * p * (1.0 - p) / (margin * margin);
    // 1.96^2 * 0.25 / 0.01^2 is 9604 exactly in real arithmetic but lands a
    // hair above or below in binary; absorb that before taking the ceiling.
    return static_cast<std::uint64_t>(std::ceil(n - 1e-9 * n));
}

}  // namespace revinv
