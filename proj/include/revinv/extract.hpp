#pragma once

#include "revinv/sources.hpp"

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace revinv {

enum class StatementKind { Require, Assert, IfRevert };

std::string_view to_string(StatementKind kind);
StatementKind parse_statement_kind(std::string_view name);

/// A guard found in source: the condition text as written (comments
/// blanked, otherwise verbatim) and the optional revert message.
struct Extraction {
    std::string predicate;
    std::optional<std::string> message;
    StatementKind kind = StatementKind::Require;

    bool operator==(const Extraction&) const = default;
};

/// Locate the require/assert/if-revert statement that starts at or spans
/// `line` (1-based) and split it into predicate and message.
///
/// Statements may span several physical lines; when several guards touch the
/// line, the first one starting on it wins, otherwise the innermost enclosing
/// one. Throws ExtractionFailure when no guard is there and ParseError for
/// unbalanced delimiters or unterminated strings.
Extraction extract_predicate(std::string_view source, std::size_t line,
                             SourceLanguage language = SourceLanguage::Solidity);

Extraction extract_predicate(const SourceBundle& bundle, const std::string& file, std::size_t line);

/// `failure_file` values carry the revert location as `path:line`.
struct FailureLocation {
    std::string file;
    std::size_t line = 0;
};
std::optional<FailureLocation> parse_failure_location(std::string_view failure_file);

/// Canonical predicate text: lowercase, comments removed, whitespace runs
/// collapsed outside string literals, redundant outer parentheses removed.
/// Idempotent. Throws DegenerateError if nothing is left.
std::string normalize(std::string_view predicate);

/// Lowercased, whitespace-collapsed message; nullopt if it ends up empty.
std::optional<std::string> normalize_message(std::string_view message);

struct Provenance {
    std::string tx_hash;
    std::string contract;
    std::string function;
    std::string file;
    std::size_t line = 0;

    auto operator<=>(const Provenance&) const = default;
};

/// One (normalized predicate, transaction) observation prior to dedup.
struct Occurrence {
    std::string predicate;
    std::optional<std::string> message;
    StatementKind kind = StatementKind::Require;
    Provenance provenance;
};

struct InvariantRecord {
    std::string id;
    std::string predicate;
    std::optional<std::string> message;
    StatementKind kind = StatementKind::Require;
    std::set<Provenance> provenance;
    std::size_t support = 0;  // distinct transactions

    bool operator==(const InvariantRecord&) const = default;
};

/// Stable identifier derived from the normalized predicate.
std::string invariant_id(std::string_view predicate);

/// Merge occurrences by exact normalized predicate. The most frequent message
/// (ties: lexicographically smallest) and statement kind are kept. Output is
/// sorted by descending support, then predicate.
std::vector<InvariantRecord> deduplicate(std::span<const Occurrence> occurrences);

enum class ViewMode { PredicateOnly, PredicateWithMessage };

std::string_view to_string(ViewMode mode);
ViewMode parse_view_mode(std::string_view name);

inline constexpr std::string_view kMessageSeparator = " :: ";

struct InvariantView {
    std::string id;
    ViewMode mode = ViewMode::PredicateOnly;
    std::string text;
};

std::vector<InvariantView> build_views(std::span<const InvariantRecord> records, ViewMode mode);

void write_invariants(std::ostream& out, std::span<const InvariantRecord> records);
std::vector<InvariantRecord> read_invariants(std::istream& in);
std::vector<InvariantRecord> read_invariants(const std::filesystem::path& path);

}  // namespace revinv
