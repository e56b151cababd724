#include "revinv/extract.hpp"

#include "revinv/error.hpp"
#include "revinv/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>

namespace revinv {

namespace {

constexpr const char* kModule = "extract";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
char lower(char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// Source with comments blanked (newlines kept, so offsets and line numbers
// survive) and a per-character flag for string-literal membership.
struct Lexed {
    std::string_view raw;
    std::string masked;
    std::vector<bool> in_string;
    std::vector<std::size_t> line_starts;

    std::size_t size() const { return masked.size(); }

    std::size_t line_of(std::size_t pos) const {
        auto it = std::upper_bound(line_starts.begin(), line_starts.end(), pos);
        return static_cast<std::size_t>(it - line_starts.begin());
    }

    std::size_t line_end(std::size_t line) const {
        return line < line_starts.size() ? line_starts[line] - 1 : masked.size();
    }
};

Lexed lex(std::string_view src, SourceLanguage language) {
    Lexed lx;
    lx.raw = src;
    lx.masked.assign(src);
    lx.in_string.assign(src.size(), false);
    lx.line_starts.push_back(0);
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] == '\n') lx.line_starts.push_back(i + 1);
    }

    auto blank = [&](std::size_t from, std::size_t to) {
        for (std::size_t k = from; k < to; ++k) {
            if (lx.masked[k] != '\n') lx.masked[k] = ' ';
        }
    };

    const std::size_t n = src.size();
    std::size_t i = 0;
    while (i < n) {
        const char c = src[i];
        const bool solidity = language == SourceLanguage::Solidity;
        if (solidity && c == '/' && i + 1 < n && src[i + 1] == '/') {
            const std::size_t eol = std::min(src.find('\n', i), n);
            blank(i, eol);
            i = eol;
        } else if (solidity && c == '/' && i + 1 < n && src[i + 1] == '*') {
            const std::size_t close = src.find("*/", i + 2);
            if (close == std::string_view::npos) {
                throw ParseError(kModule, "unterminated block comment", lx.line_of(i));
            }
            blank(i, close + 2);
            i = close + 2;
        } else if (!solidity && c == '#') {
            const std::size_t eol = std::min(src.find('\n', i), n);
            blank(i, eol);
            i = eol;
        } else if (c == '"' || c == '\'') {
            std::size_t end;
            if (!solidity && src.substr(i, 3) == std::string(3, c)) {
                const std::size_t close = src.find(std::string(3, c), i + 3);
                if (close == std::string_view::npos) {
                    throw ParseError(kModule, "unterminated string literal", lx.line_of(i));
                }
                end = close + 3;
            } else {
                std::size_t j = i + 1;
                while (j < n && src[j] != c) {
                    if (src[j] == '\n') break;
                    j += src[j] == '\\' ? 2 : 1;
                }
                if (j >= n || src[j] != c) {
                    throw ParseError(kModule, "unterminated string literal", lx.line_of(i));
                }
                end = j + 1;
            }
            std::fill(lx.in_string.begin() + static_cast<std::ptrdiff_t>(i),
                      lx.in_string.begin() + static_cast<std::ptrdiff_t>(end), true);
            i = end;
        } else {
            ++i;
        }
    }
    return lx;
}

char closer_for(char open) {
    switch (open) {
        case '(': return ')';
        case '[': return ']';
        default: return '}';
    }
}

// Index of the delimiter closing the one at `open`.
std::size_t match_close(const Lexed& lx, std::size_t open) {
    std::vector<char> expected{closer_for(lx.masked[open])};
    for (std::size_t i = open + 1; i < lx.size(); ++i) {
        if (lx.in_string[i]) continue;
        const char c = lx.masked[i];
        if (c == '(' || c == '[' || c == '{') {
            expected.push_back(closer_for(c));
        } else if (c == ')' || c == ']' || c == '}') {
            if (c != expected.back()) {
                throw ParseError(kModule, std::string("mismatched '") + c + "'", lx.line_of(i));
            }
            expected.pop_back();
            if (expected.empty()) return i;
        }
    }
    throw ParseError(kModule, std::string("unbalanced '") + lx.masked[open] + "'", lx.line_of(open));
}

struct Range {
    std::size_t begin;
    std::size_t end;
};

std::vector<Range> split_top_level(const Lexed& lx, std::size_t begin, std::size_t end) {
    std::vector<Range> parts;
    int depth = 0;
    std::size_t start = begin;
    for (std::size_t i = begin; i < end; ++i) {
        if (lx.in_string[i]) continue;
        const char c = lx.masked[i];
        if (c == '(' || c == '[' || c == '{') {
            ++depth;
        } else if (c == ')' || c == ']' || c == '}') {
            --depth;
        } else if (c == ',' && depth == 0) {
            parts.push_back({start, i});
            start = i + 1;
        }
    }
    parts.push_back({start, end});
    return parts;
}

std::size_t skip_space(const Lexed& lx, std::size_t i) {
    while (i < lx.size() && is_space(lx.masked[i])) ++i;
    return i;
}

std::string_view word_at(const Lexed& lx, std::size_t i) {
    std::size_t j = i;
    while (j < lx.size() && is_ident_char(lx.masked[j]) && !lx.in_string[j]) ++j;
    return std::string_view(lx.masked).substr(i, j - i);
}

std::string_view text(const Lexed& lx, Range r) {
    return trim(std::string_view(lx.masked).substr(r.begin, r.end - r.begin));
}

std::string unescape(std::string_view body) {
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '\\' && i + 1 < body.size()) {
            const char e = body[++i];
            switch (e) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                default: out.push_back(e);
            }
        } else {
            out.push_back(body[i]);
        }
    }
    return out;
}

// Revert message from an argument range: adjacent string literals are
// concatenated; `Name(...)` yields the error name; anything else is kept
// as written.
std::optional<std::string> parse_message(const Lexed& lx, Range r) {
    const std::string_view whole = text(lx, r);
    if (whole.empty()) return std::nullopt;

    std::size_t i = skip_space(lx, r.begin);
    std::string joined;
    bool literal = true;
    while (i < r.end) {
        if (word_at(lx, i) == "unicode" || word_at(lx, i) == "hex") i += word_at(lx, i).size();
        if (i >= r.end || !lx.in_string[i]) {
            literal = false;
            break;
        }
        std::size_t j = i;
        while (j < r.end && lx.in_string[j]) ++j;
        joined += unescape(lx.raw.substr(i + 1, j - i - 2));
        i = skip_space(lx, j);
    }
    if (literal) return joined;

    std::size_t k = skip_space(lx, r.begin);
    if (is_ident_start(lx.masked[k])) {
        std::size_t j = k;
        while (j < r.end && (is_ident_char(lx.masked[j]) || lx.masked[j] == '.')) ++j;
        const std::string_view name = std::string_view(lx.masked).substr(k, j - k);
        const bool conversion = name == "string" || name == "bytes";
        const std::size_t after = skip_space(lx, j);
        if (!conversion && after < r.end && lx.masked[after] == '(') return std::string(name);
    }
    return std::string(whole);
}

struct Candidate {
    std::size_t start = 0;
    std::size_t end = 0;
    bool guard = false;
    Extraction extraction;
};

// End of a Vyper logical line starting at `from`: the first newline outside
// brackets and strings that is not escaped by a trailing backslash.
std::size_t logical_line_end(const Lexed& lx, std::size_t from) {
    int depth = 0;
    for (std::size_t i = from; i < lx.size(); ++i) {
        if (lx.in_string[i]) continue;
        const char c = lx.masked[i];
        if (c == '(' || c == '[' || c == '{') {
            ++depth;
        } else if (c == ')' || c == ']' || c == '}') {
            if (--depth < 0) throw ParseError(kModule, std::string("mismatched '") + c + "'", lx.line_of(i));
        } else if (c == '\n' && depth == 0 && !(i > 0 && lx.masked[i - 1] == '\\')) {
            return i;
        }
    }
    if (depth != 0) throw ParseError(kModule, "unbalanced brackets", lx.line_of(from));
    return lx.size();
}

void require_condition(const Lexed& lx, std::string_view predicate, std::size_t pos) {
    if (predicate.empty()) throw ParseError(kModule, "empty guard condition", lx.line_of(pos));
}

std::optional<Candidate> parse_call_guard(const Lexed& lx, std::size_t kw, std::string_view word,
                                          StatementKind kind) {
    const std::size_t open = skip_space(lx, kw + word.size());
    if (open >= lx.size() || lx.masked[open] != '(') return std::nullopt;
    const std::size_t close = match_close(lx, open);
    const auto args = split_top_level(lx, open + 1, close);

    Candidate c;
    c.start = kw;
    c.guard = true;
    c.extraction.kind = kind;
    c.extraction.predicate = std::string(text(lx, args.front()));
    require_condition(lx, c.extraction.predicate, kw);
    if (args.size() >= 2) c.extraction.message = parse_message(lx, args[1]);

    c.end = close;
    const std::size_t semi = skip_space(lx, close + 1);
    if (semi < lx.size() && lx.masked[semi] == ';') c.end = semi;
    return c;
}

// `revert ...` or `throw` at position `at`; returns the message for revert.
std::optional<std::string> revert_message(const Lexed& lx, std::size_t at, std::string_view word) {
    if (word == "throw") return std::nullopt;
    std::size_t i = skip_space(lx, at + word.size());
    if (i >= lx.size()) return std::nullopt;
    if (lx.masked[i] == '(') {
        const std::size_t close = match_close(lx, i);
        const auto args = split_top_level(lx, i + 1, close);
        return parse_message(lx, args.front());
    }
    if (is_ident_start(lx.masked[i])) {
        std::size_t j = i;
        while (j < lx.size() && (is_ident_char(lx.masked[j]) || lx.masked[j] == '.')) ++j;
        return std::string(lx.masked.substr(i, j - i));
    }
    return std::nullopt;
}

std::size_t statement_end(const Lexed& lx, std::size_t from) {
    int depth = 0;
    for (std::size_t i = from; i < lx.size(); ++i) {
        if (lx.in_string[i]) continue;
        const char c = lx.masked[i];
        if (c == '(' || c == '[' || c == '{') ++depth;
        else if (c == ')' || c == ']' || c == '}') --depth;
        else if (c == ';' && depth == 0) return i;
    }
    throw ParseError(kModule, "statement has no terminating ';'", lx.line_of(from));
}

std::optional<Candidate> parse_solidity_if(const Lexed& lx, std::size_t kw) {
    const std::size_t open = skip_space(lx, kw + 2);
    if (open >= lx.size() || lx.masked[open] != '(') return std::nullopt;
    const std::size_t close = match_close(lx, open);

    Candidate c;
    c.start = kw;
    c.extraction.kind = StatementKind::IfRevert;
    c.extraction.predicate = std::string(text(lx, {open + 1, close}));
    require_condition(lx, c.extraction.predicate, kw);

    std::size_t body = skip_space(lx, close + 1);
    if (body >= lx.size()) {
        c.end = close;
        return c;
    }
    if (lx.masked[body] == '{') {
        c.end = match_close(lx, body);
        const std::size_t first = skip_space(lx, body + 1);
        const std::string_view word = word_at(lx, first);
        if (word == "revert" || word == "throw") {
            c.guard = true;
            c.extraction.message = revert_message(lx, first, word);
        }
        return c;
    }
    const std::string_view word = word_at(lx, body);
    if (word == "revert" || word == "throw") {
        c.guard = true;
        c.extraction.message = revert_message(lx, body, word);
        c.end = statement_end(lx, body);
    } else {
        c.end = close;
    }
    return c;
}

std::optional<Candidate> parse_vyper_assert(const Lexed& lx, std::size_t kw) {
    const std::size_t from = kw + 6;
    const std::size_t eol = logical_line_end(lx, from);
    const auto args = split_top_level(lx, from, eol);

    Candidate c;
    c.start = kw;
    c.end = eol;
    c.guard = true;
    c.extraction.kind = StatementKind::Assert;
    c.extraction.predicate = std::string(text(lx, args.front()));
    require_condition(lx, c.extraction.predicate, kw);
    if (args.size() >= 2) c.extraction.message = parse_message(lx, args[1]);
    return c;
}

std::optional<Candidate> parse_vyper_if(const Lexed& lx, std::size_t kw) {
    const std::size_t eol = logical_line_end(lx, kw + 2);
    int depth = 0;
    std::size_t colon = eol;
    for (std::size_t i = kw + 2; i < eol; ++i) {
        if (lx.in_string[i]) continue;
        const char c = lx.masked[i];
        if (c == '(' || c == '[' || c == '{') ++depth;
        else if (c == ')' || c == ']' || c == '}') --depth;
        else if (c == ':' && depth == 0) {
            colon = i;
            break;
        }
    }
    if (colon == eol) return std::nullopt;

    Candidate c;
    c.start = kw;
    c.extraction.kind = StatementKind::IfRevert;
    c.extraction.predicate = std::string(text(lx, {kw + 2, colon}));
    require_condition(lx, c.extraction.predicate, kw);

    const std::size_t first = skip_space(lx, colon + 1);
    if (word_at(lx, first) == "raise") {
        c.guard = true;
        const std::size_t raise_end = logical_line_end(lx, first);
        c.end = raise_end;
        const auto msg = parse_message(lx, {first + 5, raise_end});
        if (msg) c.extraction.message = msg;
    } else {
        c.end = colon;
    }
    return c;
}

std::optional<Candidate> parse_at(const Lexed& lx, std::size_t kw, std::string_view word,
                                  SourceLanguage language) {
    if (language == SourceLanguage::Vyper) {
        if (word == "assert") return parse_vyper_assert(lx, kw);
        return parse_vyper_if(lx, kw);
    }
    if (word == "require") return parse_call_guard(lx, kw, word, StatementKind::Require);
    if (word == "assert") return parse_call_guard(lx, kw, word, StatementKind::Assert);
    return parse_solidity_if(lx, kw);
}

bool is_keyword_at(const Lexed& lx, std::size_t i, std::string_view word) {
    if (lx.masked.compare(i, word.size(), word) != 0) return false;
    if (lx.in_string[i]) return false;
    if (i > 0 && (is_ident_char(lx.masked[i - 1]) || lx.masked[i - 1] == '.')) return false;
    const std::size_t after = i + word.size();
    return after >= lx.size() || !is_ident_char(lx.masked[after]);
}

// Guard statements further than this many lines above the target are not
// considered as enclosing candidates.
constexpr std::size_t kLookbackLines = 200;

}  // namespace

std::string_view to_string(StatementKind kind) {
    switch (kind) {
        case StatementKind::Require: return "require";
        case StatementKind::Assert: return "assert";
        case StatementKind::IfRevert: return "if_revert";
    }
    return "require";
}

StatementKind parse_statement_kind(std::string_view name) {
    if (name == "require") return StatementKind::Require;
    if (name == "assert") return StatementKind::Assert;
    if (name == "if_revert") return StatementKind::IfRevert;
    throw FormatError(kModule, "unknown statement kind '" + std::string(name) + "'");
}

Extraction extract_predicate(std::string_view source, std::size_t line, SourceLanguage language) {
    const Lexed lx = lex(source, language);
    if (line == 0 || line > lx.line_starts.size()) {
        throw ArgumentError(kModule, "line " + std::to_string(line) + " outside file");
    }
    const std::size_t line_begin = lx.line_starts[line - 1];
    const std::size_t line_end = lx.line_end(line);
    const std::size_t window = lx.line_starts[line - 1 >= kLookbackLines ? line - 1 - kLookbackLines : 0];

    const std::vector<std::string_view> words =
        language == SourceLanguage::Vyper ? std::vector<std::string_view>{"assert", "if"}
                                          : std::vector<std::string_view>{"require", "assert", "if"};

    std::optional<Candidate> on_line;
    std::optional<Candidate> enclosing;
    std::optional<ParseError> error;

    for (std::size_t i = window; i <= line_end && i < lx.size(); ++i) {
        for (const auto word : words) {
            if (!is_keyword_at(lx, i, word)) continue;
            std::optional<Candidate> cand;
            try {
                cand = parse_at(lx, i, word, language);
            } catch (const ParseError& e) {
                if (!error || lx.line_of(i) == line) error = e;
                continue;
            }
            if (!cand || !cand->guard || cand->end < line_begin) continue;
            if (i >= line_begin) {
                if (!on_line) on_line = std::move(cand);
            } else {
                enclosing = std::move(cand);
            }
        }
    }

    if (on_line) return on_line->extraction;
    if (enclosing) return enclosing->extraction;
    if (error) throw *error;
    throw ExtractionFailure(kModule, "no guard statement at line " + std::to_string(line));
}

Extraction extract_predicate(const SourceBundle& bundle, const std::string& file, std::size_t line) {
    return extract_predicate(bundle.file(file), line, bundle.language);
}

std::optional<FailureLocation> parse_failure_location(std::string_view failure_file) {
    const std::size_t colon = failure_file.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == failure_file.size()) return std::nullopt;
    std::size_t line = 0;
    for (char c : failure_file.substr(colon + 1)) {
        if (c < '0' || c > '9') return std::nullopt;
        line = line * 10 + static_cast<std::size_t>(c - '0');
    }
    if (line == 0) return std::nullopt;
    return FailureLocation{std::string(failure_file.substr(0, colon)), line};
}

namespace {

// Index of the ')' matching s[0] == '(' skipping string literals, or npos.
std::size_t matching_paren(std::string_view s) {
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '"' || c == '\'') {
            std::size_t j = i + 1;
            while (j < s.size() && s[j] != c) j += s[j] == '\\' ? 2 : 1;
            i = j;
            continue;
        }
        if (c == '(') ++depth;
        if (c == ')' && --depth == 0) return i;
    }
    return std::string_view::npos;
}

}  // namespace

std::string normalize(std::string_view predicate) {
    // Comments become a single space so neighbouring tokens stay apart.
    std::string stripped;
    stripped.reserve(predicate.size());
    for (std::size_t i = 0; i < predicate.size(); ++i) {
        const char c = predicate[i];
        if (c == '"' || c == '\'') {
            std::size_t j = i + 1;
            while (j < predicate.size() && predicate[j] != c) j += predicate[j] == '\\' ? 2 : 1;
            j = std::min(j, predicate.size() - 1);
            stripped.append(predicate.substr(i, j - i + 1));
            i = j;
        } else if (c == '/' && i + 1 < predicate.size() && predicate[i + 1] == '/') {
            i = std::min(predicate.find('\n', i), predicate.size()) - 1;
            stripped.push_back(' ');
        } else if (c == '/' && i + 1 < predicate.size() && predicate[i + 1] == '*') {
            const std::size_t close = predicate.find("*/", i + 2);
            i = close == std::string_view::npos ? predicate.size() - 1 : close + 1;
            stripped.push_back(' ');
        } else {
            stripped.push_back(c);
        }
    }

    std::string out;
    out.reserve(stripped.size());
    bool pending_space = false;
    for (std::size_t i = 0; i < stripped.size(); ++i) {
        const char c = stripped[i];
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        if (c == '"' || c == '\'') {
            std::size_t j = i + 1;
            while (j < stripped.size() && stripped[j] != c) j += stripped[j] == '\\' ? 2 : 1;
            j = std::min(j, stripped.size() - 1);
            for (std::size_t k = i; k <= j; ++k) out.push_back(lower(stripped[k]));
            i = j;
        } else {
            out.push_back(lower(c));
        }
    }

    std::string_view view = out;
    while (view.size() >= 2 && view.front() == '(' && matching_paren(view) == view.size() - 1) {
        view = trim(view.substr(1, view.size() - 2));
    }
    if (view.empty()) throw DegenerateError(kModule, "predicate is empty after normalization");
    return std::string(view);
}

std::optional<std::string> normalize_message(std::string_view message) {
    std::string out;
    bool pending_space = false;
    for (char c : message) {
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(lower(c));
    }
    if (out.empty()) return std::nullopt;
    return out;
}

std::string invariant_id(std::string_view predicate) { return "inv-" + sha256_hex(predicate).substr(0, 12); }

std::vector<InvariantRecord> deduplicate(std::span<const Occurrence> occurrences) {
    struct Group {
        std::map<std::string, std::size_t> messages;
        std::map<StatementKind, std::size_t> kinds;
        std::set<Provenance> provenance;
        std::set<std::string> txs;
    };
    std::map<std::string, Group> groups;
    for (const auto& occ : occurrences) {
        auto& g = groups[occ.predicate];
        if (occ.message) ++g.messages[*occ.message];
        ++g.kinds[occ.kind];
        g.provenance.insert(occ.provenance);
        g.txs.insert(occ.provenance.tx_hash);
    }

    std::vector<InvariantRecord> records;
    records.reserve(groups.size());
    for (auto& [predicate, g] : groups) {
        InvariantRecord rec;
        rec.id = invariant_id(predicate);
        rec.predicate = predicate;
        // std::map iterates keys ascending, so the first maximum is the
        // lexicographically smallest (or lowest enum) among ties.
        std::size_t best = 0;
        for (const auto& [msg, count] : g.messages) {
            if (count > best) {
                best = count;
                rec.message = msg;
            }
        }
        best = 0;
        for (const auto& [kind, count] : g.kinds) {
            if (count > best) {
                best = count;
                rec.kind = kind;
            }
        }
        rec.provenance = std::move(g.provenance);
        rec.support = g.txs.size();
        records.push_back(std::move(rec));
    }
    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        if (a.support != b.support) return a.support > b.support;
        return a.predicate < b.predicate;
    });
    return records;
}

std::string_view to_string(ViewMode mode) {
    return mode == ViewMode::PredicateOnly ? "predicate" : "message";
}

ViewMode parse_view_mode(std::string_view name) {
    if (name == "predicate") return ViewMode::PredicateOnly;
    if (name == "message") return ViewMode::PredicateWithMessage;
    throw ArgumentError(kModule, "unknown view '" + std::string(name) + "' (expected predicate|message)");
}

std::vector<InvariantView> build_views(std::span<const InvariantRecord> records, ViewMode mode) {
    std::vector<InvariantView> views;
    views.reserve(records.size());
    for (const auto& rec : records) {
        InvariantView view{rec.id, mode, rec.predicate};
        if (mode == ViewMode::PredicateWithMessage && rec.message) {
            view.text += kMessageSeparator;
            view.text += *rec.message;
        }
        views.push_back(std::move(view));
    }
    return views;
}

void write_invariants(std::ostream& out, std::span<const InvariantRecord> records) {
    for (const auto& rec : records) {
        nlohmann::ordered_json j;
        j["id"] = rec.id;
        j["predicate"] = rec.predicate;
        j["message"] = rec.message ? nlohmann::ordered_json(*rec.message) : nlohmann::ordered_json(nullptr);
        j["statement_kind"] = std::string(to_string(rec.kind));
        j["support"] = rec.support;
        auto prov = nlohmann::ordered_json::array();
        for (const auto& p : rec.provenance) {
            prov.push_back({{"tx_hash", p.tx_hash},
                            {"contract", p.contract},
                            {"function", p.function},
                            {"file", p.file},
                            {"line", p.line}});
        }
        j["provenance"] = std::move(prov);
        out << j.dump() << '\n';
    }
}

std::vector<InvariantRecord> read_invariants(std::istream& in) {
    std::vector<InvariantRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            InvariantRecord rec;
            rec.predicate = j.at("predicate").get<std::string>();
            rec.id = j.contains("id") ? j["id"].get<std::string>() : invariant_id(rec.predicate);
            if (j.contains("message") && !j["message"].is_null()) rec.message = j["message"].get<std::string>();
            rec.kind = parse_statement_kind(j.at("statement_kind").get<std::string>());
            rec.support = j.at("support").get<std::size_t>();
            for (const auto& p : j.value("provenance", nlohmann::json::array())) {
                rec.provenance.insert({p.at("tx_hash").get<std::string>(), p.at("contract").get<std::string>(),
                                       p.at("function").get<std::string>(), p.at("file").get<std::string>(),
                                       p.at("line").get<std::size_t>()});
            }
            records.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(kModule, e.what(), lineno);
        }
    }
    return records;
}

std::vector<InvariantRecord> read_invariants(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError(kModule, "cannot open " + path.string());
    return read_invariants(in);
}

}  // namespace revinv
