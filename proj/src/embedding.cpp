#include "revinv/embedding.hpp"

#include "revinv/error.hpp"
#include "revinv/util.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace revinv {

namespace {

constexpr const char* kModule = "embedding";

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void check_unit(std::span<const double> v, const char* what) {
    if (std::abs(norm(v) - 1.0) > 1e-6) {
        throw ContractViolation(kModule, std::string(what) + " is not a unit vector");
    }
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim, std::vector<double> values,
                                 EmbeddingSource source)
    : ids_(std::move(ids)), dim_(dim), values_(std::move(values)), source_(std::move(source)) {
    if (values_.size() != ids_.size() * dim_) throw FormatError(kModule, "matrix shape does not match id count");
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!seen.insert(ids_[i]).second) throw FormatError(kModule, "duplicate id " + ids_[i]);
        if (std::abs(norm(row(i)) - 1.0) > kUnitNormTolerance) {
            throw ContractViolation(kModule, "row " + ids_[i] + " is not unit length");
        }
    }
}

EmbeddingMatrix EmbeddingMatrix::normalized(std::vector<std::string> ids, std::size_t dim, std::vector<double> values,
                                            EmbeddingSource source) {
    if (values.size() != ids.size() * dim) throw FormatError(kModule, "matrix shape does not match id count");
    for (std::size_t i = 0; i < ids.size(); ++i) {
        std::span<double> r(values.data() + i * dim, dim);
        const double n = norm(r);
        if (!(n > 0.0)) throw DegenerateError(kModule, "zero vector for " + ids[i]);
        for (double& x : r) x /= n;
    }
    return EmbeddingMatrix(std::move(ids), dim, std::move(values), std::move(source));
}

EmbeddingMatrix EmbeddingMatrix::permuted(std::span<const std::size_t> order) const {
    std::vector<std::string> ids;
    std::vector<double> values;
    ids.reserve(order.size());
    values.reserve(order.size() * dim_);
    for (std::size_t idx : order) {
        ids.push_back(ids_.at(idx));
        const auto r = row(idx);
        values.insert(values.end(), r.begin(), r.end());
    }
    return EmbeddingMatrix(std::move(ids), dim_, std::move(values), source_);
}

double dot(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
    return s;
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw ContractViolation(kModule, "dimension mismatch");
    check_unit(u, "u");
    check_unit(v, "v");
    return unit_cosine_distance(u, v);
}

DistanceMatrix::DistanceMatrix(const EmbeddingMatrix& matrix) : n_(matrix.rows()), d_(n_ * n_, 0.0) {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double d = unit_cosine_distance(matrix.row(i), matrix.row(j));
            d_[i * n_ + j] = d;
            d_[j * n_ + i] = d;
        }
    }
}

namespace {

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_single(char c) {
    return c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == '.' || c == ',' || c == ';';
}
bool is_operator(char c) {
    static constexpr std::string_view kOps = "+-*/%<>=!&|^~?:";
    return kOps.find(c) != std::string_view::npos;
}

}  // namespace

TokenStream tokenize(std::string_view text) {
    TokenStream out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        std::size_t j = i + 1;
        if (is_space(c)) {
            ++i;
            continue;
        }
        if (c == '"' || c == '\'') {
            while (j < n && text[j] != c) j += text[j] == '\\' ? 2 : 1;
            j = std::min(j + 1, n);
        } else if (is_ident_start(c)) {
            while (j < n && is_ident_char(text[j])) ++j;
        } else if (is_digit(c)) {
            while (j < n && (is_ident_char(text[j]) || (text[j] == '.' && j + 1 < n && is_digit(text[j + 1])))) ++j;
        } else if (is_single(c)) {
            // one character
        } else if (is_operator(c)) {
            while (j < n && is_operator(text[j])) ++j;
        } else {
            while (j < n && !is_space(text[j]) && !is_ident_char(text[j]) && !is_single(text[j]) &&
                   !is_operator(text[j]) && text[j] != '"' && text[j] != '\'') {
                ++j;
            }
        }
        out.tokens.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

EmbeddingMatrix tfidf_embed(std::span<const InvariantView> views) {
    if (views.size() < 2) throw ArgumentError(kModule, "tf-idf needs at least 2 documents");

    std::vector<std::map<std::string, std::size_t>> counts(views.size());
    std::map<std::string, std::size_t> df;
    for (std::size_t i = 0; i < views.size(); ++i) {
        const auto stream = tokenize(views[i].text);
        if (stream.tokens.empty()) throw DegenerateError(kModule, "document " + views[i].id + " has no tokens");
        for (const auto& t : stream.tokens) ++counts[i][t];
        for (const auto& [t, _] : counts[i]) ++df[t];
    }

    std::unordered_map<std::string, std::size_t> column;
    std::vector<double> idf;
    column.reserve(df.size());
    idf.reserve(df.size());
    const double n = static_cast<double>(views.size());
    for (const auto& [t, d] : df) {
        column.emplace(t, idf.size());
        idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(d))) + 1.0);
    }

    const std::size_t dim = idf.size();
    std::vector<double> values(views.size() * dim, 0.0);
    std::vector<std::string> ids;
    ids.reserve(views.size());
    for (std::size_t i = 0; i < views.size(); ++i) {
        ids.push_back(views[i].id);
        for (const auto& [t, tf] : counts[i]) {
            const std::size_t c = column.at(t);
            values[i * dim + c] = static_cast<double>(tf) * idf[c];
        }
    }
    return EmbeddingMatrix::normalized(std::move(ids), dim, std::move(values), EmbeddingSource::tfidf());
}

EmbeddingMatrix load_external_vectors(std::istream& in, std::span<const std::string> ids, std::string name) {
    std::map<std::string, std::size_t> wanted;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!wanted.emplace(ids[i], i).second) throw FormatError(kModule, "duplicate requested id " + ids[i]);
    }

    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            return true;
        }
        return false;
    };
    auto fail = [&](const std::string& what) {
        throw FormatError(kModule, name + " line " + std::to_string(lineno) + ": " + what);
    };

    if (!next_line()) fail("missing 'n d' header");
    std::size_t n = 0, d = 0;
    {
        std::istringstream header(line);
        std::string extra;
        if (!(header >> n >> d) || (header >> extra) || d == 0) fail("header must be 'n d' with d > 0");
    }

    std::vector<double> values(ids.size() * d, 0.0);
    std::vector<bool> filled(ids.size(), false);
    for (std::size_t r = 0; r < n; ++r) {
        if (!next_line()) fail("expected " + std::to_string(n) + " vectors, file ended after " + std::to_string(r));
        std::istringstream row(line);
        std::string id;
        row >> id;
        auto it = wanted.find(id);
        if (it == wanted.end()) fail("unknown id " + id);
        if (filled[it->second]) fail("duplicate id " + id);
        filled[it->second] = true;

        std::string tok;
        std::size_t k = 0;
        while (row >> tok) {
            if (k == d) fail("dimension mismatch for id " + id);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size()) fail("bad number '" + tok + "' for id " + id);
            if (!std::isfinite(v)) fail("non-finite value for id " + id);
            values[it->second * d + k++] = v;
        }
        if (k != d) fail("dimension mismatch for id " + id);
    }
    if (next_line()) fail("more vectors than declared");
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!filled[i]) throw FormatError(kModule, name + ": missing vector for id " + ids[i]);
    }

    try {
        return EmbeddingMatrix::normalized({ids.begin(), ids.end()}, d, std::move(values),
                                           EmbeddingSource::external(name));
    } catch (const DegenerateError& e) {
        throw FormatError(kModule, name + ": " + e.what());
    }
}

EmbeddingMatrix load_external_vectors(const std::filesystem::path& path, std::span<const std::string> ids) {
    std::ifstream in(path);
    if (!in) throw ArgumentError(kModule, "cannot open vector file " + path.string());
    return load_external_vectors(in, ids, path.stem().string());
}

void write_vectors(std::ostream& out, const EmbeddingMatrix& matrix) {
    out << matrix.rows() << ' ' << matrix.cols() << '\n';
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        out << matrix.ids()[i];
        for (double v : matrix.row(i)) out << ' ' << fmt::format("{}", v);
        out << '\n';
    }
}

PairSet generate_contrastive_pairs(const EmbeddingMatrix& matrix, const PairOptions& options) {
    if (!(options.positive_threshold > options.negative_threshold)) {
        throw ArgumentError(kModule, "positive threshold must exceed negative threshold");
    }
    if (matrix.rows() < 2) throw ArgumentError(kModule, "pair generation needs at least 2 rows");
    if (options.cap == 0) throw ArgumentError(kModule, "pair cap must be positive");

    PairSet out;
    out.source = matrix.source().name;

    std::vector<ContrastivePair> positive;
    std::vector<ContrastivePair> negative;
    const auto& ids = matrix.ids();
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        for (std::size_t j = i + 1; j < matrix.rows(); ++j) {
            const double sim = std::clamp(dot(matrix.row(i), matrix.row(j)), -1.0, 1.0);
            const bool ordered = ids[i] < ids[j];
            ContrastivePair p{ordered ? ids[i] : ids[j], ordered ? ids[j] : ids[i], PairLabel::Positive, sim};
            if (sim >= options.positive_threshold) {
                positive.push_back(std::move(p));
            } else if (sim <= options.negative_threshold) {
                p.label = PairLabel::Negative;
                negative.push_back(std::move(p));
            }
        }
    }

    if (positive.empty() || negative.empty()) {
        out.warning = fmt::format("no {} pairs at the given thresholds", positive.empty() ? "positive" : "negative");
        return out;
    }

    const std::size_t balanced = std::min(positive.size(), negative.size());
    const std::size_t keep_pos = std::min(balanced, options.cap - options.cap / 2);
    const std::size_t keep_neg = std::min(balanced, options.cap / 2);

    Rng rng(options.seed);
    auto sample = [&rng](std::vector<ContrastivePair>& pool, std::size_t keep) {
        for (std::size_t i = 0; i < keep; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(keep);
    };
    sample(positive, keep_pos);
    sample(negative, keep_neg);

    out.pairs = std::move(positive);
    out.pairs.insert(out.pairs.end(), negative.begin(), negative.end());
    std::sort(out.pairs.begin(), out.pairs.end(), [](const auto& a, const auto& b) {
        return std::tie(a.label, a.id_a, a.id_b) < std::tie(b.label, b.id_a, b.id_b);
    });
    return out;
}

void write_pairs(std::ostream& out, const PairSet& pairs, const PairOptions& options) {
    nlohmann::ordered_json header;
    header["header"] = {{"source", pairs.source},
                        {"positive_threshold", options.positive_threshold},
                        {"negative_threshold", options.negative_threshold},
                        {"cap", options.cap},
                        {"seed", options.seed},
                        {"count", pairs.pairs.size()}};
    if (pairs.warning) header["header"]["warning"] = *pairs.warning;
    out << header.dump() << '\n';
    for (const auto& p : pairs.pairs) {
        nlohmann::ordered_json j;
        j["id_a"] = p.id_a;
        j["id_b"] = p.id_b;
        j["label"] = p.label == PairLabel::Positive ? "positive" : "negative";
        j["similarity"] = p.similarity;
        out << j.dump() << '\n';
    }
}

}  // namespace revinv
