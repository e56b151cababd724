#pragma once

#include "revinv/extract.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace revinv {

/// Rows must be within this distance of unit Euclidean norm.
inline constexpr double kUnitNormTolerance = 1e-9;

/// Cosine distances below this are reported as exactly 0, so coincident
/// unit vectors compare equal despite rounding in the dot product.
inline constexpr double kDistanceSnap = 1e-12;

struct EmbeddingSource {
    enum class Kind { TfIdf, External };
    Kind kind = Kind::TfIdf;
    std::string name = "tfidf";

    static EmbeddingSource tfidf() { return {}; }
    static EmbeddingSource external(std::string name) { return {Kind::External, std::move(name)}; }
    bool operator==(const EmbeddingSource&) const = default;
};

/// Row-per-invariant unit vectors, row-major.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;

    /// Takes rows that are already unit length. Throws ContractViolation on a
    /// non-unit row, FormatError on duplicate ids or shape mismatch.
    EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim, std::vector<double> values,
                    EmbeddingSource source);

    /// L2-normalizes each row first. Throws DegenerateError naming the id of
    /// a zero row.
    static EmbeddingMatrix normalized(std::vector<std::string> ids, std::size_t dim,
                                      std::vector<double> values, EmbeddingSource source);

    std::size_t rows() const { return ids_.size(); }
    std::size_t cols() const { return dim_; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::vector<double>& values() const { return values_; }
    const EmbeddingSource& source() const { return source_; }

    /// Rows reordered so that result.row(k) == row(order[k]).
    EmbeddingMatrix permuted(std::span<const std::size_t> order) const;

private:
    std::vector<std::string> ids_;
    std::size_t dim_ = 0;
    std::vector<double> values_;
    EmbeddingSource source_;
};

/// 1 - <u, v> for unit vectors, snapped to 0 near zero and clamped to [0, 2].
/// Throws ContractViolation when either input is not unit length.
double cosine_distance(std::span<const double> u, std::span<const double> v);

double dot(std::span<const double> u, std::span<const double> v);

/// Unchecked distance kernel shared by the clustering and metric code.
inline double unit_cosine_distance(std::span<const double> u, std::span<const double> v) {
    double d = 1.0 - dot(u, v);
    if (d < kDistanceSnap) return 0.0;
    return d > 2.0 ? 2.0 : d;
}

/// Dense symmetric pairwise cosine distances, computed once per matrix and
/// shared read-only between clustering runs.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(const EmbeddingMatrix& matrix);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {d_.data() + i * n_, n_}; }

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

struct TokenStream {
    std::vector<std::string> tokens;
    bool operator==(const TokenStream&) const = default;
};

/// Identifiers, number literals, quoted string literals (quotes kept),
/// single-character brackets/dot/comma/semicolon, and maximal runs of the
/// remaining operator characters.
TokenStream tokenize(std::string_view text);

/// TF-IDF with raw term counts and smoothed idf ln((1+n)/(1+df)) + 1 over a
/// lexicographically sorted vocabulary; rows L2-normalized.
EmbeddingMatrix tfidf_embed(std::span<const InvariantView> views);

/// Reads the `n d` vector format, re-normalizes rows and aligns them to
/// `ids`. Throws FormatError on missing/duplicate/unknown ids, dimension
/// mismatch, or non-finite values.
EmbeddingMatrix load_external_vectors(const std::filesystem::path& path, std::span<const std::string> ids);
EmbeddingMatrix load_external_vectors(std::istream& in, std::span<const std::string> ids, std::string name);

void write_vectors(std::ostream& out, const EmbeddingMatrix& matrix);

enum class PairLabel { Positive, Negative };

struct ContrastivePair {
    std::string id_a;  // id_a < id_b
    std::string id_b;
    PairLabel label = PairLabel::Positive;
    double similarity = 0.0;

    bool operator==(const ContrastivePair&) const = default;
};

struct PairOptions {
    double positive_threshold = 0.8;
    double negative_threshold = 0.3;
    std::size_t cap = 20000;
    std::uint64_t seed = 0;
};

struct PairSet {
    std::vector<ContrastivePair> pairs;  // sorted by (label, id_a, id_b)
    std::string source;
    std::optional<std::string> warning;
};

/// Thresholded pseudo-labels over all unordered row pairs, balanced by
/// seeded downsampling of the larger class and capped at `cap` pairs.
PairSet generate_contrastive_pairs(const EmbeddingMatrix& matrix, const PairOptions& options);

void write_pairs(std::ostream& out, const PairSet& pairs, const PairOptions& options);

}  // namespace revinv
