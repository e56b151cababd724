#pragma once

#include "revinv/clustering.hpp"
#include "revinv/embedding.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace revinv {

/// Mean silhouette over clustered (non-noise) rows, cosine distance.
/// Singletons score 0. Throws UndefinedMetricError with fewer than two
/// clusters.
double silhouette(const DistanceMatrix& distances, std::span<const int> labels);
double silhouette(const EmbeddingMatrix& matrix, std::span<const int> labels);

/// Term breakdown of S_Dbw.
struct SDbwTerms {
    double scatter = 0.0;  // (1/k) sum scatter(C_i) / scatter(D)
    double density = 0.0;  // between-cluster midpoint density over ordered pairs / k(k-1)
    double radius = 0.0;   // r = mean within-cluster scatter
    double total() const { return scatter + density; }
};

/// S_Dbw on the unit sphere: centroids are re-normalized means, dens(p)
/// counts members of the two clusters within cosine distance <= r of p.
/// Throws UndefinedMetricError with fewer than two clusters, when all
/// clustered points coincide, or when a centroid is undefined (members sum
/// to zero).
SDbwTerms s_dbw_terms(const EmbeddingMatrix& matrix, std::span<const int> labels);
double s_dbw(const EmbeddingMatrix& matrix, std::span<const int> labels);

/// 100 * clustered / n_unique_invariants, rounded to two decimals.
double coverage(std::span<const int> labels, std::size_t n_unique_invariants);
double coverage(std::span<const int> labels);

enum class Criterion { C1, C2, C3 };
std::string_view to_string(Criterion c);

inline constexpr std::size_t kMinClusters = 8;
inline constexpr std::size_t kMaxClusters = 100;
inline constexpr double kCoverageFloor = 50.0;

struct MetricsReport {
    std::optional<double> silhouette;  // nullopt when undefined
    std::optional<double> s_dbw;
    double coverage_percent = 0.0;
    std::size_t n_clusters = 0;
    bool admissible = false;
    std::vector<Criterion> failed_criteria;
    std::optional<std::string> reason;  // why metrics are undefined

    bool operator==(const MetricsReport&) const = default;
};

/// Silhouette, S_Dbw and coverage for one clustering; undefined metrics are
/// left empty with a reason instead of throwing. Admissibility is not filled.
MetricsReport measure(const EmbeddingMatrix& matrix, const DistanceMatrix& distances,
                      const ClusterAssignment& assignment);

struct Admissibility {
    bool admissible = false;
    std::vector<Criterion> failed;
};

/// C1: kMinClusters <= n_clusters <= kMaxClusters. C2: coverage >= 50%.
/// C3: silhouette, S_Dbw and coverage equal across the two runs after
/// rounding half-to-even at two decimals (undefined metrics fail C3).
Admissibility admissibility(const MetricsReport& first, const MetricsReport& rerun);

}  // namespace revinv
