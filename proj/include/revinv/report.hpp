#pragma once

#include "revinv/clustering.hpp"
#include "revinv/embedding.hpp"
#include "revinv/extract.hpp"

#include <json.hpp>

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace revinv {

struct Projection2D {
    std::vector<double> x;
    std::vector<double> y;
    std::array<double, 2> explained{};  // variance fractions, first >= second
    std::array<std::vector<double>, 2> components;  // unit loading vectors
};

/// Project centered rows onto the top two right singular directions. Each
/// loading vector is signed so that its largest-magnitude entry is positive
/// (first such entry on ties). Needs n >= 3 and d >= 2; throws
/// DegenerateError when all rows coincide.
Projection2D pca_2d(std::span<const double> values, std::size_t n, std::size_t d);
Projection2D pca_2d(const EmbeddingMatrix& matrix);

struct ClusterSummary {
    int cluster_id = 0;
    std::size_t size = 0;
    std::size_t tx_count = 0;
    double tx_percent = 0.0;            // over support of every invariant
    double tx_percent_clustered = 0.0;  // over support of clustered invariants
    std::string representative_id;
    std::string representative;
    std::vector<std::string> members;
};

/// Per-cluster sizes, transaction counts and the member closest to the
/// re-normalized centroid (ties: higher support, then smaller predicate).
/// `records` must be aligned with the matrix rows and the labels.
std::vector<ClusterSummary> summarize_clusters(const ClusterAssignment& assignment,
                                               std::span<const InvariantRecord> records,
                                               const EmbeddingMatrix& matrix);

nlohmann::ordered_json clusters_to_json(std::span<const ClusterSummary> clusters,
                                        std::span<const InvariantRecord> records);

/// `id,x,y,label`, one row per invariant in matrix order.
void write_pca_csv(std::ostream& out, const Projection2D& projection, std::span<const std::string> ids,
                   std::span<const int> labels);

}  // namespace revinv
