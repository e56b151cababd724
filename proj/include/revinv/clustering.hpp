#pragma once

#include "revinv/embedding.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace revinv {

inline constexpr int kNoise = -1;

struct KMeansParams {
    std::size_t k = 8;
    bool operator==(const KMeansParams&) const = default;
};

struct DbscanParams {
    double eps = 0.5;
    std::size_t min_samples = 5;
    bool operator==(const DbscanParams&) const = default;
};

enum class HdbscanSelection { ExcessOfMass, Leaf };

struct HdbscanParams {
    std::size_t min_cluster_size = 5;
    std::optional<double> selection_eps;
    HdbscanSelection selection = HdbscanSelection::ExcessOfMass;
    bool operator==(const HdbscanParams&) const = default;
};

using AlgorithmParams = std::variant<KMeansParams, DbscanParams, HdbscanParams>;

struct ClusterParams {
    AlgorithmParams algorithm;
    std::uint64_t seed = 0;
    bool operator==(const ClusterParams&) const = default;
};

/// Throws ArgumentError when a parameter is outside its domain.
void validate(const ClusterParams& params);

std::string algorithm_name(const AlgorithmParams& params);
/// Canonical parameter text, e.g. "eps:0.36,min_samples:15".
std::string params_text(const AlgorithmParams& params);

struct ClusterAssignment {
    std::vector<int> labels;  // kNoise or 0..n_clusters-1
    ClusterParams params;
    std::size_t n_clusters = 0;
};

/// Renumber non-noise labels densely by first appearance in row order.
std::size_t canonicalize_labels(std::vector<int>& labels);

struct KMeansRun {
    ClusterAssignment assignment;
    std::vector<double> inertia_trace;  // after each centroid update
    std::size_t iterations = 0;
};

/// Spherical k-means: seeded k-means++ start, max-dot assignment,
/// re-normalized mean centroids; at most 300 iterations.
KMeansRun kmeans_run(const EmbeddingMatrix& matrix, std::size_t k, std::uint64_t seed);
ClusterAssignment kmeans(const EmbeddingMatrix& matrix, std::size_t k, std::uint64_t seed);

/// Density clustering over cosine distance. Core points have at least
/// min_samples points (self included) within distance <= eps; border points
/// join the first cluster that reaches them in row order.
ClusterAssignment dbscan(const DistanceMatrix& distances, double eps, std::size_t min_samples);
ClusterAssignment dbscan(const EmbeddingMatrix& matrix, double eps, std::size_t min_samples);

struct CondensedEdge {
    std::size_t parent;  // cluster label; the root cluster is n
    std::size_t child;   // point index (< n) or cluster label (>= n)
    double lambda;       // 1 / distance at which the child leaves the parent
    std::size_t size;
};

struct HdbscanRun {
    ClusterAssignment assignment;
    std::vector<CondensedEdge> condensed_tree;
    std::vector<double> stability;           // indexed by cluster label - n
    std::vector<std::size_t> selected;       // selected cluster labels
    std::vector<double> selected_stability;  // aligned with assignment label
};

/// Mutual-reachability MST (core distance = distance to the
/// min_cluster_size-th nearest point, self included), condensed tree with
/// the same minimum size, excess-of-mass selection (or leaf selection), and
/// optional cluster-selection epsilon. n < min_cluster_size yields all noise.
HdbscanRun hdbscan_run(const DistanceMatrix& distances, const HdbscanParams& params);
ClusterAssignment hdbscan(const DistanceMatrix& distances, std::size_t min_cluster_size,
                          std::optional<double> selection_eps = std::nullopt);
ClusterAssignment hdbscan(const EmbeddingMatrix& matrix, std::size_t min_cluster_size,
                          std::optional<double> selection_eps = std::nullopt);

/// Dispatch on params.algorithm. The distance matrix is only used by the
/// density algorithms.
ClusterAssignment run_clustering(const EmbeddingMatrix& matrix, const DistanceMatrix& distances,
                                 const ClusterParams& params);

}  // namespace revinv
