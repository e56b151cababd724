#include "revinv/metrics.hpp"

#include "revinv/error.hpp"
#include "revinv/util.hpp"

#include <algorithm>
#include <cmath>

namespace revinv {

namespace {

constexpr const char* kModule = "metrics";

// Members per cluster label; noise skipped.
std::vector<std::vector<std::size_t>> group(std::span<const int> labels) {
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) continue;
        const auto c = static_cast<std::size_t>(labels[i]);
        if (c >= members.size()) members.resize(c + 1);
        members[c].push_back(i);
    }
    std::erase_if(members, [](const auto& m) { return m.empty(); });
    return members;
}

// Re-normalized mean of the given rows; empty when the mean vanishes.
std::vector<double> unit_mean(const EmbeddingMatrix& matrix, std::span<const std::size_t> rows) {
    std::vector<double> mean(matrix.cols(), 0.0);
    for (std::size_t i : rows) {
        const auto r = matrix.row(i);
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += r[j];
    }
    const double norm = std::sqrt(dot(mean, mean));
    if (norm <= 1e-12) return {};
    for (double& x : mean) x /= norm;
    return mean;
}

}  // namespace

double silhouette(const DistanceMatrix& distances, std::span<const int> labels) {
    if (labels.size() != distances.size()) throw ArgumentError(kModule, "labels do not match matrix rows");
    const auto clusters = group(labels);
    if (clusters.size() < 2) throw UndefinedMetricError(kModule, "silhouette needs at least 2 clusters");

    std::vector<std::size_t> cluster_of(labels.size(), 0);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (std::size_t i : clusters[c]) cluster_of[i] = c;
    }

    double total = 0.0;
    std::size_t counted = 0;
    std::vector<double> sums(clusters.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) continue;
        ++counted;
        const std::size_t own = cluster_of[i];
        if (clusters[own].size() == 1) continue;  // singleton scores 0

        std::fill(sums.begin(), sums.end(), 0.0);
        const auto row = distances.row(i);
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            for (std::size_t j : clusters[c]) sums[c] += row[j];
        }
        const double a = sums[own] / static_cast<double>(clusters[own].size() - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            if (c != own) b = std::min(b, sums[c] / static_cast<double>(clusters[c].size()));
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(counted);
}

double silhouette(const EmbeddingMatrix& matrix, std::span<const int> labels) {
    return silhouette(DistanceMatrix(matrix), labels);
}

SDbwTerms s_dbw_terms(const EmbeddingMatrix& matrix, std::span<const int> labels) {
    if (labels.size() != matrix.rows()) throw ArgumentError(kModule, "labels do not match matrix rows");
    const auto clusters = group(labels);
    const std::size_t k = clusters.size();
    if (k < 2) throw UndefinedMetricError(kModule, "S_Dbw needs at least 2 clusters");

    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    std::vector<double> scatter(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        centroids.push_back(unit_mean(matrix, clusters[c]));
        if (centroids.back().empty()) throw UndefinedMetricError(kModule, "cluster centroid is undefined (members sum to zero)");
        for (std::size_t i : clusters[c]) scatter[c] += unit_cosine_distance(matrix.row(i), centroids[c]);
        scatter[c] /= static_cast<double>(clusters[c].size());
    }

    std::vector<std::size_t> clustered;
    for (const auto& m : clusters) clustered.insert(clustered.end(), m.begin(), m.end());
    const auto global = unit_mean(matrix, clustered);
    if (global.empty()) throw UndefinedMetricError(kModule, "global centroid is undefined");
    double scatter_all = 0.0;
    for (std::size_t i : clustered) scatter_all += unit_cosine_distance(matrix.row(i), global);
    scatter_all /= static_cast<double>(clustered.size());
    if (scatter_all <= 0.0) throw UndefinedMetricError(kModule, "all clustered points coincide");

    SDbwTerms terms;
    double sum_ratio = 0.0;
    double sum_scatter = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        sum_ratio += scatter[c] / scatter_all;
        sum_scatter += scatter[c];
    }
    terms.scatter = sum_ratio / static_cast<double>(k);
    terms.radius = sum_scatter / static_cast<double>(k);

    const double r = terms.radius;
    auto density = [&](std::span<const double> p, std::size_t ci, std::size_t cj) {
        std::size_t count = 0;
        for (std::size_t c : {ci, cj}) {
            for (std::size_t i : clusters[c]) {
                if (unit_cosine_distance(matrix.row(i), p) <= r) ++count;
            }
        }
        return count;
    };

    double pair_sum = 0.0;
    std::vector<double> mid(matrix.cols());
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            for (std::size_t t = 0; t < mid.size(); ++t) mid[t] = centroids[i][t] + centroids[j][t];
            const double norm = std::sqrt(dot(mid, mid));
            // Antipodal centroids have no midpoint; the pair adds nothing.
            if (norm <= 1e-12) continue;
            for (double& x : mid) x /= norm;
            const std::size_t denom = std::max(density(centroids[i], i, j), density(centroids[j], i, j));
            if (denom == 0) continue;
            // Each unordered pair stands for (i, j) and (j, i).
            pair_sum += 2.0 * static_cast<double>(density(mid, i, j)) / static_cast<double>(denom);
        }
    }
    terms.density = pair_sum / static_cast<double>(k * (k - 1));
    return terms;
}

double s_dbw(const EmbeddingMatrix& matrix, std::span<const int> labels) {
    return s_dbw_terms(matrix, labels).total();
}

double coverage(std::span<const int> labels, std::size_t n_unique_invariants) {
    if (n_unique_invariants == 0) throw ArgumentError(kModule, "coverage of an empty invariant set");
    if (labels.size() != n_unique_invariants) throw ArgumentError(kModule, "label count differs from invariant count");
    const auto clustered = std::count_if(labels.begin(), labels.end(), [](int l) { return l >= 0; });
    return round_half_even(100.0 * static_cast<double>(clustered) / static_cast<double>(n_unique_invariants), 2);
}

double coverage(std::span<const int> labels) { return coverage(labels, labels.size()); }

std::string_view to_string(Criterion c) {
    switch (c) {
        case Criterion::C1: return "C1";
        case Criterion::C2: return "C2";
        case Criterion::C3: return "C3";
    }
    return "C1";
}

MetricsReport measure(const EmbeddingMatrix& matrix, const DistanceMatrix& distances,
                      const ClusterAssignment& assignment) {
    MetricsReport report;
    report.n_clusters = assignment.n_clusters;
    report.coverage_percent = coverage(assignment.labels);
    try {
        report.silhouette = silhouette(distances, assignment.labels);
        report.s_dbw = s_dbw(matrix, assignment.labels);
    } catch (const UndefinedMetricError& e) {
        report.silhouette.reset();
        report.s_dbw.reset();
        report.reason = std::string("undefined metrics: ") + e.what();
    }
    return report;
}

Admissibility admissibility(const MetricsReport& first, const MetricsReport& rerun) {
    Admissibility out;
    if (first.n_clusters < kMinClusters || first.n_clusters > kMaxClusters) out.failed.push_back(Criterion::C1);
    if (first.coverage_percent < kCoverageFloor) out.failed.push_back(Criterion::C2);

    auto same = [](const std::optional<double>& a, const std::optional<double>& b) {
        return a && b && round_half_even(*a, 2) == round_half_even(*b, 2);
    };
    const bool stable = same(first.silhouette, rerun.silhouette) && same(first.s_dbw, rerun.s_dbw) &&
                        round_half_even(first.coverage_percent, 2) == round_half_even(rerun.coverage_percent, 2);
    if (!stable) out.failed.push_back(Criterion::C3);
    out.admissible = out.failed.empty();
    return out;
}

}  // namespace revinv
