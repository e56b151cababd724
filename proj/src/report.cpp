#include "revinv/report.hpp"

#include "revinv/error.hpp"
#include "revinv/util.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <cmath>
#include <map>
#include <ostream>

namespace revinv {

namespace {

constexpr const char* kModule = "report";

double percent(std::size_t part, std::size_t whole) {
    if (whole == 0) return 0.0;
    return round_half_even(100.0 * static_cast<double>(part) / static_cast<double>(whole), 2);
}

}  // namespace

Projection2D pca_2d(std::span<const double> values, std::size_t n, std::size_t d) {
    if (n < 3 || d < 2) throw ArgumentError(kModule, "PCA needs at least 3 rows and 2 columns");
    if (values.size() != n * d) throw ArgumentError(kModule, "value count does not match shape");

    using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Matrix centered = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(n),
                                               static_cast<Eigen::Index>(d));
    centered.rowwise() -= centered.colwise().mean();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const Eigen::VectorXd sigma = svd.singularValues();
    const double total = sigma.squaredNorm();
    if (!(total > 1e-24)) throw DegenerateError(kModule, "zero total variance; rows coincide");

    Projection2D out;
    out.x.resize(n);
    out.y.resize(n);
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd v = svd.matrixV().col(c);
        Eigen::Index pivot = 0;
        for (Eigen::Index j = 1; j < v.size(); ++j) {
            if (std::abs(v[j]) > std::abs(v[pivot])) pivot = j;
        }
        if (v[pivot] < 0) v = -v;
        out.explained[static_cast<std::size_t>(c)] = sigma.size() > c ? sigma[c] * sigma[c] / total : 0.0;
        out.components[static_cast<std::size_t>(c)].assign(v.data(), v.data() + v.size());
        const Eigen::VectorXd scores = centered * v;
        auto& target = c == 0 ? out.x : out.y;
        for (std::size_t i = 0; i < n; ++i) target[i] = scores[static_cast<Eigen::Index>(i)];
    }
    return out;
}

Projection2D pca_2d(const EmbeddingMatrix& matrix) { return pca_2d(matrix.values(), matrix.rows(), matrix.cols()); }

std::vector<ClusterSummary> summarize_clusters(const ClusterAssignment& assignment,
                                               std::span<const InvariantRecord> records,
                                               const EmbeddingMatrix& matrix) {
    const std::size_t n = records.size();
    if (assignment.labels.size() != n || matrix.rows() != n) {
        throw ArgumentError(kModule, "assignment, records and matrix are not aligned");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (matrix.ids()[i] != records[i].id) throw ArgumentError(kModule, "matrix row " + std::to_string(i) + " is not " + records[i].id);
    }

    std::map<int, std::vector<std::size_t>> groups;
    std::size_t total_support = 0;
    std::size_t clustered_support = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total_support += records[i].support;
        if (assignment.labels[i] < 0) continue;
        groups[assignment.labels[i]].push_back(i);
        clustered_support += records[i].support;
    }

    std::vector<ClusterSummary> out;
    out.reserve(groups.size());
    std::vector<double> centroid(matrix.cols());
    for (const auto& [label, rows] : groups) {
        ClusterSummary s;
        s.cluster_id = label;
        s.size = rows.size();

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i : rows) {
            const auto r = matrix.row(i);
            for (std::size_t j = 0; j < centroid.size(); ++j) centroid[j] += r[j];
        }
        const double norm = std::sqrt(dot(centroid, centroid));
        if (norm > 0.0) {
            for (double& v : centroid) v /= norm;
        }

        std::size_t best = rows.front();
        double best_dist = norm > 0.0 ? unit_cosine_distance(matrix.row(best), centroid) : 1.0;
        for (std::size_t i : rows) {
            s.tx_count += records[i].support;
            s.members.push_back(records[i].id);
            const double d = norm > 0.0 ? unit_cosine_distance(matrix.row(i), centroid) : 1.0;
            const auto& cand = records[i];
            const auto& cur = records[best];
            if (d < best_dist || (d == best_dist && (cand.support > cur.support ||
                                                     (cand.support == cur.support && cand.predicate < cur.predicate)))) {
                best = i;
                best_dist = d;
            }
        }
        s.representative_id = records[best].id;
        s.representative = records[best].predicate;
        s.tx_percent = percent(s.tx_count, total_support);
        s.tx_percent_clustered = percent(s.tx_count, clustered_support);
        out.push_back(std::move(s));
    }
    return out;
}

nlohmann::ordered_json clusters_to_json(std::span<const ClusterSummary> clusters,
                                        std::span<const InvariantRecord> records) {
    std::size_t total = 0;
    for (const auto& r : records) total += r.support;
    std::size_t clustered = 0;
    for (const auto& c : clusters) clustered += c.tx_count;

    nlohmann::ordered_json j;
    j["invariant_tx_total"] = total;
    j["clustered_tx_total"] = clustered;
    j["clusters"] = nlohmann::ordered_json::array();
    for (const auto& c : clusters) {
        nlohmann::ordered_json e;
        e["cluster_id"] = c.cluster_id;
        e["size"] = c.size;
        e["tx_count"] = c.tx_count;
        e["tx_percent"] = c.tx_percent;
        e["tx_percent_clustered"] = c.tx_percent_clustered;
        e["representative_id"] = c.representative_id;
        e["representative"] = c.representative;
        e["members"] = c.members;
        j["clusters"].push_back(std::move(e));
    }
    return j;
}

void write_pca_csv(std::ostream& out, const Projection2D& projection, std::span<const std::string> ids,
                   std::span<const int> labels) {
    if (ids.size() != projection.x.size() || labels.size() != ids.size()) {
        throw ArgumentError(kModule, "projection, ids and labels are not aligned");
    }
    out << "id,x,y,label\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        // Adding 0.0 folds -0 into 0 so tiny sign flips do not show up in the text.
        out << fmt::format("{},{:.9f},{:.9f},{}\n", ids[i], projection.x[i] + 0.0, projection.y[i] + 0.0, labels[i]);
    }
}

}  // namespace revinv
