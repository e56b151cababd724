#pragma once

#include "revinv/clustering.hpp"
#include "revinv/embedding.hpp"
#include "revinv/extract.hpp"
#include "revinv/metrics.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace revinv {

struct IntRange {
    std::size_t min = 0;
    std::size_t max = 0;
    std::size_t step = 1;
};

struct RealRange {
    double min = 0.0;
    double max = 0.0;
    double step = 0.02;
};

/// Lattice min, min+step, ... up to max (inclusive within 1e-9), each value
/// rounded to 10 decimals so that 0.1 + 13*0.02 prints as 0.36.
std::vector<double> lattice(const RealRange& range);
std::vector<std::size_t> lattice(const IntRange& range);

/// Where an embedding comes from: the native TF-IDF path, or one external
/// vector file per view.
struct EmbeddingSpec {
    std::string name = "tfidf";
    std::map<ViewMode, std::filesystem::path> vector_files;  // empty for tf-idf
    bool is_tfidf() const { return vector_files.empty(); }
};

struct GridSpec {
    std::vector<EmbeddingSpec> embeddings{EmbeddingSpec{}};
    std::vector<ViewMode> views{ViewMode::PredicateOnly};
    std::optional<IntRange> kmeans_k;
    std::optional<RealRange> dbscan_eps;
    std::optional<IntRange> dbscan_min_samples;
    std::optional<RealRange> hdbscan_eps;
    std::optional<IntRange> hdbscan_min_cluster_size;
    std::uint64_t seed = 0;

    /// Full ranges with the default lattice steps (eps step 0.02, k step 1).
    static GridSpec paper_defaults();
};

/// Throws ArgumentError on empty ranges or non-positive steps.
void validate(const GridSpec& spec);

/// Reads the search manifest; relative vector paths resolve against the
/// manifest's directory.
GridSpec load_grid(const std::filesystem::path& path);
GridSpec parse_grid(const nlohmann::json& manifest, const std::filesystem::path& base_dir = {});
nlohmann::ordered_json grid_to_json(const GridSpec& spec);

struct ConfigTriple {
    std::string embedding;
    ViewMode view = ViewMode::PredicateOnly;
    AlgorithmParams params;

    bool operator==(const ConfigTriple&) const = default;
};

/// Canonical text "embedding|view|algorithm|params".
std::string triple_key(const ConfigTriple& triple);
std::string triple_digest(const ConfigTriple& triple);

/// Embeddings x views x (k-means, DBSCAN, HDBSCAN) x ascending parameters.
std::vector<ConfigTriple> enumerate_grid(const GridSpec& spec);

struct ConfigReport {
    ConfigTriple triple;
    std::uint64_t seed = 0;  // per-triple seed used by both runs
    MetricsReport metrics;
    std::string assignment_digest;
    std::string rerun_digest;
};

nlohmann::ordered_json report_to_json(const ConfigReport& report);

/// Hash of a label vector.
std::string labels_digest(std::span<const int> labels);

/// The matrices a triple is evaluated against, shared read-only.
struct EmbeddedView {
    EmbeddingMatrix matrix;
    DistanceMatrix distances;
};

class MatrixSet {
public:
    void add(const std::string& embedding, ViewMode view, EmbeddingMatrix matrix);
    const EmbeddedView& get(const std::string& embedding, ViewMode view) const;
    bool contains(const std::string& embedding, ViewMode view) const;

private:
    std::map<std::pair<std::string, ViewMode>, std::shared_ptr<const EmbeddedView>> views_;
};

/// Cluster twice with the per-triple seed, measure both runs, and apply
/// C1-C3. Undefined metrics yield an inadmissible report, not an error.
ConfigReport evaluate(const ConfigTriple& triple, const MatrixSet& matrices, std::uint64_t global_seed);

/// Thread-safe memo of evaluate() keyed by triple digest.
class ReportCache {
public:
    ConfigReport evaluate(const ConfigTriple& triple, const MatrixSet& matrices, std::uint64_t global_seed);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, ConfigReport> reports_;
};

/// Evaluate all triples on `workers` threads. The output order matches the
/// input order and does not depend on the worker count.
std::vector<ConfigReport> evaluate_all(std::span<const ConfigTriple> triples, const MatrixSet& matrices,
                                       std::uint64_t global_seed, std::size_t workers = 1,
                                       ReportCache* cache = nullptr);

struct Selection {
    ConfigReport best;
    std::vector<ConfigReport> ranking;  // admissible reports, best first
};

/// Among admissible reports order by S_Dbw ascending, silhouette
/// descending, coverage descending (all rounded half-to-even at two
/// decimals), then fewer clusters, then triple key. Throws
/// EmptySelectionError when nothing is admissible.
Selection select_best(std::span<const ConfigReport> reports);

/// Strict weak order used by select_best.
bool ranks_before(const ConfigReport& a, const ConfigReport& b);

/// Best admissible report per (embedding, algorithm, view) as CSV rows
/// in selection order.
void write_summary_csv(std::ostream& out, std::span<const ConfigReport> reports);

}  // namespace revinv
