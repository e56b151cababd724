#include "revinv/search.hpp"

#include "revinv/error.hpp"
#include "revinv/util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <ostream>
#include <thread>

namespace revinv {

namespace {

constexpr const char* kModule = "search";

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::pair<double, double> read_pair(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) throw ArgumentError(kModule, std::string(what) + " must be [min, max]");
    return {j[0].get<double>(), j[1].get<double>()};
}

IntRange read_int_range(const json& section, const char* key, const char* step_key) {
    const auto [lo, hi] = read_pair(section.at(key), key);
    if (lo < 0 || hi < 0 || lo != std::floor(lo) || hi != std::floor(hi)) {
        throw ArgumentError(kModule, std::string(key) + " bounds must be non-negative integers");
    }
    IntRange r{static_cast<std::size_t>(lo), static_cast<std::size_t>(hi), 1};
    if (step_key && section.contains(step_key)) r.step = section[step_key].get<std::size_t>();
    return r;
}

RealRange read_real_range(const json& section, const char* key, const char* step_key) {
    const auto [lo, hi] = read_pair(section.at(key), key);
    RealRange r{lo, hi, 0.02};
    if (section.contains(step_key)) r.step = section[step_key].get<double>();
    return r;
}

}  // namespace

std::vector<double> lattice(const RealRange& range) {
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((range.max - range.min) / range.step + 1e-9)) + 1;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(std::round((range.min + static_cast<double>(i) * range.step) * 1e10) / 1e10);
    }
    return out;
}

std::vector<std::size_t> lattice(const IntRange& range) {
    std::vector<std::size_t> out;
    for (std::size_t v = range.min; v <= range.max; v += range.step) out.push_back(v);
    return out;
}

GridSpec GridSpec::paper_defaults() {
    GridSpec spec;
    spec.kmeans_k = IntRange{8, 100, 1};
    spec.dbscan_eps = RealRange{0.1, 5.0, 0.02};
    spec.dbscan_min_samples = IntRange{10, 15, 1};
    spec.hdbscan_eps = RealRange{0.1, 1.0, 0.02};
    spec.hdbscan_min_cluster_size = IntRange{10, 15, 1};
    return spec;
}

void validate(const GridSpec& spec) {
    auto check_int = [](const std::optional<IntRange>& r, const char* what) {
        if (!r) return;
        if (r->step == 0) throw ArgumentError(kModule, std::string(what) + " step must be positive");
        if (r->min > r->max) throw ArgumentError(kModule, std::string(what) + " range is empty");
    };
    auto check_real = [](const std::optional<RealRange>& r, const char* what) {
        if (!r) return;
        if (!(r->step > 0.0)) throw ArgumentError(kModule, std::string(what) + " step must be positive");
        if (!(r->min <= r->max)) throw ArgumentError(kModule, std::string(what) + " range is empty");
        if (!(r->min > 0.0)) throw ArgumentError(kModule, std::string(what) + " must be positive");
    };
    check_int(spec.kmeans_k, "kmeans k");
    check_real(spec.dbscan_eps, "dbscan eps");
    check_int(spec.dbscan_min_samples, "dbscan min_samples");
    check_real(spec.hdbscan_eps, "hdbscan eps");
    check_int(spec.hdbscan_min_cluster_size, "hdbscan min_cluster_size");
    if (spec.kmeans_k && spec.kmeans_k->min < 1) throw ArgumentError(kModule, "kmeans k must be >= 1");
    if (spec.dbscan_min_samples && spec.dbscan_min_samples->min < 1) {
        throw ArgumentError(kModule, "dbscan min_samples must be >= 1");
    }
    if (spec.hdbscan_min_cluster_size && spec.hdbscan_min_cluster_size->min < 2) {
        throw ArgumentError(kModule, "hdbscan min_cluster_size must be >= 2");
    }
    if (spec.dbscan_eps.has_value() != spec.dbscan_min_samples.has_value()) {
        throw ArgumentError(kModule, "dbscan needs both eps and min_samples ranges");
    }
    if (!spec.hdbscan_min_cluster_size && spec.hdbscan_eps) {
        throw ArgumentError(kModule, "hdbscan eps given without min_cluster_size range");
    }
    if (spec.embeddings.empty()) throw ArgumentError(kModule, "no embeddings in grid");
    if (spec.views.empty()) throw ArgumentError(kModule, "no views in grid");
}

GridSpec parse_grid(const json& m, const std::filesystem::path& base_dir) {
    try {
        GridSpec spec;
        spec.seed = m.value("seed", std::uint64_t{0});
        if (m.contains("views")) {
            spec.views.clear();
            for (const auto& v : m["views"]) spec.views.push_back(parse_view_mode(v.get<std::string>()));
        }
        if (m.contains("embeddings")) {
            spec.embeddings.clear();
            for (const auto& e : m["embeddings"]) {
                EmbeddingSpec es;
                es.name = e.at("name").get<std::string>();
                if (e.contains("vectors")) {
                    for (const auto& [view, file] : e["vectors"].items()) {
                        std::filesystem::path p = file.get<std::string>();
                        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
                        es.vector_files.emplace(parse_view_mode(view), p);
                    }
                }
                if (es.is_tfidf() && es.name != "tfidf") {
                    throw ArgumentError(kModule, "embedding '" + es.name + "' has no vector files");
                }
                spec.embeddings.push_back(std::move(es));
            }
        }
        if (m.contains("kmeans")) spec.kmeans_k = read_int_range(m["kmeans"], "k", "k_step");
        if (m.contains("dbscan")) {
            spec.dbscan_eps = read_real_range(m["dbscan"], "eps", "eps_step");
            spec.dbscan_min_samples = read_int_range(m["dbscan"], "min_samples", nullptr);
        }
        if (m.contains("hdbscan")) {
            const auto& h = m["hdbscan"];
            spec.hdbscan_min_cluster_size = read_int_range(h, "min_cluster_size", nullptr);
            if (h.contains("eps")) spec.hdbscan_eps = read_real_range(h, "eps", "eps_step");
        }
        validate(spec);
        return spec;
    } catch (const json::exception& e) {
        throw ArgumentError(kModule, std::string("bad grid manifest: ") + e.what());
    }
}

GridSpec load_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError(kModule, "cannot open grid manifest " + path.string());
    json m;
    try {
        m = json::parse(in);
    } catch (const json::exception& e) {
        throw ArgumentError(kModule, path.string() + ": " + e.what());
    }
    return parse_grid(m, path.parent_path());
}

ojson grid_to_json(const GridSpec& spec) {
    ojson j;
    j["seed"] = spec.seed;
    j["views"] = ojson::array();
    for (auto v : spec.views) j["views"].push_back(std::string(to_string(v)));
    j["embeddings"] = ojson::array();
    for (const auto& e : spec.embeddings) j["embeddings"].push_back(e.name);
    if (spec.kmeans_k) j["kmeans"] = {{"k", {spec.kmeans_k->min, spec.kmeans_k->max}}, {"k_step", spec.kmeans_k->step}};
    if (spec.dbscan_eps) {
        j["dbscan"] = {{"eps", {spec.dbscan_eps->min, spec.dbscan_eps->max}},
                       {"eps_step", spec.dbscan_eps->step},
                       {"min_samples", {spec.dbscan_min_samples->min, spec.dbscan_min_samples->max}},
                       {"lattice_size", lattice(*spec.dbscan_eps).size() * lattice(*spec.dbscan_min_samples).size()}};
    }
    if (spec.hdbscan_min_cluster_size) {
        ojson h;
        h["min_cluster_size"] = {spec.hdbscan_min_cluster_size->min, spec.hdbscan_min_cluster_size->max};
        std::size_t eps_count = 1;
        if (spec.hdbscan_eps) {
            h["eps"] = {spec.hdbscan_eps->min, spec.hdbscan_eps->max};
            h["eps_step"] = spec.hdbscan_eps->step;
            h["eps_role"] = "cluster_selection_epsilon";
            eps_count = lattice(*spec.hdbscan_eps).size();
        }
        h["lattice_size"] = eps_count * lattice(*spec.hdbscan_min_cluster_size).size();
        j["hdbscan"] = std::move(h);
    }
    return j;
}

std::string triple_key(const ConfigTriple& t) {
    return fmt::format("{}|{}|{}|{}", t.embedding, to_string(t.view), algorithm_name(t.params), params_text(t.params));
}

std::string triple_digest(const ConfigTriple& t) { return sha256_hex(triple_key(t)); }

std::vector<ConfigTriple> enumerate_grid(const GridSpec& spec) {
    validate(spec);
    std::vector<AlgorithmParams> params;
    if (spec.kmeans_k) {
        for (auto k : lattice(*spec.kmeans_k)) params.emplace_back(KMeansParams{k});
    }
    if (spec.dbscan_eps) {
        for (double eps : lattice(*spec.dbscan_eps)) {
            for (auto ms : lattice(*spec.dbscan_min_samples)) params.emplace_back(DbscanParams{eps, ms});
        }
    }
    if (spec.hdbscan_min_cluster_size) {
        std::vector<std::optional<double>> eps_values;
        if (spec.hdbscan_eps) {
            for (double e : lattice(*spec.hdbscan_eps)) eps_values.emplace_back(e);
        } else {
            eps_values.emplace_back(std::nullopt);
        }
        for (const auto& eps : eps_values) {
            for (auto mcs : lattice(*spec.hdbscan_min_cluster_size)) {
                params.emplace_back(HdbscanParams{mcs, eps, HdbscanSelection::ExcessOfMass});
            }
        }
    }

    std::vector<ConfigTriple> out;
    out.reserve(spec.embeddings.size() * spec.views.size() * params.size());
    for (const auto& e : spec.embeddings) {
        for (auto v : spec.views) {
            for (const auto& p : params) out.push_back({e.name, v, p});
        }
    }
    return out;
}

std::string labels_digest(std::span<const int> labels) {
    std::string text;
    text.reserve(labels.size() * 3);
    for (int l : labels) {
        text += std::to_string(l);
        text.push_back(',');
    }
    return sha256_hex(text);
}

void MatrixSet::add(const std::string& embedding, ViewMode view, EmbeddingMatrix matrix) {
    auto ev = std::make_shared<EmbeddedView>();
    ev->distances = DistanceMatrix(matrix);
    ev->matrix = std::move(matrix);
    views_[{embedding, view}] = std::move(ev);
}

const EmbeddedView& MatrixSet::get(const std::string& embedding, ViewMode view) const {
    auto it = views_.find({embedding, view});
    if (it == views_.end()) {
        throw ArgumentError(kModule, "no matrix for embedding '" + embedding + "' view " + std::string(to_string(view)));
    }
    return *it->second;
}

bool MatrixSet::contains(const std::string& embedding, ViewMode view) const {
    return views_.contains({embedding, view});
}

ConfigReport evaluate(const ConfigTriple& triple, const MatrixSet& matrices, std::uint64_t global_seed) {
    const auto& ev = matrices.get(triple.embedding, triple.view);
    ConfigReport report;
    report.triple = triple;
    report.seed = mix_seed(global_seed, triple_key(triple));
    const ClusterParams params{triple.params, report.seed};

    if (const auto* km = std::get_if<KMeansParams>(&triple.params); km && km->k > ev.matrix.rows()) {
        report.metrics.reason = fmt::format("k = {} exceeds the number of invariants {}", km->k, ev.matrix.rows());
        report.metrics.failed_criteria = {Criterion::C1, Criterion::C2, Criterion::C3};
        return report;
    }
    const auto first = run_clustering(ev.matrix, ev.distances, params);
    const auto second = run_clustering(ev.matrix, ev.distances, params);
    report.assignment_digest = labels_digest(first.labels);
    report.rerun_digest = labels_digest(second.labels);

    report.metrics = measure(ev.matrix, ev.distances, first);
    const auto rerun = measure(ev.matrix, ev.distances, second);
    const auto verdict = admissibility(report.metrics, rerun);
    report.metrics.admissible = verdict.admissible;
    report.metrics.failed_criteria = verdict.failed;
    return report;
}

ConfigReport ReportCache::evaluate(const ConfigTriple& triple, const MatrixSet& matrices, std::uint64_t global_seed) {
    const std::string key = fmt::format("{}#{}", triple_digest(triple), global_seed);
    {
        std::lock_guard lock(mutex_);
        if (auto it = reports_.find(key); it != reports_.end()) return it->second;
    }
    ConfigReport report = revinv::evaluate(triple, matrices, global_seed);
    std::lock_guard lock(mutex_);
    return reports_.emplace(key, std::move(report)).first->second;
}

std::size_t ReportCache::size() const {
    std::lock_guard lock(mutex_);
    return reports_.size();
}

std::vector<ConfigReport> evaluate_all(std::span<const ConfigTriple> triples, const MatrixSet& matrices,
                                       std::uint64_t global_seed, std::size_t workers, ReportCache* cache) {
    std::vector<ConfigReport> out(triples.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= triples.size()) return;
            try {
                out[i] = cache ? cache->evaluate(triples[i], matrices, global_seed)
                               : evaluate(triples[i], matrices, global_seed);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = triples.size();
                return;
            }
        }
    };

    workers = std::max<std::size_t>(1, std::min(workers, triples.size()));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

bool ranks_before(const ConfigReport& a, const ConfigReport& b) {
    const auto& ma = a.metrics;
    const auto& mb = b.metrics;
    const double sa = round_half_even(ma.s_dbw.value_or(INFINITY), 2);
    const double sb = round_half_even(mb.s_dbw.value_or(INFINITY), 2);
    if (sa != sb) return sa < sb;
    const double ha = round_half_even(ma.silhouette.value_or(-INFINITY), 2);
    const double hb = round_half_even(mb.silhouette.value_or(-INFINITY), 2);
    if (ha != hb) return ha > hb;
    const double ca = round_half_even(ma.coverage_percent, 2);
    const double cb = round_half_even(mb.coverage_percent, 2);
    if (ca != cb) return ca > cb;
    if (ma.n_clusters != mb.n_clusters) return ma.n_clusters < mb.n_clusters;
    return triple_key(a.triple) < triple_key(b.triple);
}

Selection select_best(std::span<const ConfigReport> reports) {
    Selection sel;
    for (const auto& r : reports) {
        if (r.metrics.admissible) sel.ranking.push_back(r);
    }
    if (sel.ranking.empty()) {
        throw EmptySelectionError(kModule, "no admissible configuration; widen the grid");
    }
    std::sort(sel.ranking.begin(), sel.ranking.end(), ranks_before);
    sel.best = sel.ranking.front();
    return sel;
}

namespace {

ojson optional_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

}  // namespace

ojson report_to_json(const ConfigReport& r) {
    ojson j;
    j["embedding"] = r.triple.embedding;
    j["view"] = std::string(to_string(r.triple.view));
    j["algorithm"] = algorithm_name(r.triple.params);
    j["params"] = params_text(r.triple.params);
    j["triple_digest"] = triple_digest(r.triple);
    j["seed"] = r.seed;
    ojson m;
    m["silhouette"] = optional_number(r.metrics.silhouette);
    m["s_dbw"] = optional_number(r.metrics.s_dbw);
    m["coverage_percent"] = r.metrics.coverage_percent;
    m["n_clusters"] = r.metrics.n_clusters;
    m["admissible"] = r.metrics.admissible;
    m["failed_criteria"] = ojson::array();
    for (auto c : r.metrics.failed_criteria) m["failed_criteria"].push_back(std::string(to_string(c)));
    if (r.metrics.reason) m["reason"] = *r.metrics.reason;
    j["metrics"] = std::move(m);
    j["assignment_digest"] = r.assignment_digest;
    j["rerun_digest"] = r.rerun_digest;
    return j;
}

void write_summary_csv(std::ostream& out, std::span<const ConfigReport> reports) {
    std::vector<ConfigReport> admissible;
    for (const auto& r : reports) {
        if (r.metrics.admissible) admissible.push_back(r);
    }
    std::sort(admissible.begin(), admissible.end(), ranks_before);

    out << "embedding,algorithm,view,silhouette,s_dbw,n_clusters,coverage,params\n";
    std::set<std::string> seen;
    for (const auto& r : admissible) {
        const std::string group =
            fmt::format("{}|{}|{}", r.triple.embedding, algorithm_name(r.triple.params), to_string(r.triple.view));
        if (!seen.insert(group).second) continue;
        out << fmt::format("{},{},{},{:.4f},{:.4f},{},{:.2f},\"{}\"\n", r.triple.embedding,
                           algorithm_name(r.triple.params), to_string(r.triple.view), *r.metrics.silhouette,
                           *r.metrics.s_dbw, r.metrics.n_clusters, r.metrics.coverage_percent,
                           params_text(r.triple.params));
    }
}

}  // namespace revinv
