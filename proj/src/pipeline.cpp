#include "revinv/pipeline.hpp"

#include "revinv/error.hpp"

#include <fstream>
#include <sstream>

namespace revinv {

namespace {

constexpr const char* kModule = "pipeline";

using ojson = nlohmann::ordered_json;

std::string dump_line(const ojson& j) { return j.dump() + "\n"; }

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError(kModule, "cannot write " + path.string());
    out << text;
    if (!out) throw ArgumentError(kModule, "write failed for " + path.string());
}

IngestResult ingest(std::vector<TransactionRecord> records, const SourceCatalog& sources) {
    IngestResult out;
    out.records = std::move(records);
    std::vector<FailureClass> classes;
    classes.reserve(out.records.size());
    for (const auto& r : out.records) {
        auto c = classify(r, sources);
        if (is_invariant_class(c.cls)) {
            try {
                Occurrence o;
                o.predicate = normalize(c.extraction->predicate);
                const auto& raw = c.extraction->message ? c.extraction->message : r.failure_message;
                if (raw) o.message = normalize_message(*raw);
                o.kind = c.extraction->kind;
                o.provenance = {r.hash, c.contract, r.failure_function.value_or(""), c.location->file,
                                c.location->line};
                out.occurrences.push_back(std::move(o));
            } catch (const DegenerateError&) {
                c.cls = FailureClass::ExtractionFailure;
            }
        }
        classes.push_back(c.cls);
        out.classifications.push_back(std::move(c));
    }
    out.statistics = corpus_statistics(classes);
    for (const auto& r : out.records) {
        if (out_of_gas_match(r) == OutOfGasMatch::Lowercase) ++out.statistics.out_of_gas_lowercase;
    }
    return out;
}

ojson statistics_to_json(const CorpusStatistics& stats) {
    ojson j;
    j["total"] = stats.total;
    j["classes"] = ojson::object();
    for (auto cls : kFailureClasses) {
        const auto& share = stats[cls];
        ojson e;
        e["count"] = share.count;
        e["percent"] = share.percent ? ojson(*share.percent) : ojson(nullptr);
        j["classes"][std::string(to_string(cls))] = std::move(e);
    }
    j["out_of_gas_lowercase"] = stats.out_of_gas_lowercase;
    return j;
}

MatrixSet build_matrices(const GridSpec& grid, std::span<const InvariantRecord> invariants) {
    MatrixSet set;
    std::vector<std::string> ids;
    ids.reserve(invariants.size());
    for (const auto& r : invariants) ids.push_back(r.id);
    for (const auto& e : grid.embeddings) {
        for (auto view : grid.views) {
            if (e.is_tfidf()) {
                set.add(e.name, view, tfidf_embed(build_views(invariants, view)));
                continue;
            }
            auto it = e.vector_files.find(view);
            if (it == e.vector_files.end()) {
                throw ArgumentError(kModule, "embedding '" + e.name + "' has no vector file for view " +
                                                 std::string(to_string(view)));
            }
            auto m = load_external_vectors(it->second, ids);
            set.add(e.name, view, std::move(m));
        }
    }
    return set;
}

SearchOutcome run_search(const GridSpec& grid, const MatrixSet& matrices, std::size_t workers) {
    SearchOutcome out;
    const auto triples = enumerate_grid(grid);
    out.reports = evaluate_all(triples, matrices, grid.seed, workers);
    try {
        out.selection = select_best(out.reports);
    } catch (const EmptySelectionError&) {
        out.selection.reset();
    }
    return out;
}

ReportArtifacts build_report(const ConfigReport& best, const MatrixSet& matrices,
                             std::span<const InvariantRecord> invariants) {
    const auto& ev = matrices.get(best.triple.embedding, best.triple.view);
    ReportArtifacts out;
    out.assignment = run_clustering(ev.matrix, ev.distances, ClusterParams{best.triple.params, best.seed});
    if (labels_digest(out.assignment.labels) != best.assignment_digest) {
        throw ContractViolation(kModule, "re-clustering the selected configuration changed its labels");
    }
    out.clusters = summarize_clusters(out.assignment, invariants, ev.matrix);
    out.projection = pca_2d(ev.matrix);
    return out;
}

PipelineResult run_pipeline(const PipelineOptions& options) {
    GridSpec grid = options.grid ? load_grid(*options.grid) : GridSpec::paper_defaults();
    if (options.seed) grid.seed = *options.seed;
    if (options.views) grid.views = *options.views;
    validate(grid);

    const auto catalog = SourceCatalog::load(options.sources);
    auto ingested = ingest(load_corpus(options.corpus), catalog);
    const auto invariants = deduplicate(ingested.occurrences);

    PipelineResult result;
    result.n_invariants = invariants.size();

    ojson stats = statistics_to_json(ingested.statistics);
    stats["unique_invariants"] = invariants.size();
    write_text(options.out / "stats.json", stats.dump(2) + "\n");
    {
        std::ostringstream s;
        write_invariants(s, invariants);
        write_text(options.out / "invariants.jsonl", s.str());
    }
    if (invariants.size() < 3) throw CorpusError(kModule, "fewer than 3 unique invariants to cluster");

    const auto matrices = build_matrices(grid, invariants);
    const auto search = run_search(grid, matrices, options.workers);
    result.n_reports = search.reports.size();
    {
        std::string text;
        for (const auto& r : search.reports) text += dump_line(report_to_json(r));
        write_text(options.out / "reports.jsonl", text);
        std::ostringstream csv;
        write_summary_csv(csv, search.reports);
        write_text(options.out / "summary.csv", csv.str());
    }
    if (!search.selection) {
        result.exit_code = 2;
        return result;
    }

    const auto& best = search.selection->best;
    result.best = best;
    ojson sel;
    sel["best"] = report_to_json(best);
    sel["evaluated"] = search.reports.size();
    sel["admissible"] = search.selection->ranking.size();
    sel["grid"] = grid_to_json(grid);
    write_text(options.out / "selection.json", sel.dump(2) + "\n");

    const auto report = build_report(best, matrices, invariants);
    write_text(options.out / "clusters.json", clusters_to_json(report.clusters, invariants).dump(2) + "\n");
    const auto& ids = matrices.get(best.triple.embedding, best.triple.view).matrix.ids();
    std::ostringstream pca;
    write_pca_csv(pca, report.projection, ids, report.assignment.labels);
    write_text(options.out / "pca.csv", pca.str());
    return result;
}

}  // namespace revinv
