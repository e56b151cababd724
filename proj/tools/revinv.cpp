// Command-line front end for the revert-invariant mining pipeline.

#include "revinv/corpus.hpp"
#include "revinv/error.hpp"
#include "revinv/fuzz.hpp"
#include "revinv/metrics.hpp"
#include "revinv/pipeline.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace revinv;
using ojson = nlohmann::ordered_json;

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::string views;
};

std::vector<ViewMode> parse_views(const std::string& text) {
    if (text == "both") return {ViewMode::PredicateOnly, ViewMode::PredicateWithMessage};
    return {parse_view_mode(text)};
}

void emit(const Globals& g, const std::string& name, const std::string& text) {
    write_text(std::filesystem::path(g.out) / name, text);
    std::cerr << "wrote " << (std::filesystem::path(g.out) / name).string() << "\n";
}

EmbeddingMatrix embed_for(const std::vector<InvariantRecord>& invariants, ViewMode view,
                          const std::string& vectors) {
    if (vectors.empty()) return tfidf_embed(build_views(invariants, view));
    std::vector<std::string> ids;
    for (const auto& r : invariants) ids.push_back(r.id);
    return load_external_vectors(vectors, ids);
}

AlgorithmParams cluster_params(const std::string& algorithm, std::size_t k, double eps, std::size_t min_samples,
                               std::size_t min_cluster_size, std::optional<double> selection_eps, bool leaf) {
    if (algorithm == "kmeans") return KMeansParams{k};
    if (algorithm == "dbscan") return DbscanParams{eps, min_samples};
    if (algorithm == "hdbscan") {
        return HdbscanParams{min_cluster_size, selection_eps,
                             leaf ? HdbscanSelection::Leaf : HdbscanSelection::ExcessOfMass};
    }
    throw ArgumentError("cli", "unknown algorithm '" + algorithm + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mine, cluster and report revert invariants from failed transactions"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Global seed (overrides the grid manifest)");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--views", g.views, "predicate, message or both")
        ->check(CLI::IsMember({"predicate", "message", "both"}));

    std::string corpus, sources, grid, invariants_path, vectors, view_name = "predicate";
    std::size_t workers = 1;

    auto* ingest_cmd = app.add_subcommand("ingest", "Classify failed transactions and print corpus statistics");
    ingest_cmd->add_option("--corpus", corpus)->required();
    ingest_cmd->add_option("--sources", sources)->required();

    auto* extract_cmd = app.add_subcommand("extract", "Extract, normalize and deduplicate invariants");
    extract_cmd->add_option("--corpus", corpus)->required();
    extract_cmd->add_option("--sources", sources)->required();

    auto* embed_cmd = app.add_subcommand("embed", "Write tf-idf vectors for one view");
    embed_cmd->add_option("--invariants", invariants_path)->required();
    embed_cmd->add_option("--view", view_name)->check(CLI::IsMember({"predicate", "message"}));

    PairOptions pair_opts;
    auto* pairs_cmd = app.add_subcommand("pairs", "Generate contrastive training pairs");
    pairs_cmd->add_option("--invariants", invariants_path)->required();
    pairs_cmd->add_option("--vectors", vectors, "External vector file (default: tf-idf)");
    pairs_cmd->add_option("--view", view_name)->check(CLI::IsMember({"predicate", "message"}));
    pairs_cmd->add_option("--positive", pair_opts.positive_threshold);
    pairs_cmd->add_option("--negative", pair_opts.negative_threshold);
    pairs_cmd->add_option("--cap", pair_opts.cap);

    std::string algorithm = "hdbscan";
    std::size_t k = 8, min_samples = 10, min_cluster_size = 10;
    double eps = 0.5;
    std::optional<double> selection_eps;
    bool leaf = false;
    auto* cluster_cmd = app.add_subcommand("cluster", "Cluster invariants with one configuration");
    cluster_cmd->add_option("--invariants", invariants_path)->required();
    cluster_cmd->add_option("--vectors", vectors);
    cluster_cmd->add_option("--view", view_name)->check(CLI::IsMember({"predicate", "message"}));
    cluster_cmd->add_option("--algorithm", algorithm)->check(CLI::IsMember({"kmeans", "dbscan", "hdbscan"}));
    cluster_cmd->add_option("--k", k);
    cluster_cmd->add_option("--eps", eps);
    cluster_cmd->add_option("--min-samples", min_samples);
    cluster_cmd->add_option("--min-cluster-size", min_cluster_size);
    cluster_cmd->add_option("--selection-eps", selection_eps);
    cluster_cmd->add_flag("--leaf", leaf);

    auto* search_cmd = app.add_subcommand("search", "Grid search over embeddings, views and algorithms");
    search_cmd->add_option("--invariants", invariants_path)->required();
    search_cmd->add_option("--grid", grid);
    search_cmd->add_option("--workers", workers);

    std::string selection_path;
    auto* report_cmd = app.add_subcommand("report", "Cluster summaries and PCA for a selected configuration");
    report_cmd->add_option("--invariants", invariants_path)->required();
    report_cmd->add_option("--grid", grid);
    report_cmd->add_option("--selection", selection_path)->required();

    fuzz::CampaignOptions fuzz_opts;
    bool patched = false;
    std::size_t exhaustive = 0;
    auto* fuzz_cmd = app.add_subcommand("fuzz", "Fuzz the bridge-upgrade model against its oracle");
    fuzz_cmd->add_option("--runs", fuzz_opts.runs);
    fuzz_cmd->add_option("--max-len", fuzz_opts.max_len);
    fuzz_cmd->add_flag("--patched", patched);
    fuzz_cmd->add_option("--exhaustive", exhaustive, "Also enumerate all sequences up to this length");

    double confidence = 0.95, margin = 0.01, proportion = 0.5;
    auto* sample_cmd = app.add_subcommand("sample-size", "Cochran sample size");
    sample_cmd->add_option("--confidence", confidence);
    sample_cmd->add_option("--margin", margin);
    sample_cmd->add_option("--p", proportion);

    auto* mine_cmd = app.add_subcommand("mine", "Run the full pipeline");
    mine_cmd->add_option("--corpus", corpus)->required();
    mine_cmd->add_option("--sources", sources)->required();
    mine_cmd->add_option("--grid", grid);
    mine_cmd->add_option("--workers", workers);

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const std::uint64_t seed = g.seed.value_or(0);
        auto load_grid_or_default = [&]() {
            GridSpec spec = grid.empty() ? GridSpec::paper_defaults() : load_grid(grid);
            if (g.seed) spec.seed = *g.seed;
            if (!g.views.empty()) spec.views = parse_views(g.views);
            validate(spec);
            return spec;
        };

        if (*ingest_cmd || *extract_cmd) {
            auto ingested = ingest(load_corpus(corpus), SourceCatalog::load(sources));
            const auto invariants = deduplicate(ingested.occurrences);
            ojson stats = statistics_to_json(ingested.statistics);
            stats["unique_invariants"] = invariants.size();
            if (*extract_cmd) {
                std::ostringstream s;
                write_invariants(s, invariants);
                emit(g, "invariants.jsonl", s.str());
                emit(g, "stats.json", stats.dump(2) + "\n");
            } else {
                std::cout << stats.dump(2) << "\n";
            }
            return 0;
        }

        if (*embed_cmd) {
            const auto invariants = read_invariants(std::filesystem::path(invariants_path));
            const auto view = parse_view_mode(view_name);
            std::ostringstream s;
            write_vectors(s, tfidf_embed(build_views(invariants, view)));
            emit(g, fmt::format("tfidf_{}.vec", to_string(view)), s.str());
            return 0;
        }

        if (*pairs_cmd) {
            const auto invariants = read_invariants(std::filesystem::path(invariants_path));
            pair_opts.seed = seed;
            const auto matrix = embed_for(invariants, parse_view_mode(view_name), vectors);
            const auto pairs = generate_contrastive_pairs(matrix, pair_opts);
            if (pairs.warning) std::cerr << "warning: " << *pairs.warning << "\n";
            std::ostringstream s;
            write_pairs(s, pairs, pair_opts);
            emit(g, "pairs.jsonl", s.str());
            return 0;
        }

        if (*cluster_cmd) {
            const auto invariants = read_invariants(std::filesystem::path(invariants_path));
            const auto matrix = embed_for(invariants, parse_view_mode(view_name), vectors);
            const DistanceMatrix distances(matrix);
            const ClusterParams params{
                cluster_params(algorithm, k, eps, min_samples, min_cluster_size, selection_eps, leaf), seed};
            validate(params);
            const auto first = run_clustering(matrix, distances, params);
            const auto second = run_clustering(matrix, distances, params);
            auto metrics = measure(matrix, distances, first);
            const auto verdict = admissibility(metrics, measure(matrix, distances, second));
            metrics.admissible = verdict.admissible;
            metrics.failed_criteria = verdict.failed;
            ConfigReport r{{matrix.source().name, parse_view_mode(view_name), params.algorithm},
                           seed, metrics, labels_digest(first.labels), labels_digest(second.labels)};
            ojson j = report_to_json(r);
            j["labels"] = ojson::array();
            for (std::size_t i = 0; i < first.labels.size(); ++i) {
                j["labels"].push_back({{"id", matrix.ids()[i]}, {"label", first.labels[i]}});
            }
            emit(g, "cluster.json", j.dump(2) + "\n");
            return 0;
        }

        if (*search_cmd) {
            const auto spec = load_grid_or_default();
            const auto invariants = read_invariants(std::filesystem::path(invariants_path));
            const auto matrices = build_matrices(spec, invariants);
            const auto result = run_search(spec, matrices, workers);
            std::string lines;
            for (const auto& r : result.reports) lines += report_to_json(r).dump() + "\n";
            emit(g, "reports.jsonl", lines);
            std::ostringstream csv;
            write_summary_csv(csv, result.reports);
            emit(g, "summary.csv", csv.str());
            if (!result.selection) {
                std::cerr << "search: no admissible configuration; widen the grid\n";
                return 2;
            }
            ojson sel;
            sel["best"] = report_to_json(result.selection->best);
            sel["evaluated"] = result.reports.size();
            sel["admissible"] = result.selection->ranking.size();
            sel["grid"] = grid_to_json(spec);
            emit(g, "selection.json", sel.dump(2) + "\n");
            return 0;
        }

        if (*report_cmd) {
            const auto invariants = read_invariants(std::filesystem::path(invariants_path));
            std::ifstream in(selection_path);
            if (!in) throw ArgumentError("cli", "cannot open " + selection_path);
            const auto sel = nlohmann::json::parse(in).at("best");
            GridSpec spec = load_grid_or_default();
            const auto view = parse_view_mode(sel.at("view").get<std::string>());
            spec.views = {view};
            std::erase_if(spec.embeddings, [&](const EmbeddingSpec& e) { return e.name != sel.at("embedding"); });
            if (spec.embeddings.empty()) throw ArgumentError("cli", "selected embedding is not in the grid");
            const auto matrices = build_matrices(spec, invariants);
            // Look the triple up among the grid's own triples by digest.
            std::optional<ConfigTriple> triple;
            for (const auto& t : enumerate_grid(spec)) {
                if (triple_digest(t) == sel.at("triple_digest").get<std::string>()) triple = t;
            }
            if (!triple) throw ArgumentError("cli", "selected configuration is not in the grid");
            const auto best = evaluate(*triple, matrices, spec.seed);
            const auto report = build_report(best, matrices, invariants);
            emit(g, "clusters.json", clusters_to_json(report.clusters, invariants).dump(2) + "\n");
            std::ostringstream pca;
            write_pca_csv(pca, report.projection, matrices.get(triple->embedding, view).matrix.ids(),
                          report.assignment.labels);
            emit(g, "pca.csv", pca.str());
            return 0;
        }

        if (*fuzz_cmd) {
            fuzz_opts.seed = seed;
            fuzz_opts.model = patched ? fuzz::Model::Patched : fuzz::Model::Vulnerable;
            const auto verdict = fuzz::fuzz_campaign(fuzz_opts);
            ojson j = fuzz::verdict_to_json(verdict, fuzz_opts);
            if (exhaustive > 0) {
                const auto ex = fuzz::exhaustive_check(exhaustive, fuzz_opts.model);
                j["exhaustive"] = {{"max_len", exhaustive},
                                   {"sequences", ex.sequences},
                                   {"verdict", ex.counterexample ? "FAIL" : "PASS"}};
            }
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*sample_cmd) {
            std::cout << cochran_sample_size(confidence, margin, proportion) << "\n";
            return 0;
        }

        if (*mine_cmd) {
            PipelineOptions opts;
            opts.corpus = corpus;
            opts.sources = sources;
            if (!grid.empty()) opts.grid = grid;
            opts.out = g.out;
            opts.seed = g.seed;
            if (!g.views.empty()) opts.views = parse_views(g.views);
            opts.workers = workers;
            const auto result = run_pipeline(opts);
            if (result.exit_code == 2) {
                std::cerr << "mine: no admissible configuration among " << result.n_reports
                          << " reports; widen the grid\n";
                return 2;
            }
            std::cerr << fmt::format("mine: {} invariants, {} reports, best {}\n", result.n_invariants,
                                     result.n_reports, triple_key(result.best->triple));
            return 0;
        }
    } catch (const EmptySelectionError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "cli: " << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "cli: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
