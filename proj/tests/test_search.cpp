#include "oracles/oracles.hpp"

#include "revinv/error.hpp"
#include "revinv/search.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace revinv;
using json = nlohmann::json;

namespace {

ConfigReport fake(const std::string& embedding, std::size_t k, double sdbw, double sil, double cov, std::size_t clusters,
                  bool admissible = true) {
    ConfigReport r;
    r.triple = {embedding, ViewMode::PredicateOnly, KMeansParams{k}};
    r.metrics.s_dbw = sdbw;
    r.metrics.silhouette = sil;
    r.metrics.coverage_percent = cov;
    r.metrics.n_clusters = clusters;
    r.metrics.admissible = admissible;
    return r;
}

MatrixSet blob_set(std::size_t n = 120) {
    MatrixSet set;
    set.add("tfidf", ViewMode::PredicateOnly, oracle::to_matrix(oracle::random_sphere_points(31, n, 12, 10, 0.03)));
    return set;
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("eps lattice") {
    const auto eps = lattice(RealRange{0.1, 5.0, 0.02});
    REQUIRE(eps.size() == 246);
    CHECK(eps.front() == 0.1);
    CHECK(eps[13] == 0.36);
    CHECK(eps.back() == 5.0);
    CHECK(lattice(RealRange{0.1, 1.0, 0.02}).size() == 46);
    CHECK(lattice(RealRange{0.1, 0.5, 0.1}) == std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5});
    CHECK(lattice(IntRange{8, 100, 1}).size() == 93);
    CHECK(lattice(IntRange{10, 15, 2}) == std::vector<std::size_t>{10, 12, 14});
}

TEST_CASE("default grid size") {
    const auto spec = GridSpec::paper_defaults();
    const auto triples = enumerate_grid(spec);
    CHECK(triples.size() == 93 + 246 * 6 + 46 * 6);
    CHECK(triple_key(triples.front()) == "tfidf|predicate|kmeans|k:8");
    CHECK(triple_key(triples[93]) == "tfidf|predicate|dbscan|eps:0.1,min_samples:10");
    CHECK(triple_key(triples.back()) == "tfidf|predicate|hdbscan|min_cluster_size:15,eps:1");

    auto two = spec;
    two.views = {ViewMode::PredicateOnly, ViewMode::PredicateWithMessage};
    CHECK(enumerate_grid(two).size() == 2 * triples.size());
}

TEST_CASE("grid validation") {
    GridSpec g;
    g.kmeans_k = IntRange{10, 8, 1};
    CHECK_THROWS_AS(validate(g), ArgumentError);
    g.kmeans_k = IntRange{8, 10, 0};
    CHECK_THROWS_AS(validate(g), ArgumentError);
    g = GridSpec{};
    g.dbscan_eps = RealRange{0.1, 0.2, 0.02};
    CHECK_THROWS_AS(validate(g), ArgumentError);
    g.dbscan_min_samples = IntRange{2, 3, 1};
    CHECK_NOTHROW(validate(g));
    g.dbscan_eps = RealRange{0.0, 0.2, 0.02};
    CHECK_THROWS_AS(validate(g), ArgumentError);
    g = GridSpec{};
    g.hdbscan_eps = RealRange{0.1, 0.2, 0.1};
    CHECK_THROWS_AS(validate(g), ArgumentError);
    g = GridSpec{};
    g.views.clear();
    CHECK_THROWS_AS(validate(g), ArgumentError);
}

TEST_CASE("manifest parsing") {
    const auto m = json::parse(R"({
        "seed": 5,
        "views": ["predicate", "message"],
        "embeddings": [{"name": "tfidf"},
                       {"name": "neural", "vectors": {"predicate": "p.vec", "message": "/abs/m.vec"}}],
        "kmeans": {"k": [8, 12], "k_step": 2},
        "dbscan": {"eps": [0.1, 0.3], "eps_step": 0.1, "min_samples": [2, 3]},
        "hdbscan": {"min_cluster_size": [2, 4]}
    })");
    const auto g = parse_grid(m, "/base");
    CHECK(g.seed == 5);
    CHECK(g.views.size() == 2);
    REQUIRE(g.embeddings.size() == 2);
    CHECK(g.embeddings[0].is_tfidf());
    CHECK(g.embeddings[1].vector_files.at(ViewMode::PredicateOnly) == std::filesystem::path("/base/p.vec"));
    CHECK(g.embeddings[1].vector_files.at(ViewMode::PredicateWithMessage) == std::filesystem::path("/abs/m.vec"));
    CHECK(enumerate_grid(g).size() == 2 * 2 * (3 + 3 * 2 + 3));

    const auto j = grid_to_json(g);
    CHECK(j["dbscan"]["lattice_size"] == 6);
    CHECK(j["hdbscan"]["lattice_size"] == 3);

    CHECK_THROWS_AS(parse_grid(json::parse(R"({"embeddings": [{"name": "neural"}]})")), ArgumentError);
    CHECK_THROWS_AS(parse_grid(json::parse(R"({"kmeans": {"k": [8]}})")), ArgumentError);
    CHECK_THROWS_AS(parse_grid(json::parse(R"({"kmeans": {"k": "x"}})")), ArgumentError);
    CHECK_THROWS_AS(parse_grid(json::parse(R"({"views": ["both"]})")), ArgumentError);
    CHECK_THROWS_AS(load_grid("/nonexistent/grid.json"), ArgumentError);
}

TEST_CASE("digests") {
    const ConfigTriple a{"tfidf", ViewMode::PredicateOnly, DbscanParams{0.36, 15}};
    auto b = a;
    b.view = ViewMode::PredicateWithMessage;
    CHECK(triple_digest(a) == triple_digest(a));
    CHECK(triple_digest(a) != triple_digest(b));
    CHECK(triple_digest(a).size() == 64);
    CHECK(labels_digest(std::vector<int>{0, -1}) != labels_digest(std::vector<int>{-1, 0}));
    CHECK(labels_digest(std::vector<int>{1, 2}) != labels_digest(std::vector<int>{12}));
}

TEST_CASE("evaluate is reproducible and applies the criteria") {
    const auto set = blob_set();
    const ConfigTriple t{"tfidf", ViewMode::PredicateOnly, KMeansParams{10}};
    const auto r1 = evaluate(t, set, 7);
    const auto r2 = evaluate(t, set, 7);
    CHECK(r1.assignment_digest == r2.assignment_digest);
    CHECK(r1.assignment_digest == r1.rerun_digest);
    CHECK(r1.metrics == r2.metrics);
    CHECK(r1.metrics.coverage_percent == 100.0);
    CHECK(r1.metrics.admissible == r1.metrics.failed_criteria.empty());

    const auto small = evaluate({"tfidf", ViewMode::PredicateOnly, KMeansParams{4}}, set, 7);
    CHECK_FALSE(small.metrics.admissible);
    CHECK(small.metrics.failed_criteria.front() == Criterion::C1);

    const auto big = evaluate({"tfidf", ViewMode::PredicateOnly, KMeansParams{500}}, set, 7);
    CHECK_FALSE(big.metrics.admissible);
    CHECK(big.metrics.reason);

    const auto noise = evaluate({"tfidf", ViewMode::PredicateOnly, DbscanParams{1e-6, 5}}, set, 7);
    CHECK_FALSE(noise.metrics.admissible);
    CHECK_FALSE(noise.metrics.silhouette);

    CHECK_THROWS_AS(evaluate({"other", ViewMode::PredicateOnly, KMeansParams{10}}, set, 7), ArgumentError);
    CHECK(report_to_json(r1)["metrics"]["n_clusters"] == r1.metrics.n_clusters);
}

TEST_CASE("parallel evaluation matches serial") {
    const auto set = blob_set();
    GridSpec g;
    g.kmeans_k = IntRange{8, 12, 1};
    g.dbscan_eps = RealRange{0.01, 0.05, 0.02};
    g.dbscan_min_samples = IntRange{2, 3, 1};
    g.hdbscan_min_cluster_size = IntRange{3, 4, 1};
    const auto triples = enumerate_grid(g);
    const auto serial = evaluate_all(triples, set, 3, 1);
    ReportCache cache;
    const auto parallel = evaluate_all(triples, set, 3, 4, &cache);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].triple == parallel[i].triple);
        CHECK(serial[i].assignment_digest == parallel[i].assignment_digest);
        CHECK(serial[i].metrics == parallel[i].metrics);
    }
    CHECK(cache.size() == triples.size());
    const auto again = evaluate_all(triples, set, 3, 2, &cache);
    CHECK(again.size() == triples.size());
    CHECK(cache.size() == triples.size());
}

TEST_CASE("selection order") {
    const std::vector<ConfigReport> reports{
        fake("a", 8, 0.30, 0.5, 60, 10),
        fake("b", 8, 0.204, 0.4, 60, 10),
        fake("c", 8, 0.196, 0.6, 60, 12),
        fake("d", 8, 0.196, 0.6, 70, 12),
        fake("e", 8, 0.196, 0.6, 70, 11),
        fake("f", 8, 0.01, 0.9, 90, 10, false),
    };
    const auto sel = select_best(reports);
    REQUIRE(sel.ranking.size() == 5);
    CHECK(sel.best.triple.embedding == "e");
    CHECK(sel.ranking[1].triple.embedding == "d");
    CHECK(sel.ranking[2].triple.embedding == "c");
    CHECK(sel.ranking[3].triple.embedding == "b");
    CHECK(sel.ranking[4].triple.embedding == "a");

    std::vector<ConfigReport> tie{fake("y", 8, 0.2, 0.5, 60, 10), fake("x", 8, 0.2, 0.5, 60, 10)};
    CHECK(select_best(tie).best.triple.embedding == "x");

    const std::vector<ConfigReport> none{fake("a", 8, 0.3, 0.5, 60, 10, false)};
    CHECK_THROWS_AS(select_best(none), EmptySelectionError);
}

TEST_CASE("summary csv keeps the best per group") {
    std::vector<ConfigReport> reports{fake("a", 8, 0.3, 0.5, 60, 10), fake("a", 9, 0.2, 0.5, 60, 10),
                                      fake("b", 8, 0.25, 0.5, 60, 10), fake("c", 8, 0.1, 0.5, 60, 10, false)};
    std::ostringstream out;
    write_summary_csv(out, reports);
    CHECK(out.str() ==
          "embedding,algorithm,view,silhouette,s_dbw,n_clusters,coverage,params\n"
          "a,kmeans,predicate,0.5000,0.2000,10,60.00,\"k:9\"\n"
          "b,kmeans,predicate,0.5000,0.2500,10,60.00,\"k:8\"\n");
}

}
