#include "oracles/oracles.hpp"

#include "revinv/error.hpp"
#include "revinv/metrics.hpp"

#include <doctest.h>

#include <random>

using namespace revinv;

namespace {

std::vector<int> random_labels(std::uint64_t seed, std::size_t n, int k, double noise) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<int> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = u(gen) < noise ? kNoise : static_cast<int>(gen() % static_cast<unsigned>(k));
    // Make sure at least two clusters exist.
    l[0] = 0;
    l[1] = 1;
    return l;
}

MetricsReport report(std::size_t clusters, double coverage, double sil, double sdbw) {
    MetricsReport r;
    r.n_clusters = clusters;
    r.coverage_percent = coverage;
    r.silhouette = sil;
    r.s_dbw = sdbw;
    return r;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("silhouette and S_Dbw agree with brute force") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        CAPTURE(seed);
        const auto pts = oracle::random_sphere_points(seed, 70, 6, 1 + seed % 6, 0.1 + 0.05 * static_cast<double>(seed % 3));
        const auto m = oracle::to_matrix(pts);
        const auto labels = random_labels(seed * 7, 70, 2 + static_cast<int>(seed % 5), seed % 2 ? 0.2 : 0.0);
        CHECK(silhouette(m, labels) == doctest::Approx(oracle::silhouette(pts, labels)).epsilon(1e-9));
        CHECK(s_dbw(m, labels) == doctest::Approx(oracle::s_dbw(pts, labels)).epsilon(1e-9));
    }
}

TEST_CASE("silhouette on blob labels is high") {
    const auto pts = oracle::random_sphere_points(9, 60, 10, 3, 0.02);
    std::vector<int> truth(60);
    for (std::size_t i = 0; i < 60; ++i) truth[i] = static_cast<int>(i % 3);
    const auto m = oracle::to_matrix(pts);
    CHECK(silhouette(m, truth) > 0.9);
    const auto terms = s_dbw_terms(m, truth);
    CHECK(terms.scatter > 0.0);
    CHECK(terms.scatter < 0.1);
    CHECK(terms.density >= 0.0);
    CHECK(terms.total() == doctest::Approx(s_dbw(m, truth)));
}

TEST_CASE("undefined metrics") {
    const auto pts = oracle::random_sphere_points(1, 10, 3, 2, 0.1);
    const auto m = oracle::to_matrix(pts);
    const std::vector<int> one(10, 0);
    std::vector<int> noise_and_one(10, kNoise);
    noise_and_one[3] = 0;
    CHECK_THROWS_AS(silhouette(m, one), UndefinedMetricError);
    CHECK_THROWS_AS(s_dbw(m, one), UndefinedMetricError);
    CHECK_THROWS_AS(silhouette(m, noise_and_one), UndefinedMetricError);
    CHECK_THROWS_AS(silhouette(m, std::vector<int>(3, 0)), ArgumentError);

    // Coincident points in two clusters: zero total scatter.
    const auto same = EmbeddingMatrix::normalized({"a", "b", "c", "d"}, 2, {1, 0, 1, 0, 1, 0, 1, 0},
                                                  EmbeddingSource::tfidf());
    CHECK_THROWS_AS(s_dbw(same, std::vector<int>{0, 0, 1, 1}), UndefinedMetricError);

    // Members summing to zero leave the centroid undefined.
    const auto opposite = EmbeddingMatrix::normalized({"a", "b", "c", "d"}, 2, {1, 0, -1, 0, 0, 1, 0, 1},
                                                      EmbeddingSource::tfidf());
    CHECK_THROWS_AS(s_dbw(opposite, std::vector<int>{0, 0, 1, 1}), UndefinedMetricError);

    const DistanceMatrix dist(m);
    ClusterAssignment a;
    a.labels = one;
    a.n_clusters = 1;
    const auto r = measure(m, dist, a);
    CHECK_FALSE(r.silhouette);
    CHECK_FALSE(r.s_dbw);
    CHECK(r.reason);
    CHECK(r.coverage_percent == 100.0);
}

TEST_CASE("singletons score zero") {
    const auto m = EmbeddingMatrix::normalized({"a", "b", "c"}, 2, {1, 0, 0.9, 0.1, 0, 1}, EmbeddingSource::tfidf());
    const std::vector<int> labels{0, 0, 1};
    const DistanceMatrix d(m);
    const double sa = (d(0, 2) - d(0, 1)) / std::max(d(0, 2), d(0, 1));
    const double sb = (d(1, 2) - d(0, 1)) / std::max(d(1, 2), d(0, 1));
    CHECK(silhouette(m, labels) == doctest::Approx((sa + sb + 0.0) / 3.0));
}

TEST_CASE("coverage") {
    CHECK(coverage(std::vector<int>(5, kNoise)) == 0.0);
    CHECK(coverage(std::vector<int>(5, 0)) == 100.0);
    std::vector<int> l(5000, kNoise);
    std::fill(l.begin(), l.begin() + 2593, 0);
    CHECK(coverage(l) == doctest::Approx(51.86));
    std::vector<int> third{0, kNoise, kNoise};
    CHECK(coverage(third) == doctest::Approx(33.33));
    CHECK_THROWS_AS(coverage(std::vector<int>{}), ArgumentError);
    CHECK_THROWS_AS(coverage(third, 4), ArgumentError);
}

TEST_CASE("admissibility criteria") {
    const auto good = report(10, 60.0, 0.5, 0.4);
    CHECK(admissibility(good, good).admissible);

    CHECK(admissibility(report(7, 60, 0.5, 0.4), report(7, 60, 0.5, 0.4)).failed == std::vector{Criterion::C1});
    CHECK(admissibility(report(8, 60, 0.5, 0.4), report(8, 60, 0.5, 0.4)).admissible);
    CHECK(admissibility(report(100, 60, 0.5, 0.4), report(100, 60, 0.5, 0.4)).admissible);
    CHECK(admissibility(report(101, 60, 0.5, 0.4), report(101, 60, 0.5, 0.4)).failed == std::vector{Criterion::C1});
    CHECK(admissibility(report(10, 49.99, 0.5, 0.4), report(10, 49.99, 0.5, 0.4)).failed ==
          std::vector{Criterion::C2});
    CHECK(admissibility(report(10, 50.0, 0.5, 0.4), report(10, 50.0, 0.5, 0.4)).admissible);

    // Differences below the rounding step are stable; across it they are not.
    CHECK(admissibility(report(10, 60, 0.501, 0.4), report(10, 60, 0.504, 0.4)).admissible);
    CHECK(admissibility(report(10, 60, 0.501, 0.4), report(10, 60, 0.506, 0.4)).failed ==
          std::vector{Criterion::C3});
    CHECK(admissibility(report(10, 60, 0.5, 0.4), report(10, 61, 0.5, 0.4)).failed == std::vector{Criterion::C3});

    auto undefined = good;
    undefined.silhouette.reset();
    CHECK(admissibility(undefined, undefined).failed == std::vector{Criterion::C3});
    CHECK(admissibility(report(2, 10, 0.5, 0.4), report(2, 10, 0.9, 0.4)).failed ==
          std::vector{Criterion::C1, Criterion::C2, Criterion::C3});
}

}
