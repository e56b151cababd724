#include "revinv/clustering.hpp"
#include "revinv/corpus.hpp"
#include "revinv/embedding.hpp"
#include "revinv/error.hpp"
#include "revinv/extract.hpp"
#include "revinv/fuzz.hpp"
#include "revinv/metrics.hpp"
#include "revinv/pipeline.hpp"
#include "revinv/report.hpp"
#include "revinv/search.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fmt/format.h>

namespace py = pybind11;
using namespace revinv;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

EmbeddingMatrix to_matrix(const Array& x) {
    if (x.ndim() != 2) throw ArgumentError("python", "expected a 2-D array");
    const auto n = static_cast<std::size_t>(x.shape(0));
    const auto d = static_cast<std::size_t>(x.shape(1));
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = fmt::format("r{}", i);
    std::vector<double> values(x.data(), x.data() + n * d);
    return EmbeddingMatrix::normalized(std::move(ids), d, std::move(values), EmbeddingSource::tfidf());
}

Array to_array(const EmbeddingMatrix& m) {
    Array out({m.rows(), m.cols()});
    std::copy(m.values().begin(), m.values().end(), out.mutable_data());
    return out;
}

SourceLanguage parse_language(const std::string& name) {
    if (name == "solidity") return SourceLanguage::Solidity;
    if (name == "vyper") return SourceLanguage::Vyper;
    throw ArgumentError("python", "language must be 'solidity' or 'vyper'");
}

py::object json_to_py(const nlohmann::ordered_json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of revinv";

    py::register_exception<Error>(m, "RevinvError", PyExc_ValueError);

    m.def("normalize", [](const std::string& s) { return normalize(s); });
    m.def("normalize_message", [](const std::string& s) { return normalize_message(s); });
    m.def("invariant_id", [](const std::string& s) { return invariant_id(s); });
    m.def(
        "extract",
        [](const std::string& source, std::size_t line, const std::string& language) {
            const auto e = extract_predicate(source, line, parse_language(language));
            py::dict d;
            d["predicate"] = e.predicate;
            d["message"] = e.message;
            d["kind"] = std::string(to_string(e.kind));
            return d;
        },
        py::arg("source"), py::arg("line"), py::arg("language") = "solidity");

    m.def("tokenize", [](const std::string& s) { return tokenize(s).tokens; });
    m.def("tfidf", [](const std::vector<std::string>& texts) {
        std::vector<InvariantView> views;
        for (std::size_t i = 0; i < texts.size(); ++i) views.push_back({fmt::format("v{}", i), ViewMode::PredicateOnly, texts[i]});
        return to_array(tfidf_embed(views));
    });
    m.def("cosine_distances", [](const Array& x) {
        const DistanceMatrix dm(to_matrix(x));
        Array out({dm.size(), dm.size()});
        for (std::size_t i = 0; i < dm.size(); ++i) std::copy(dm.row(i).begin(), dm.row(i).end(), out.mutable_data() + i * dm.size());
        return out;
    });

    m.def(
        "kmeans", [](const Array& x, std::size_t k, std::uint64_t seed) { return kmeans(to_matrix(x), k, seed).labels; },
        py::arg("x"), py::arg("k"), py::arg("seed") = 0);
    m.def(
        "dbscan",
        [](const Array& x, double eps, std::size_t min_samples) { return dbscan(to_matrix(x), eps, min_samples).labels; },
        py::arg("x"), py::arg("eps"), py::arg("min_samples"));
    m.def(
        "hdbscan",
        [](const Array& x, std::size_t min_cluster_size, std::optional<double> selection_eps, const std::string& method) {
            HdbscanSelection sel;
            if (method == "eom") sel = HdbscanSelection::ExcessOfMass;
            else if (method == "leaf") sel = HdbscanSelection::Leaf;
            else throw ArgumentError("python", "cluster_selection_method must be 'eom' or 'leaf'");
            const auto mat = to_matrix(x);
            return hdbscan_run(DistanceMatrix(mat), HdbscanParams{min_cluster_size, selection_eps, sel}).assignment.labels;
        },
        py::arg("x"), py::arg("min_cluster_size"), py::arg("selection_eps") = std::nullopt,
        py::arg("cluster_selection_method") = "eom");

    m.def("silhouette", [](const Array& x, const std::vector<int>& labels) { return silhouette(to_matrix(x), labels); });
    m.def("s_dbw", [](const Array& x, const std::vector<int>& labels) { return s_dbw(to_matrix(x), labels); });
    m.def("coverage", [](const std::vector<int>& labels, std::size_t n) { return coverage(labels, n); });
    m.def("cochran_sample_size", &cochran_sample_size, py::arg("confidence") = 0.95, py::arg("margin") = 0.01,
          py::arg("p") = 0.5);

    m.def("pca_2d", [](const Array& x) {
        if (x.ndim() != 2) throw ArgumentError("python", "expected a 2-D array");
        const auto n = static_cast<std::size_t>(x.shape(0));
        const auto d = static_cast<std::size_t>(x.shape(1));
        const auto p = pca_2d(std::span<const double>(x.data(), n * d), n, d);
        py::dict out;
        out["x"] = p.x;
        out["y"] = p.y;
        out["explained"] = std::vector<double>(p.explained.begin(), p.explained.end());
        return out;
    });

    m.def(
        "fuzz",
        [](std::uint64_t seed, std::size_t runs, std::size_t max_len, bool patched) {
            fuzz::CampaignOptions opt{seed, runs, max_len, patched ? fuzz::Model::Patched : fuzz::Model::Vulnerable};
            return json_to_py(fuzz::verdict_to_json(fuzz::fuzz_campaign(opt), opt));
        },
        py::arg("seed") = 0, py::arg("runs") = 256, py::arg("max_len") = 10, py::arg("patched") = false);

    m.def(
        "run_pipeline",
        [](std::filesystem::path corpus, std::filesystem::path sources, std::filesystem::path out,
           std::optional<std::filesystem::path> grid, std::optional<std::uint64_t> seed, std::size_t workers) {
            PipelineOptions opt;
            opt.corpus = std::move(corpus);
            opt.sources = std::move(sources);
            opt.out = std::move(out);
            opt.grid = std::move(grid);
            opt.seed = seed;
            opt.workers = workers;
            PipelineResult r;
            {
                py::gil_scoped_release release;
                r = run_pipeline(opt);
            }
            py::dict d;
            d["exit_code"] = r.exit_code;
            d["n_invariants"] = r.n_invariants;
            d["n_reports"] = r.n_reports;
            d["best"] = r.best ? json_to_py(report_to_json(*r.best)) : py::none();
            return d;
        },
        py::arg("corpus"), py::arg("sources"), py::arg("out"), py::arg("grid") = std::nullopt,
        py::arg("seed") = std::nullopt, py::arg("workers") = 1);
}
