#pragma once

#include "revinv/corpus.hpp"
#include "revinv/extract.hpp"
#include "revinv/report.hpp"
#include "revinv/search.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace revinv {

struct IngestResult {
    std::vector<TransactionRecord> records;
    std::vector<Classification> classifications;  // aligned with records
    CorpusStatistics statistics;
    std::vector<Occurrence> occurrences;  // one per invariant-class record
};

/// Classify every record and turn extracted guards into normalized
/// occurrences. A guard whose predicate normalizes to nothing is counted as
/// an extraction failure. The revert message comes from the source when the
/// guard carries one, else from the record.
IngestResult ingest(std::vector<TransactionRecord> records, const SourceCatalog& sources);

nlohmann::ordered_json statistics_to_json(const CorpusStatistics& stats);

/// One embedding matrix per (embedding, view) named in the grid. Tf-idf is
/// fit on the views; external files must cover exactly the invariant ids.
MatrixSet build_matrices(const GridSpec& grid, std::span<const InvariantRecord> invariants);

struct SearchOutcome {
    std::vector<ConfigReport> reports;  // enumeration order
    std::optional<Selection> selection;
};

SearchOutcome run_search(const GridSpec& grid, const MatrixSet& matrices, std::size_t workers = 1);

/// Cluster the winning triple again and describe it.
struct ReportArtifacts {
    ClusterAssignment assignment;
    std::vector<ClusterSummary> clusters;
    Projection2D projection;
};
ReportArtifacts build_report(const ConfigReport& best, const MatrixSet& matrices,
                             std::span<const InvariantRecord> invariants);

struct PipelineOptions {
    std::filesystem::path corpus;
    std::filesystem::path sources;
    std::optional<std::filesystem::path> grid;  // defaults to the full lattice on tf-idf
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;            // overrides the grid seed
    std::optional<std::vector<ViewMode>> views;   // overrides the grid views
    std::size_t workers = 1;
};

struct PipelineResult {
    int exit_code = 0;  // 0 ok, 2 no admissible configuration
    std::size_t n_invariants = 0;
    std::size_t n_reports = 0;
    std::optional<ConfigReport> best;
};

/// ingest -> extract -> embed -> search -> select -> report. Writes
/// stats.json, invariants.jsonl, reports.jsonl, summary.csv and, when a
/// configuration is admissible, selection.json, clusters.json and pca.csv.
/// Input problems surface as revinv::Error.
PipelineResult run_pipeline(const PipelineOptions& options);

/// Write text to a file in binary mode, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace revinv
