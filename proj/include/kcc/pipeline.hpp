#pragma once

#include "kcc/admm.hpp"
#include "kcc/data_io.hpp"
#include "kcc/error.hpp"
#include "kcc/kernel.hpp"
#include "kcc/selection.hpp"
#include "kcc/weight_graph.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kcc {

enum class Backend { embedded, kernel_space };

std::string to_string(Backend backend);
Backend backend_from_string(const std::string& name);

/// Where the points come from: a CSV file or the ring-and-blobs generator.
struct InputSpec {
    std::optional<std::string> csv;
    bool has_header = true;
    std::optional<LabelColumn> label_column;
    std::optional<int> gen_blobs = 4;
};

struct RunConfig {
    InputSpec input;
    bool standardize = false;
    KernelSpec kernel = KernelSpec::gaussian(1.0);
    int knn = 6;
    double sigma2 = 100.0;
    AdmmConfig solver;
    Backend backend = Backend::embedded;
    std::optional<int> k_max;
    std::optional<int> manual_k;
    Linkage linkage = Linkage::single;
    std::uint64_t seed = 1;
    std::string output_dir = "kcc_out";
    bool write_trace = true;
    bool write_svg = true;
    bool write_edges = false;

    /// One message per offending field, empty when valid.
    std::vector<std::string> problems() const;
    /// Throws ConfigError listing every problem.
    void validate() const;

    /// Unknown keys are rejected so typos do not silently fall back to defaults.
    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

class ConfigError : public InvalidInput {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// A module error tagged with the pipeline stage it came from:
/// ingest, standardize, kernel, weights, solve, select, score or emit.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what);
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct RunSummary {
    int n = 0;
    int d = 0;
    int chosen_k = 0;
    SelectionMode selection_mode = SelectionMode::auto_elbow;
    std::optional<double> nmi;
    std::optional<double> ari;
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double jitter = 0.0;
    std::size_t edges = 0;
    int graph_components = 0;
    Backend backend = Backend::embedded;
    double wall_seconds = 0.0;

    nlohmann::json to_json() const;
};

/// Everything a run produces, kept in memory.
struct RunOutcome {
    Dataset data;
    GramMatrix kernel;
    Embedding embedding;
    WeightGraph graph;
    SolverResult solver;
    ClusterSelection selection;
    RunSummary summary;
};

Dataset load_input(const RunConfig& cfg);

/// Stages standardize through score on an already loaded dataset.
RunOutcome run_pipeline(Dataset data, const RunConfig& cfg);

/// Full run: ingest, compute, then write labels.csv, centroids.csv,
/// sse_curve.csv, dendrogram.csv, summary.json and, depending on the config,
/// trace.csv, elbow.svg, edges.csv and truth_labels.csv into cfg.output_dir.
RunOutcome run(const RunConfig& cfg);

} // namespace kcc
