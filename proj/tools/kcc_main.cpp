#include "kcc/data_io.hpp"
#include "kcc/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRun = 1;

struct RunFlags {
    std::string config_path;
    std::optional<std::string> input;
    std::optional<int> gen_blobs;
    bool no_header = false;
    std::optional<std::string> label_column;
    bool standardize = false;
    std::optional<double> sigma1, sigma2, gamma, rho, tol_abs, tol_rel;
    std::optional<int> knn, k, kmax, max_iter;
    std::optional<std::string> backend, storage, linkage, out;
    std::optional<std::uint64_t> seed;
    bool edges = false;
    bool quiet = false;
};

kcc::LabelColumn parse_label_column(const std::string& text) {
    try {
        std::size_t used = 0;
        const long idx = std::stol(text, &used);
        if (used == text.size()) return idx;
    } catch (const std::exception&) {
    }
    return text;
}

// File values first, then flags on top. Enum flags are parsed here so a bad
// value is reported with the same wording as in a config file.
kcc::RunConfig build_config(const RunFlags& f) {
    kcc::RunConfig cfg;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw kcc::ConfigError({"--config: cannot open " + f.config_path});
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw kcc::ConfigError({std::string("--config: ") + e.what()});
        }
        cfg = kcc::RunConfig::from_json(j);
    }

    std::vector<std::string> problems;
    if (f.input) {
        cfg.input.csv = *f.input;
        cfg.input.gen_blobs.reset();
    }
    if (f.gen_blobs) {
        cfg.input.gen_blobs = *f.gen_blobs;
        if (!f.input) cfg.input.csv.reset();
    }
    if (f.no_header) cfg.input.has_header = false;
    if (f.label_column) cfg.input.label_column = parse_label_column(*f.label_column);
    if (f.standardize) cfg.standardize = true;
    if (f.sigma1) cfg.kernel.sigma1 = *f.sigma1;
    if (f.sigma2) cfg.sigma2 = *f.sigma2;
    if (f.knn) cfg.knn = *f.knn;
    if (f.gamma) cfg.solver.gamma = *f.gamma;
    if (f.rho) cfg.solver.rho = *f.rho;
    if (f.tol_abs) cfg.solver.tol_abs = *f.tol_abs;
    if (f.tol_rel) cfg.solver.tol_rel = *f.tol_rel;
    if (f.max_iter) cfg.solver.max_iter = *f.max_iter;
    if (f.k) cfg.manual_k = *f.k;
    if (f.kmax) cfg.k_max = *f.kmax;
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.output_dir = *f.out;
    if (f.edges) cfg.write_edges = true;
    try {
        if (f.backend) cfg.backend = kcc::backend_from_string(*f.backend);
    } catch (const std::exception& e) {
        problems.push_back(std::string("--backend: ") + e.what());
    }
    try {
        if (f.storage) cfg.solver.storage = kcc::pair_storage_from_string(*f.storage);
    } catch (const std::exception& e) {
        problems.push_back(std::string("--storage: ") + e.what());
    }
    try {
        if (f.linkage) cfg.linkage = kcc::linkage_from_string(*f.linkage);
    } catch (const std::exception& e) {
        problems.push_back(std::string("--linkage: ") + e.what());
    }
    for (auto& p : cfg.problems()) problems.push_back(std::move(p));
    if (!problems.empty()) throw kcc::ConfigError(std::move(problems));
    return cfg;
}

int do_run(const RunFlags& f) {
    kcc::RunConfig cfg;
    try {
        cfg = build_config(f);
    } catch (const kcc::ConfigError& e) {
        std::cerr << "kcc: " << e.what() << '\n';
        return kExitConfig;
    }
    try {
        const kcc::RunOutcome out = kcc::run(cfg);
        if (!f.quiet) std::cout << out.summary.to_json().dump(2) << '\n';
        if (!out.summary.converged)
            std::cerr << "kcc: warning: solver stopped at max_iter without meeting the tolerances\n";
        return 0;
    } catch (const kcc::StageError& e) {
        std::cerr << "kcc: error in " << e.what() << '\n';
        return kExitRun;
    } catch (const std::exception& e) {
        std::cerr << "kcc: " << e.what() << '\n';
        return kExitRun;
    }
}

int do_generate(int blobs, std::uint64_t seed, const std::string& out_dir) {
    try {
        const kcc::Dataset d = kcc::gen_rings_blobs(blobs, seed);
        std::filesystem::create_directories(out_dir);
        std::ofstream data(std::filesystem::path(out_dir) / "data.csv");
        std::ofstream labels(std::filesystem::path(out_dir) / "labels.csv");
        if (!data || !labels) throw std::runtime_error("cannot write into " + out_dir);
        kcc::write_matrix_csv(d.X, data, {"x", "y"});
        kcc::write_labels_csv(*d.labels, labels);
        std::cout << "wrote " << d.n() << " points to " << out_dir << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "kcc: " << e.what() << '\n';
        return kExitRun;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernelized convex clustering"};
    app.require_subcommand(1);

    RunFlags f;
    auto* run = app.add_subcommand("run", "Cluster a dataset and write labels, centroids and diagnostics");
    run->add_option("--config", f.config_path, "JSON config file; flags override its values");
    run->add_option("--input", f.input, "CSV file with one point per row");
    run->add_option("--gen-blobs", f.gen_blobs, "Use the ring-and-blobs generator with this many blobs");
    run->add_flag("--no-header", f.no_header, "The CSV has no header row");
    run->add_option("--label-column", f.label_column, "Ground-truth column (index, negative from end, or name)");
    run->add_flag("--standardize", f.standardize, "Z-score every feature column first");
    run->add_option("--sigma1", f.sigma1, "Gaussian kernel bandwidth");
    run->add_option("--sigma2", f.sigma2, "Bandwidth of the fusion weights");
    run->add_option("--knn", f.knn, "Neighbours per point in the weight graph");
    run->add_option("--gamma", f.gamma, "Fusion strength");
    run->add_option("--rho", f.rho, "ADMM penalty parameter");
    run->add_option("--tol-abs", f.tol_abs, "Absolute stopping tolerance");
    run->add_option("--tol-rel", f.tol_rel, "Relative stopping tolerance");
    run->add_option("--max-iter", f.max_iter, "Sweep limit");
    run->add_option("--backend", f.backend, "embedded or kernel-space");
    run->add_option("--storage", f.storage, "Pair storage: implicit or dense");
    run->add_option("--linkage", f.linkage, "single, average, complete or ward");
    run->add_option("--k", f.k, "Use this many clusters instead of the elbow");
    run->add_option("--kmax", f.kmax, "Largest k on the SSE curve");
    run->add_option("--seed", f.seed, "Generator seed");
    run->add_option("--out", f.out, "Output directory");
    run->add_flag("--edges", f.edges, "Also write edges.csv");
    run->add_flag("-q,--quiet", f.quiet, "Do not print the summary");

    int blobs = 4;
    std::uint64_t gen_seed = 1;
    std::string gen_out = ".";
    auto* gen = app.add_subcommand("generate", "Write a ring-and-blobs dataset as data.csv and labels.csv");
    gen->add_option("--blobs", blobs, "Number of blobs (1..7)");
    gen->add_option("--seed", gen_seed, "Random seed");
    gen->add_option("--out", gen_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    if (*run) return do_run(f);
    return do_generate(blobs, gen_seed, gen_out);
}
