#include "kcc/pipeline.hpp"

#include "kcc/elbow_svg.hpp"
#include "kcc/metrics.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>

namespace kcc {

using nlohmann::json;

std::string to_string(Backend backend) {
    return backend == Backend::embedded ? "embedded" : "kernel-space";
}

Backend backend_from_string(const std::string& name) {
    if (name == "embedded") return Backend::embedded;
    if (name == "kernel-space") return Backend::kernel_space;
    throw InvalidInput("unknown backend '" + name + "' (expected embedded or kernel-space)");
}

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    return msg;
}

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

// Reads typed fields out of one JSON object, recording problems instead of
// throwing so every bad field is reported at once.
class FieldReader {
public:
    FieldReader(const json& obj, std::string prefix, std::vector<std::string>& problems)
        : obj_(obj), prefix_(std::move(prefix)), problems_(problems) {
        if (!obj_.is_object()) problems_.push_back(name("") + ": expected an object");
    }

    template <typename T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        if (!obj_.is_object() || !obj_.contains(key)) return;
        const json& v = obj_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw std::invalid_argument("expected true or false");
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number()) throw std::invalid_argument("expected a number");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw std::invalid_argument("expected a string");
            }
            out = v.get<T>();
        } catch (const std::exception& e) {
            problems_.push_back(name(key) + ": " + e.what());
        }
    }

    template <typename T>
    void get_optional(const std::string& key, std::optional<T>& out) {
        seen_.insert(key);
        if (!obj_.is_object() || !obj_.contains(key)) return;
        if (obj_.at(key).is_null()) {
            out.reset();
            return;
        }
        T value{};
        const std::size_t before = problems_.size();
        get(key, value);
        if (problems_.size() == before) out = value;
    }

    /// Reads a string and maps it through `parse`, reporting its error message.
    template <typename T, typename Parse>
    void get_enum(const std::string& key, T& out, Parse parse) {
        std::string text;
        const std::size_t before = problems_.size();
        get(key, text);
        if (problems_.size() != before || !obj_.is_object() || !obj_.contains(key)) return;
        try {
            out = parse(text);
        } catch (const std::exception& e) {
            problems_.push_back(name(key) + ": " + e.what());
        }
    }

    const json* child(const std::string& key) {
        seen_.insert(key);
        if (!obj_.is_object() || !obj_.contains(key)) return nullptr;
        return &obj_.at(key);
    }

    void reject_unknown() {
        if (!obj_.is_object()) return;
        for (const auto& [key, _] : obj_.items())
            if (!seen_.count(key)) problems_.push_back(name(key) + ": unknown key");
    }

    std::string name(const std::string& key) const {
        if (prefix_.empty()) return key.empty() ? "config" : key;
        return key.empty() ? prefix_ : prefix_ + "." + key;
    }

private:
    const json& obj_;
    std::string prefix_;
    std::vector<std::string>& problems_;
    std::set<std::string> seen_;
};

template <typename F>
auto in_stage(const char* stage, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

void write_file(const std::filesystem::path& path, const auto& writer) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    writer(out);
    if (!out) throw Error("failed writing " + path.string());
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : InvalidInput(join_problems(problems)), problems_(std::move(problems)) {}

StageError::StageError(std::string stage, const std::string& what)
    : Error("stage " + stage + ": " + what), stage_(std::move(stage)) {}

std::vector<std::string> RunConfig::problems() const {
    std::vector<std::string> p;
    if (input.csv.has_value() == input.gen_blobs.has_value())
        p.push_back("input: give exactly one of csv and gen_blobs");
    if (input.csv && input.csv->empty()) p.push_back("input.csv: empty path");
    if (input.gen_blobs && (*input.gen_blobs < 1 || *input.gen_blobs > 7))
        p.push_back("input.gen_blobs: must be in 1..7");
    if (input.gen_blobs && input.label_column)
        p.push_back("input.label_column: only meaningful with csv input");

    if (kernel.kind == KernelKind::gaussian && !positive_finite(kernel.sigma1))
        p.push_back("kernel.sigma1: must be a positive number");
    if (kernel.kind == KernelKind::polynomial && kernel.degree < 1)
        p.push_back("kernel.degree: must be at least 1");
    if (kernel.kind == KernelKind::polynomial && !std::isfinite(kernel.offset))
        p.push_back("kernel.offset: must be finite");

    if (knn < 1) p.push_back("weights.knn: must be at least 1");
    if (!positive_finite(sigma2)) p.push_back("weights.sigma2: must be a positive number");

    if (!(solver.gamma >= 0.0 && std::isfinite(solver.gamma))) p.push_back("solver.gamma: must be >= 0");
    if (!positive_finite(solver.rho)) p.push_back("solver.rho: must be a positive number");
    if (solver.max_iter < 1) p.push_back("solver.max_iter: must be at least 1");
    if (!positive_finite(solver.tol_abs)) p.push_back("solver.tol_abs: must be a positive number");
    if (!positive_finite(solver.tol_rel)) p.push_back("solver.tol_rel: must be a positive number");

    if (k_max && *k_max < 1) p.push_back("selection.k_max: must be at least 1");
    if (k_max && !manual_k && *k_max < 3) p.push_back("selection.k_max: elbow selection needs at least 3");
    if (manual_k && *manual_k < 1) p.push_back("selection.manual_k: must be at least 1");
    if (manual_k && k_max && *manual_k > *k_max) p.push_back("selection.manual_k: exceeds selection.k_max");

    if (output_dir.empty()) p.push_back("output_dir: empty path");
    return p;
}

void RunConfig::validate() const {
    auto p = problems();
    if (!p.empty()) throw ConfigError(std::move(p));
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig cfg;
    std::vector<std::string> problems;
    FieldReader top(j, "", problems);

    if (const json* in = top.child("input")) {
        FieldReader r(*in, "input", problems);
        std::optional<std::string> csv;
        std::optional<int> blobs;
        r.get_optional("csv", csv);
        r.get_optional("gen_blobs", blobs);
        if (csv || blobs) {
            cfg.input.csv = csv;
            cfg.input.gen_blobs = blobs;
        }
        r.get("has_header", cfg.input.has_header);
        if (const json* lc = r.child("label_column")) {
            if (lc->is_number_integer()) cfg.input.label_column = LabelColumn{lc->get<long>()};
            else if (lc->is_string()) cfg.input.label_column = LabelColumn{lc->get<std::string>()};
            else if (!lc->is_null()) problems.push_back("input.label_column: expected a column index or name");
        }
        r.reject_unknown();
    }
    top.get("standardize", cfg.standardize);
    if (const json* k = top.child("kernel")) {
        FieldReader r(*k, "kernel", problems);
        r.get_enum("kind", cfg.kernel.kind, kernel_kind_from_string);
        r.get("sigma1", cfg.kernel.sigma1);
        r.get("degree", cfg.kernel.degree);
        r.get("offset", cfg.kernel.offset);
        r.reject_unknown();
    }
    if (const json* w = top.child("weights")) {
        FieldReader r(*w, "weights", problems);
        r.get("knn", cfg.knn);
        r.get("sigma2", cfg.sigma2);
        r.reject_unknown();
    }
    if (const json* s = top.child("solver")) {
        FieldReader r(*s, "solver", problems);
        r.get("gamma", cfg.solver.gamma);
        r.get("rho", cfg.solver.rho);
        r.get("max_iter", cfg.solver.max_iter);
        r.get("tol_abs", cfg.solver.tol_abs);
        r.get("tol_rel", cfg.solver.tol_rel);
        r.get_enum("backend", cfg.backend, backend_from_string);
        r.get_enum("storage", cfg.solver.storage, pair_storage_from_string);
        r.reject_unknown();
    }
    if (const json* s = top.child("selection")) {
        FieldReader r(*s, "selection", problems);
        r.get_optional("k_max", cfg.k_max);
        r.get_optional("manual_k", cfg.manual_k);
        r.get_enum("linkage", cfg.linkage, linkage_from_string);
        r.reject_unknown();
    }
    top.get("seed", cfg.seed);
    top.get("output_dir", cfg.output_dir);
    if (const json* o = top.child("outputs")) {
        FieldReader r(*o, "outputs", problems);
        r.get("trace", cfg.write_trace);
        r.get("svg", cfg.write_svg);
        r.get("edges", cfg.write_edges);
        r.reject_unknown();
    }
    top.reject_unknown();

    if (problems.empty()) problems = cfg.problems();
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return cfg;
}

json RunConfig::to_json() const {
    json in = json::object();
    if (input.csv) in["csv"] = *input.csv;
    if (input.gen_blobs) in["gen_blobs"] = *input.gen_blobs;
    in["has_header"] = input.has_header;
    if (input.label_column) {
        if (const long* idx = std::get_if<long>(&*input.label_column)) in["label_column"] = *idx;
        else in["label_column"] = std::get<std::string>(*input.label_column);
    }
    json sel = {{"linkage", kcc::to_string(linkage)}};
    sel["k_max"] = k_max ? json(*k_max) : json(nullptr);
    sel["manual_k"] = manual_k ? json(*manual_k) : json(nullptr);
    return {
        {"input", in},
        {"standardize", standardize},
        {"kernel",
         {{"kind", kcc::to_string(kernel.kind)},
          {"sigma1", kernel.sigma1},
          {"degree", kernel.degree},
          {"offset", kernel.offset}}},
        {"weights", {{"knn", knn}, {"sigma2", sigma2}}},
        {"solver",
         {{"gamma", solver.gamma},
          {"rho", solver.rho},
          {"max_iter", solver.max_iter},
          {"tol_abs", solver.tol_abs},
          {"tol_rel", solver.tol_rel},
          {"backend", kcc::to_string(backend)},
          {"storage", kcc::to_string(solver.storage)}}},
        {"selection", sel},
        {"seed", seed},
        {"output_dir", output_dir},
        {"outputs", {{"trace", write_trace}, {"svg", write_svg}, {"edges", write_edges}}},
    };
}

json RunSummary::to_json() const {
    json j = {
        {"n", n},
        {"d", d},
        {"chosen_k", chosen_k},
        {"selection_mode", kcc::to_string(selection_mode)},
        {"iterations", iterations},
        {"converged", converged},
        {"objective", objective},
        {"primal_residual", primal_residual},
        {"dual_residual", dual_residual},
        {"jitter", jitter},
        {"edges", edges},
        {"graph_components", graph_components},
        {"backend", kcc::to_string(backend)},
        {"wall_seconds", wall_seconds},
    };
    j["nmi"] = nmi ? json(*nmi) : json(nullptr);
    j["ari"] = ari ? json(*ari) : json(nullptr);
    return j;
}

Dataset load_input(const RunConfig& cfg) {
    return in_stage("ingest", [&] {
        if (cfg.input.csv) return load_csv(*cfg.input.csv, cfg.input.has_header, cfg.input.label_column);
        if (!cfg.input.gen_blobs) throw InvalidInput("no input configured");
        return gen_rings_blobs(*cfg.input.gen_blobs, cfg.seed);
    });
}

RunOutcome run_pipeline(Dataset data, const RunConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    RunOutcome out;

    out.data = in_stage("standardize", [&] { return cfg.standardize ? standardize(data) : std::move(data); });
    in_stage("kernel", [&] {
        out.kernel = gram_matrix(cfg.kernel, out.data.X);
        out.embedding = cholesky_embed(out.kernel);
        out.kernel.jitter = out.embedding.jitter;
    });
    in_stage("weights", [&] { out.graph = knn_gaussian_weights(out.data.X, cfg.knn, cfg.sigma2); });

    AdmmConfig solver = cfg.solver;
    solver.record_trace = cfg.write_trace;
    out.solver = in_stage("solve", [&] {
        return cfg.backend == Backend::embedded ? solve_embedded(out.embedding, out.graph, solver)
                                                : solve_kernel_space(out.kernel, out.embedding, out.graph, solver);
    });
    out.selection = in_stage("select", [&] {
        const int n = out.data.n();
        std::optional<int> k_max = cfg.k_max;
        if (k_max && *k_max > n) throw InvalidInput("k_max exceeds the number of points");
        return select_clusters(out.solver.centroids, k_max, cfg.manual_k, cfg.linkage);
    });

    RunSummary& s = out.summary;
    s.n = out.data.n();
    s.d = out.data.d();
    s.chosen_k = out.selection.chosen_k;
    s.selection_mode = out.selection.mode;
    in_stage("score", [&] {
        if (out.data.labels) {
            s.nmi = nmi(*out.data.labels, out.selection.labels);
            s.ari = ari(*out.data.labels, out.selection.labels);
        }
    });
    s.iterations = out.solver.iterations;
    s.converged = out.solver.converged;
    s.objective = out.solver.objective;
    s.primal_residual = out.solver.primal_residual;
    s.dual_residual = out.solver.dual_residual;
    s.jitter = out.embedding.jitter;
    s.edges = out.graph.edges.size();
    const auto comp = components(out.graph);
    s.graph_components = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    s.backend = cfg.backend;
    s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

RunOutcome run(const RunConfig& cfg) {
    cfg.validate();
    RunOutcome out = run_pipeline(load_input(cfg), cfg);

    in_stage("emit", [&] {
        namespace fs = std::filesystem;
        const fs::path dir(cfg.output_dir);
        fs::create_directories(dir);
        write_file(dir / "labels.csv", [&](std::ostream& o) { write_labels_csv(out.selection.labels, o); });
        if (out.data.labels)
            write_file(dir / "truth_labels.csv", [&](std::ostream& o) { write_labels_csv(*out.data.labels, o); });
        // rows are points: row i holds centroid a_i
        write_file(dir / "centroids.csv",
                   [&](std::ostream& o) { write_matrix_csv(out.solver.centroids.transpose(), o); });
        write_file(dir / "sse_curve.csv", [&](std::ostream& o) { write_sse_csv(out.selection.sse, o); });
        write_file(dir / "dendrogram.csv", [&](std::ostream& o) { write_dendrogram_csv(out.selection.dendrogram, o); });
        if (cfg.write_trace)
            write_file(dir / "trace.csv", [&](std::ostream& o) {
                o << "iteration,primal_residual,dual_residual,objective\n" << std::setprecision(17);
                for (const auto& r : out.solver.trace)
                    o << r.iteration << ',' << r.primal_residual << ',' << r.dual_residual << ',' << r.objective
                      << '\n';
            });
        if (cfg.write_edges) write_file(dir / "edges.csv", [&](std::ostream& o) { write_edges_csv(out.graph, o); });
        if (cfg.write_svg && out.selection.sse.k_max() >= 2)
            emit_elbow_svg(out.selection.sse, dir / "elbow.svg", out.selection.chosen_k);
        write_file(dir / "config.json", [&](std::ostream& o) { o << cfg.to_json().dump(2) << '\n'; });
        write_file(dir / "summary.json", [&](std::ostream& o) { o << out.summary.to_json().dump(2) << '\n'; });
    });
    return out;
}

} // namespace kcc
