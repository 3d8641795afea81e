// Copyright 2026 The qkbft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Experiment harness behind the command-line tool: a JSON run configuration
 * merged over defaults, one function per task, and a manifest per run.
 */

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qkbft.hpp"

namespace qkbft::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// Exit code per error category; 0 is success and 6 a failed strict verification.
inline int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::Parse:
        return 2;
    case ErrorKind::Io:
        return 3;
    case ErrorKind::Pipeline:
        return 4;
    case ErrorKind::Degenerate:
        return 5;
    }
    return 1;
}
inline constexpr int kChecksFailed = 6;

inline json default_config() {
    const double pi = std::numbers::pi;
    json cfg = json::parse(R"({
  "seed": 0,
  "output_dir": "qkbft_out",
  "threads": 0,
  "dataset": {
    "source": "subspaces",
    "path": "",
    "split_fraction": 0.5,
    "subspaces": {"ambient_dim": 10, "class_dims": [2, 2, 2], "samples_per_class": 200, "rotate": true},
    "flip_codes": {"n_bits": 12, "n_classes": 3, "samples_per_class": 10, "min_distance": 6, "flips": 1},
    "bell": {"samples_per_class": 20},
    "covariant": {"n_qubits": 2, "direction": [1, -1], "offsets": [[0, 0], [0, 3.141592653589793]],
                  "s_min": 0, "s_max": 31, "samples_per_class": 20}
  },
  "feature_map": {
    "coupling": "line",
    "coupling_path": "",
    "heavy_hex": {"rows": 2, "row_length": 7},
    "axes": "ZYX",
    "angle_scale": null,
    "standardize": null,
    "n_qubits": 0,
    "lambda": null
  },
  "kernel": {"d": 0, "shots": 10000, "estimate_diagonal": true},
  "noise": {"p01": 0.0, "p10": 0.0, "depolarizing": 0.0},
  "spsa": {"iterations": 100, "a": 0.1, "c": 0.1, "A": 10.0, "alpha": 0.602, "gamma": 0.101,
           "init_spread": 0.0, "target": "zero_one"},
  "svc": {
    "C": 1.0,
    "mode": "quantum",
    "folds": 5,
    "classical": {"variant": "rbf", "gamma": [0.01, 0.1, 1.0, 10.0],
                  "gamma1": [1.0], "sigma1": [0.1, 0.3, 1.0], "gamma2": [1.0], "sigma2": [0.3, 1.0, 3.0],
                  "C": [1.0, 10.0]}
  },
  "calibration": {"ns": [4, 8, 12], "thresholds": [0.9], "samples": 15, "shots": 10000},
  "verify": {"mc_trials": 1000000, "subspace_trials": 100000, "dims": [1, 2, 3, 4, 5, 6],
             "closed_form_factor": 3.141592653589793},
  "report": {"gamma_lo": 0.001, "gamma_hi": 1000.0, "gamma_points": 25}
})");
    cfg["dataset"]["covariant"]["theta"] = pi / 16;
    return cfg;
}

/// Rejects keys the defaults do not know, so typos fail loudly.
inline void check_known(const json &user, const json &defaults, const std::string &path) {
    if (!user.is_object() || !defaults.is_object()) {
        return;
    }
    for (auto it = user.begin(); it != user.end(); ++it) {
        if (!defaults.contains(it.key())) {
            fail(ErrorKind::InvalidArgument, "unknown configuration key " + path + it.key());
        }
        check_known(it.value(), defaults.at(it.key()), path + it.key() + ".");
    }
}

inline void restore_missing(json &cfg, const json &defaults) {
    for (auto it = defaults.begin(); it != defaults.end(); ++it) {
        if (!cfg.contains(it.key())) {
            cfg[it.key()] = it.value();
        } else if (it.value().is_object() && cfg[it.key()].is_object()) {
            restore_missing(cfg[it.key()], it.value());
        }
    }
}

/// defaults <- file <- environment (QKBFT_SEED, QKBFT_OUTPUT_DIR).
inline json resolve_config(const std::optional<std::string> &path) {
    json cfg = default_config();
    if (path) {
        std::ifstream in(*path);
        if (!in) {
            fail(ErrorKind::Io, "cannot open config " + *path);
        }
        json user;
        try {
            user = json::parse(in);
        } catch (const json::parse_error &e) {
            fail(ErrorKind::Parse, *path + ": " + e.what());
        }
        require(user.is_object(), *path + ": configuration must be a JSON object");
        check_known(user, cfg, "");
        cfg.merge_patch(user);
        // a null in the user file means "use the default", not "delete"
        restore_missing(cfg, default_config());
    }
    if (const char *s = std::getenv("QKBFT_SEED")) {
        long long v = 0;
        if (!detail::parse_long(s, v) || v < 0) {
            fail(ErrorKind::InvalidArgument, "QKBFT_SEED must be a nonnegative integer");
        }
        cfg["seed"] = static_cast<std::uint64_t>(v);
    }
    if (const char *o = std::getenv("QKBFT_OUTPUT_DIR")) {
        cfg["output_dir"] = std::string(o);
    }
    return cfg;
}

template <class T> T get(const json &j, const char *key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &e) {
        fail(ErrorKind::InvalidArgument, std::string("configuration field ") + key + ": " + e.what());
    }
}

/// Stage seeds, all derived from the one master seed.
enum class Stage : std::uint64_t { Dataset = 1, Split, Spsa, Kernel, Folds, Calibration, Verify, Init };

inline std::uint64_t stage_seed(const json &cfg, Stage s) {
    return derive_seed(get<std::uint64_t>(cfg, "seed"), {static_cast<std::uint64_t>(s)});
}

// ---------------------------------------------------------------------------
// run bookkeeping

class Run {
  public:
    Run(std::string task, json cfg)
        : task_(std::move(task)), cfg_(std::move(cfg)),
          dir_(get<std::string>(cfg_, "output_dir")), start_(std::chrono::steady_clock::now()) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) {
            fail(ErrorKind::Io, "cannot create output directory " + dir_.string());
        }
        default_threads() = get<std::size_t>(cfg_, "threads");
    }

    const json &config() const { return cfg_; }
    const json &section(const char *name) const { return cfg_.at(name); }
    std::string path(const std::string &name) const { return (dir_ / name).string(); }
    bool exists(const std::string &name) const { return fs::exists(dir_ / name); }

    /// Path of an artifact an earlier stage should have produced.
    std::string input(const std::string &name, const std::string &producer) const {
        if (!exists(name)) {
            fail(ErrorKind::Pipeline,
                 "missing artifact " + path(name) + "; run \"" + producer + "\" first");
        }
        return path(name);
    }

    template <class Writer> void write(const std::string &name, Writer &&w) {
        io::save(path(name), w);
        artifacts_.push_back(name);
    }

    void write_json(const std::string &name, const json &j) {
        write(name, [&](std::ostream &out) { out << j.dump(2) << '\n'; });
    }

    void finish(json extra = json::object()) {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json m = {{"version", kVersion},
                  {"task", task_},
                  {"seed", cfg_.at("seed")},
                  {"config", cfg_},
                  {"artifacts", artifacts_},
                  {"wall_clock_seconds", secs}};
        if (!extra.empty()) {
            m["summary"] = std::move(extra);
        }
        io::save(path("manifest_" + task_ + ".json"),
                 [&](std::ostream &out) { out << m.dump(2) << '\n'; });
    }

  private:
    std::string task_;
    json cfg_;
    fs::path dir_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> artifacts_;
};

// ---------------------------------------------------------------------------
// configuration readers

inline Dataset build_dataset(const json &cfg) {
    const auto &d = cfg.at("dataset");
    const auto source = get<std::string>(d, "source");
    const auto seed = stage_seed(cfg, Stage::Dataset);
    if (source == "csv") {
        const auto path = get<std::string>(d, "path");
        require(!path.empty(), "dataset.path is required for csv input");
        return load_csv(path);
    }
    if (source == "subspaces") {
        const auto &s = d.at("subspaces");
        SubspaceSpec spec;
        spec.ambient_dim = get<int>(s, "ambient_dim");
        spec.class_dims = get<std::vector<int>>(s, "class_dims");
        spec.samples_per_class = get<int>(s, "samples_per_class");
        spec.rotate = get<bool>(s, "rotate");
        spec.seed = seed;
        return gen_union_subspaces(spec);
    }
    if (source == "flip_codes") {
        const auto &s = d.at("flip_codes");
        FlipCodeSpec spec;
        spec.n_bits = get<int>(s, "n_bits");
        spec.n_classes = get<int>(s, "n_classes");
        spec.samples_per_class = get<int>(s, "samples_per_class");
        spec.min_distance = get<int>(s, "min_distance");
        spec.flips = get<int>(s, "flips");
        spec.seed = seed;
        return gen_flip_codes(spec);
    }
    if (source == "bell") {
        return theory::bell_dataset(get<int>(d.at("bell"), "samples_per_class"), seed);
    }
    if (source == "covariant") {
        const auto &s = d.at("covariant");
        CovariantSpec spec;
        spec.n_qubits = get<int>(s, "n_qubits");
        if (s.contains("theta")) {
            spec.theta = get<double>(s, "theta");
        }
        spec.direction = get<std::vector<double>>(s, "direction");
        spec.offsets = get<std::vector<std::vector<double>>>(s, "offsets");
        spec.s_min = get<int>(s, "s_min");
        spec.s_max = get<int>(s, "s_max");
        spec.samples_per_class = get<int>(s, "samples_per_class");
        spec.seed = seed;
        return gen_covariant(spec);
    }
    fail(ErrorKind::InvalidArgument, "unknown dataset.source \"" + source + "\"");
}

inline CouplingMap build_coupling(const json &fm, int n) {
    const auto kind = get<std::string>(fm, "coupling");
    if (kind == "line") {
        return CouplingMap::line(n);
    }
    if (kind == "ring") {
        return n >= 3 ? CouplingMap::ring(n) : CouplingMap::line(n);
    }
    if (kind == "star") {
        return CouplingMap::star(n);
    }
    if (kind == "heavy_hex") {
        const auto &h = fm.at("heavy_hex");
        return CouplingMap::heavy_hex(get<int>(h, "rows"), get<int>(h, "row_length"));
    }
    if (kind == "file") {
        return CouplingMap::load(get<std::string>(fm, "coupling_path"));
    }
    fail(ErrorKind::InvalidArgument, "unknown feature_map.coupling \"" + kind + "\"");
}

/// Quantum view of a dataset: the n most important features, in importance order.
struct QuantumSetup {
    FeatureMapSpec spec;
    std::vector<int> columns;
    std::optional<Standardizer> zscore; // fitted on the training rows
};

/// CSV features are z-scored and mapped with scale pi/2 unless set explicitly;
/// generated data is used as is with scale 1.
inline bool csv_source(const json &cfg) { return get<std::string>(cfg.at("dataset"), "source") == "csv"; }

inline double angle_scale(const json &cfg) {
    const auto &v = cfg.at("feature_map").at("angle_scale");
    if (v.is_null()) {
        return csv_source(cfg) ? std::numbers::pi / 2 : 1.0;
    }
    return get<double>(cfg.at("feature_map"), "angle_scale");
}

inline bool standardize(const json &cfg) {
    const auto &v = cfg.at("feature_map").at("standardize");
    return v.is_null() ? csv_source(cfg) : get<bool>(cfg.at("feature_map"), "standardize");
}

inline QuantumSetup build_quantum(const json &cfg, const Dataset &train) {
    const auto &fm = cfg.at("feature_map");
    int n = get<int>(fm, "n_qubits");
    if (n <= 0) {
        n = train.n_features();
    }
    require(n <= train.n_features(), "feature_map.n_qubits exceeds the feature count");
    if (n > sim::kMaxQubits) {
        fail(ErrorKind::InvalidArgument,
             std::to_string(n) + " qubits exceed the simulator limit of " +
                 std::to_string(sim::kMaxQubits) + "; set feature_map.n_qubits or use svc.mode \"classical\"");
    }
    QuantumSetup q;
    const auto order = train.importance();
    q.columns.assign(order.begin(), order.begin() + n);
    q.spec = FeatureMapSpec::make(build_coupling(fm, n), n, AxisTriple::parse(get<std::string>(fm, "axes")),
                                  {}, angle_scale(cfg));
    if (standardize(cfg)) {
        q.zscore = Standardizer::fit(train.select_features(q.columns).features);
    }
    return q;
}

inline MatrixXd quantum_features(const QuantumSetup &q, const Dataset &ds) {
    MatrixXd x = ds.select_features(q.columns).features;
    return q.zscore ? q.zscore->transform(x) : x;
}

inline KernelConfig kernel_config(const json &cfg) {
    const auto &k = cfg.at("kernel");
    KernelConfig c;
    c.d = get<int>(k, "d");
    const auto shots = get<long long>(k, "shots");
    require(shots >= 0, "kernel.shots must be nonnegative");
    c.shots = static_cast<std::uint64_t>(shots);
    c.estimate_diagonal = get<bool>(k, "estimate_diagonal");
    c.master_seed = stage_seed(cfg, Stage::Kernel);
    return c;
}

inline sim::NoiseModel noise_model(const json &cfg) {
    const auto &n = cfg.at("noise");
    sim::NoiseModel m{get<double>(n, "p01"), get<double>(n, "p10"), get<double>(n, "depolarizing")};
    m.validate();
    return m;
}

inline SPSAConfig spsa_config(const json &cfg) {
    const auto &s = cfg.at("spsa");
    SPSAConfig c;
    c.iterations = get<int>(s, "iterations");
    c.a = get<double>(s, "a");
    c.c = get<double>(s, "c");
    c.A = get<double>(s, "A");
    c.alpha_exp = get<double>(s, "alpha");
    c.gamma_exp = get<double>(s, "gamma");
    c.seed = stage_seed(cfg, Stage::Spsa);
    c.validate();
    return c;
}

inline TargetVariant target_variant(const json &cfg) {
    const auto t = get<std::string>(cfg.at("spsa"), "target");
    if (t == "zero_one") {
        return TargetVariant::ZeroOne;
    }
    if (t == "shifted") {
        return TargetVariant::Shifted;
    }
    fail(ErrorKind::InvalidArgument, "unknown spsa.target \"" + t + "\"");
}

inline std::string svc_mode(const json &cfg) {
    const auto m = get<std::string>(cfg.at("svc"), "mode");
    require(m == "quantum" || m == "classical" || m == "both",
            "svc.mode must be quantum, classical or both");
    return m;
}

inline std::vector<ClassicalKernelSpec> classical_grid(const json &cfg, std::vector<double> &cs) {
    const auto &c = cfg.at("svc").at("classical");
    const auto variant = get<std::string>(c, "variant");
    cs = get<std::vector<double>>(c, "C");
    require(!cs.empty(), "svc.classical.C must list at least one value");
    std::vector<ClassicalKernelSpec> grid;
    if (variant == "rbf") {
        for (double g : get<std::vector<double>>(c, "gamma")) {
            grid.push_back(ClassicalKernelSpec::rbf(g));
        }
    } else if (variant == "generalized_rbf") {
        for (double g1 : get<std::vector<double>>(c, "gamma1")) {
            for (double s1 : get<std::vector<double>>(c, "sigma1")) {
                for (double g2 : get<std::vector<double>>(c, "gamma2")) {
                    for (double s2 : get<std::vector<double>>(c, "sigma2")) {
                        grid.push_back(ClassicalKernelSpec::generalized(g1, s1, g2, s2));
                    }
                }
            }
        }
    } else {
        fail(ErrorKind::InvalidArgument, "unknown svc.classical.variant \"" + variant + "\"");
    }
    require(!grid.empty(), "classical kernel grid is empty");
    for (const auto &g : grid) {
        g.validate();
    }
    return grid;
}

inline json classical_json(const ClassicalKernelSpec &k, double c) {
    json j = {{"variant", k.name()}, {"C", c}};
    if (k.variant == ClassicalKernelSpec::Variant::Rbf) {
        j["gamma"] = k.gamma;
    } else {
        j["gamma1"] = k.gamma1;
        j["sigma1"] = k.sigma1;
        j["gamma2"] = k.gamma2;
        j["sigma2"] = k.sigma2;
    }
    return j;
}

inline ClassicalKernelSpec classical_from_json(const json &j) {
    if (get<std::string>(j, "variant") == "rbf") {
        return ClassicalKernelSpec::rbf(get<double>(j, "gamma"));
    }
    return ClassicalKernelSpec::generalized(get<double>(j, "gamma1"), get<double>(j, "sigma1"),
                                            get<double>(j, "gamma2"), get<double>(j, "sigma2"));
}

// ---------------------------------------------------------------------------
// fingerprints tie a fitted model to the exact kernel that produced it

inline std::uint64_t fnv1a(const std::string &s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream ss;
    ss << std::hex << v;
    return ss.str();
}

inline std::string fingerprint(const json &cfg, const std::string &mode,
                               const std::vector<double> &lambda, const Dataset &train) {
    std::ostringstream s;
    s << mode << '|' << cfg.at("seed").dump() << '|';
    if (mode != "classical") {
        s << cfg.at("feature_map").dump() << '|' << cfg.at("kernel").dump() << '|'
          << cfg.at("noise").dump() << '|';
        for (double v : lambda) {
            s << format_double(v) << ';';
        }
    }
    write_csv(train, s);
    return hex64(fnv1a(s.str()));
}

// ---------------------------------------------------------------------------
// tasks

inline Split load_split(const Run &run) {
    Split s;
    s.train = load_csv(run.input("train.csv", "datagen"));
    s.test = load_csv(run.input("test.csv", "datagen"));
    return s;
}

inline int cmd_datagen(const json &cfg) {
    Run run("datagen", cfg);
    const auto ds = build_dataset(cfg);
    const auto s = split(ds, get<double>(cfg.at("dataset"), "split_fraction"),
                         stage_seed(cfg, Stage::Split));
    run.write("dataset.csv", [&](std::ostream &o) { write_csv(ds, o); });
    run.write("train.csv", [&](std::ostream &o) { write_csv(s.train, o); });
    run.write("test.csv", [&](std::ostream &o) { write_csv(s.test, o); });
    run.finish({{"samples", ds.size()},
                {"features", ds.n_features()},
                {"classes", ds.n_classes()},
                {"train", s.train.size()},
                {"test", s.test.size()}});
    return 0;
}

inline int cmd_calibrate(const json &cfg) {
    Run run("calibrate", cfg);
    const auto &c = cfg.at("calibration");
    CalibrationOptions opt;
    opt.ns = get<std::vector<int>>(c, "ns");
    opt.thresholds = get<std::vector<double>>(c, "thresholds");
    opt.samples = get<int>(c, "samples");
    const auto shots = get<long long>(c, "shots");
    require(shots >= 0, "calibration.shots must be nonnegative");
    opt.shots = static_cast<std::uint64_t>(shots);
    opt.noise = noise_model(cfg);
    opt.seed = stage_seed(cfg, Stage::Calibration);
    opt.axes = AxisTriple::parse(get<std::string>(cfg.at("feature_map"), "axes"));
    for (int n : opt.ns) {
        require(n >= 1 && n <= sim::kMaxQubits, "calibration qubit count out of range");
    }
    const auto report = calibrate(opt);
    run.write("calibration.csv", [&](std::ostream &o) { io::write_calibration(report, o); });
    run.write("recommendations.csv", [&](std::ostream &o) { io::write_recommendations(report, o); });
    json rec = json::array();
    for (const auto &r : report.recommendations) {
        rec.push_back({{"n", r.n}, {"threshold", r.threshold}, {"recommended_d", r.recommended_d},
                       {"reachable", r.reachable}});
    }
    run.finish({{"recommendations", rec}});
    return 0;
}

inline int cmd_align(const json &cfg, bool resume) {
    Run run("align", cfg);
    const auto train = load_csv(run.input("train.csv", "datagen"));
    const auto q = build_quantum(cfg, train);
    auto spsa = spsa_config(cfg);
    AlignOptions opt;
    opt.target = target_variant(cfg);
    opt.init_seed = stage_seed(cfg, Stage::Init);
    opt.init_spread = get<double>(cfg.at("spsa"), "init_spread");
    if (!cfg.at("feature_map").at("lambda").is_null()) {
        opt.initial_lambda = get<std::vector<double>>(cfg.at("feature_map"), "lambda");
    }
    std::vector<TraceEntry> previous;
    int offset = 0;
    if (resume) {
        previous = io::load(run.input("trace.csv", "align"), [](std::istream &in, const std::string &p) {
            return io::read_trace(in, p);
        });
        opt.initial_lambda = previous.back().lambda;
        offset = previous.back().iteration;
        previous.pop_back();
        spsa.seed = derive_seed(spsa.seed, {static_cast<std::uint64_t>(offset)});
    }
    auto kcfg = kernel_config(cfg);
    kcfg.master_seed = derive_seed(kcfg.master_seed, {static_cast<std::uint64_t>(offset)});
    auto trace = align_kernel(quantum_features(q, train), train.labels, q.spec, spsa, kcfg,
                              noise_model(cfg), opt);
    for (auto &e : trace.entries) {
        e.iteration += offset;
    }
    trace.entries.insert(trace.entries.begin(), previous.begin(), previous.end());
    run.write("trace.csv", [&](std::ostream &o) { io::write_trace(trace, o); });
    run.write("lambda.csv", [&](std::ostream &o) { io::write_parameters(trace.entries.back().lambda, o); });
    run.finish({{"initial_loss", trace.entries.front().loss},
                {"final_loss", trace.final_loss()},
                {"best_loss", trace.best_loss},
                {"evaluations", trace.evaluations}});
    return 0;
}

/// Parameters for the quantum kernel: explicit config, else the aligned snapshot.
inline std::vector<double> fit_parameters(const Run &run, const json &cfg, const QuantumSetup &q) {
    const auto &fm = cfg.at("feature_map");
    std::vector<double> lambda;
    if (!fm.at("lambda").is_null()) {
        lambda = get<std::vector<double>>(fm, "lambda");
    } else {
        lambda = io::load(run.input("lambda.csv", "align"),
                          [](std::istream &in, const std::string &p) { return io::read_parameters(in, p); });
    }
    if (lambda.size() != q.spec.parameter_count()) {
        fail(ErrorKind::Pipeline, "parameter vector has " + std::to_string(lambda.size()) +
                                      " entries, the feature map needs " +
                                      std::to_string(q.spec.parameter_count()));
    }
    return lambda;
}

inline int cmd_fit(const json &cfg) {
    Run run("fit", cfg);
    const auto train = load_csv(run.input("train.csv", "datagen"));
    const auto mode = svc_mode(cfg);
    const double c = get<double>(cfg.at("svc"), "C");
    json meta = {{"mode", mode}, {"classes", train.class_names}};
    json scores = json::object();
    std::vector<double> lambda;
    if (mode != "classical") {
        const auto q = build_quantum(cfg, train);
        lambda = fit_parameters(run, cfg, q);
        const auto est = repair(assemble_matrix(quantum_features(q, train), q.spec, lambda,
                                                kernel_config(cfg), noise_model(cfg)));
        const auto model = fit_multiclass(est.values, train.labels, c);
        run.write("kernel_train.csv", [&](std::ostream &o) { io::write_kernel(est.values, o); });
        run.write("model_quantum.csv", [&](std::ostream &o) { io::write_model(model, o); });
        scores["quantum"] = {{"train_accuracy", accuracy(predict(model, est.values), train.labels)},
                             {"psd_projected", est.psd_projected},
                             {"min_eigenvalue_before", est.min_eigenvalue_before}};
        meta["lambda"] = lambda;
    }
    if (mode != "quantum") {
        std::vector<double> cs;
        const auto grid = classical_grid(cfg, cs);
        struct Point {
            ClassicalKernelSpec kernel;
            double C;
        };
        std::vector<Point> points;
        for (const auto &g : grid) {
            for (double cc : cs) {
                points.push_back({g, cc});
            }
        }
        CrossValidation cv;
        cv.folds = get<int>(cfg.at("svc"), "folds");
        cv.seed = stage_seed(cfg, Stage::Folds);
        const auto best = grid_search(
            points, [&](const Point &p) { return p.kernel.matrix(train.features); }, train.labels, cv);
        const MatrixXd k = best.best.kernel.matrix(train.features);
        const auto model = fit_multiclass(k, train.labels, best.best.C);
        run.write("model_classical.csv", [&](std::ostream &o) { io::write_model(model, o); });
        meta["classical"] = classical_json(best.best.kernel, best.best.C);
        scores["classical"] = {{"train_accuracy", accuracy(predict(model, k), train.labels)},
                               {"cv_accuracy", best.scores[best.best_index]},
                               {"params", meta["classical"]}};
    }
    meta["fingerprint"] = fingerprint(cfg, mode, lambda, train);
    run.write_json("fit.json", meta);
    run.write_json("scores.json", scores);
    run.finish(scores);
    return 0;
}

inline int cmd_predict(const json &cfg) {
    Run run("predict", cfg);
    const auto s = load_split(run);
    if (s.test.size() == 0) {
        fail(ErrorKind::Pipeline, "test set is empty");
    }
    json meta;
    {
        std::ifstream in(run.input("fit.json", "fit"));
        meta = json::parse(in);
    }
    const auto mode = get<std::string>(meta, "mode");
    if (mode != svc_mode(cfg)) {
        fail(ErrorKind::Pipeline, "model was fitted in mode \"" + mode + "\"");
    }
    const auto lambda = meta.contains("lambda") ? meta["lambda"].get<std::vector<double>>()
                                                : std::vector<double>{};
    if (fingerprint(cfg, mode, lambda, s.train) != get<std::string>(meta, "fingerprint")) {
        fail(ErrorKind::Pipeline,
             "kernel configuration or training data differ from the ones the model was fitted with");
    }
    if (s.test.class_names != s.train.class_names) {
        fail(ErrorKind::Pipeline, "train and test sets use different class lists");
    }
    json scores = json::object();
    {
        std::ifstream in(run.input("scores.json", "fit"));
        scores = json::parse(in);
    }
    const auto load_model = [&](const std::string &name) {
        return io::load(run.input(name, "fit"),
                        [](std::istream &in, const std::string &p) { return io::read_model(in, p); });
    };
    if (mode != "classical") {
        const auto q = build_quantum(cfg, s.train);
        const auto model = load_model("model_quantum.csv");
        const MatrixXd k = assemble_cross_matrix(quantum_features(q, s.test), quantum_features(q, s.train),
                                                 q.spec, lambda, kernel_config(cfg), noise_model(cfg));
        const auto pred = predict(model, k);
        run.write("kernel_test.csv", [&](std::ostream &o) { io::write_kernel(k, o, io::sample_ids(static_cast<std::size_t>(k.rows()), "t")); });
        run.write("predictions_quantum.csv", [&](std::ostream &o) {
            io::write_predictions(s.test.labels, pred, s.test.class_names, o);
        });
        scores["quantum"]["test_accuracy"] = accuracy(pred, s.test.labels);
    }
    if (mode != "quantum") {
        const auto model = load_model("model_classical.csv");
        const auto kernel = classical_from_json(meta.at("classical"));
        const auto pred = predict(model, kernel.cross(s.test.features, s.train.features));
        run.write("predictions_classical.csv", [&](std::ostream &o) {
            io::write_predictions(s.test.labels, pred, s.test.class_names, o);
        });
        scores["classical"]["test_accuracy"] = accuracy(pred, s.test.labels);
    }
    run.write_json("scores.json", scores);
    run.finish(scores);
    return 0;
}

struct Check {
    std::string name;
    std::string detail;
    double value = 0.0;
    double threshold = 0.0;
    double margin = 0.0; // positive when passing
    bool passed() const { return margin >= 0.0; }
};

inline std::vector<Check> run_theory_checks(const json &cfg, double factor,
                                            std::vector<theory::SubspaceRow> &rows) {
    const auto &v = cfg.at("verify");
    const auto seed = stage_seed(cfg, Stage::Verify);
    const auto mc_trials = get<std::size_t>(v, "mc_trials");
    const auto subspace_trials = get<std::size_t>(v, "subspace_trials");
    std::vector<Check> out;

    {
        Rng rng(derive_seed(seed, {1}));
        double worst = 0.0;
        for (int t = 0; t < 200; ++t) {
            const int classes = static_cast<int>(rng.uniform_int(2, 5));
            const int m = static_cast<int>(rng.uniform_int(std::max(4, classes), 30));
            std::vector<int> labels(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) {
                labels[static_cast<std::size_t>(i)] = i < classes ? i : static_cast<int>(rng.uniform_int(0, classes - 1));
            }
            MatrixXd g(m, m);
            for (Eigen::Index i = 0; i < g.rows(); ++i) {
                for (Eigen::Index j = 0; j < g.cols(); ++j) {
                    g(i, j) = rng.normal();
                }
            }
            const MatrixXd k = g * g.transpose();
            const double a = centered_alignment(target_matrix(labels, TargetVariant::ZeroOne), k);
            const double b = centered_alignment(target_matrix(labels, TargetVariant::Shifted), k);
            worst = std::max(worst, std::abs(a - b));
        }
        out.push_back({"target_affinity", "max |A(K_t,K) - A(K'_t,K)| over 200 label vectors", worst,
                       1e-10, 1e-10 - worst});
    }
    for (int d = 2; d <= 10; ++d) {
        const auto e = theory::mc_sphere_inner(d, mc_trials, derive_seed(seed, {2, static_cast<std::uint64_t>(d)}));
        const double dev = std::abs(e.mean - 1.0 / d);
        out.push_back({"sphere_inner_d" + std::to_string(d), "|E<x,x'>^2 - 1/d| within 3 sigma", dev,
                       3.0 * e.std_error, 3.0 * e.std_error - dev});
    }
    {
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 20; ++s) {
            SubspaceSpec spec;
            spec.ambient_dim = 12;
            spec.class_dims = {3, 4};
            spec.seed = derive_seed(seed, {3, s});
            const auto b = union_subspace_bases(spec);
            worst = std::max(worst, theory::verify_orthogonality(b[0], b[1]));
        }
        out.push_back({"principal_vectors", "max off-diagonal |<u_i, v_j>|", worst, 1e-10, 1e-10 - worst});
    }
    for (int d : {2, 4}) {
        for (bool orth : {true, false}) {
            const auto r = theory::classical_inequality(d, 3 * d, orth, mc_trials / 10,
                                                        derive_seed(seed, {4, static_cast<std::uint64_t>(d), orth}));
            const std::string tag = std::to_string(d) + (orth ? "_orthogonal" : "_tilted");
            out.push_back({"inequality_separation_d" + tag, "(within - cross) / sigma", r.separation, 3.0,
                           r.separation - 3.0});
            // orthogonal pairs give an exact zero, so the band needs a rounding floor
            const double dev = std::abs(r.cross.mean - r.bound);
            const double band = 3.0 * r.cross.std_error + 1e-12;
            out.push_back({"inequality_bound_d" + tag, "|cross - sum cos^2 / d^2| within 3 sigma", dev,
                           band, band - dev});
        }
    }
    {
        Rng rng(derive_seed(seed, {5}));
        double worst = 0.0;
        for (int n : {2, 6, 12}) {
            for (int t = 0; t < 100; ++t) {
                std::vector<double> x(static_cast<std::size_t>(n));
                std::vector<double> y(static_cast<std::size_t>(n));
                for (std::size_t i = 0; i < x.size(); ++i) {
                    x[i] = rng.uniform(-1.0, 1.0);
                    y[i] = rng.uniform(-1.0, 1.0);
                }
                worst = std::max(worst, std::abs(theory::closed_form_kernel(x, y, factor) -
                                                 theory::statevector_rx_kernel(x, y)));
            }
        }
        out.push_back({"closed_form", "max |closed form - statevector| over 300 pairs", worst, 1e-10,
                       1e-10 - worst});
    }
    {
        const auto ds = theory::bell_dataset(20, derive_seed(seed, {6}));
        std::vector<std::vector<sim::Circuit>> samples(2);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            samples[static_cast<std::size_t>(ds.labels[i])].push_back(
                theory::rx_pair(ds.features(r, 0), ds.features(r, 1)));
        }
        const auto rep = theory::check_covariance(theory::bell_structure(), samples);
        const double worst = std::max({rep.max_invariance_defect, rep.max_membership_defect,
                                       rep.max_cross_overlap});
        out.push_back({"bell_covariance", "largest covariance defect", worst, 1e-9, 1e-9 - worst});
        const auto g = theory::verify_prop_group(ds, theory::bell_feature_map(),
                                                 theory::bell_fiducial_parameters());
        out.push_back({"bell_kernel", "max |K - class indicator|", g.max_deviation, 1e-9,
                       1e-9 - g.max_deviation});
    }
    {
        theory::SubspaceExperiment ex;
        ex.factor = factor;
        rows = theory::quantum_subspace_expectations(get<std::vector<int>>(v, "dims"), subspace_trials,
                                                    derive_seed(seed, {7}), ex);
        for (std::size_t base = 0; base + 4 < rows.size(); base += 5) {
            double worst = std::numeric_limits<double>::infinity();
            for (std::size_t k = 1; k < 5; ++k) {
                const double se = std::hypot(rows[base].estimate.std_error, rows[base + k].estimate.std_error);
                worst = std::min(worst, (rows[base].estimate.mean - rows[base + k].estimate.mean) / se);
            }
            out.push_back({"same_subspace_dim" + std::to_string(rows[base].dim_x),
                           "min (same - other) / sigma over the four other cases", worst, 3.0, worst - 3.0});
        }
    }
    return out;
}

inline int cmd_verify(const json &cfg, bool strict, bool convention_bug) {
    Run run("verify", cfg);
    const double factor = convention_bug ? 1.0 : get<double>(cfg.at("verify"), "closed_form_factor");
    std::vector<theory::SubspaceRow> rows;
    const auto checks = run_theory_checks(cfg, factor, rows);
    std::size_t failed = 0;
    run.write("verify.csv", [&](std::ostream &o) {
        o << "check,value,threshold,margin,passed,detail\n";
        for (const auto &c : checks) {
            o << c.name << ',' << format_double(c.value) << ',' << format_double(c.threshold) << ','
              << format_double(c.margin) << ',' << (c.passed() ? 1 : 0) << ',' << c.detail << '\n';
        }
    });
    run.write("subspace_kernels.csv", [&](std::ostream &o) { io::write_subspace_rows(rows, o); });
    for (const auto &c : checks) {
        failed += c.passed() ? 0 : 1;
        std::cout << (c.passed() ? "PASS " : "FAIL ") << c.name << "  value=" << c.value
                  << " threshold=" << c.threshold << " margin=" << c.margin << '\n';
    }
    run.finish({{"checks", checks.size()}, {"failed", failed}, {"convention_bug", convention_bug}});
    return strict && failed > 0 ? kChecksFailed : 0;
}

inline int cmd_report(const json &cfg) {
    Run run("report", cfg);
    const auto train = load_csv(run.input("train.csv", "datagen"));
    const auto q = build_quantum(cfg, train);
    const auto lambda = fit_parameters(run, cfg, q);
    const auto est = repair(assemble_matrix(quantum_features(q, train), q.spec, lambda,
                                            kernel_config(cfg), noise_model(cfg)));
    const auto &r = cfg.at("report");
    const auto search = rbf_gamma_search(train.features, est.values, get<double>(r, "gamma_lo"),
                                         get<double>(r, "gamma_hi"), get<int>(r, "gamma_points"));
    run.write("geometric_difference.csv", [&](std::ostream &o) {
        o << "gamma,g\n";
        for (const auto &[gamma, g] : search.curve) {
            o << format_double(gamma) << ',' << format_double(g) << '\n';
        }
    });
    const json summary = {{"best_gamma", search.gamma}, {"g_min", search.g},
                          {"psd_distance", psd_distance_normalized(est.raw)},
                          {"avg_diagonal", average_diagonal(est.raw)}};
    run.write_json("report.json", summary);
    run.finish(summary);
    return 0;
}

} // namespace qkbft::cli
