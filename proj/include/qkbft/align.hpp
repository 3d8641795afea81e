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
 * Centered kernel-target alignment, target kernels, SPSA alignment of the
 * fiducial parameters, and the geometric difference between a classical and a
 * quantum kernel matrix.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qkbft/classical.hpp"
#include "qkbft/error.hpp"
#include "qkbft/kernel.hpp"
#include "qkbft/linalg.hpp"
#include "qkbft/random.hpp"

namespace qkbft {

/// K - 1K/m - K1/m + 1K1/m^2
inline MatrixXd center_matrix(const MatrixXd &k) {
    require(k.rows() == k.cols(), "center_matrix needs a square matrix");
    if (k.size() == 0) {
        return k;
    }
    const VectorXd col_mean = k.colwise().mean().transpose();
    const VectorXd row_mean = k.rowwise().mean();
    const double grand = k.mean();
    MatrixXd c = k;
    c.colwise() -= row_mean;
    c.rowwise() -= col_mean.transpose();
    c.array() += grand;
    return c;
}

/// Frobenius cosine of the centered matrices; throws Degenerate if either centers to zero.
inline double centered_alignment(const MatrixXd &target, const MatrixXd &k) {
    require(target.rows() == k.rows() && target.cols() == k.cols(),
            "alignment inputs have different shapes");
    const MatrixXd tc = center_matrix(target);
    const MatrixXd kc = center_matrix(k);
    const double nt = tc.norm();
    const double nk = kc.norm();
    if (nt <= 1e-12 * target.norm() || nt == 0.0) {
        fail(ErrorKind::Degenerate, "target kernel is constant after centering");
    }
    if (nk <= 1e-12 * k.norm() || nk == 0.0) {
        fail(ErrorKind::Degenerate, "kernel matrix is constant after centering");
    }
    return std::clamp((tc.array() * kc.array()).sum() / (nt * nk), -1.0, 1.0);
}

enum class TargetVariant { ZeroOne, Shifted };

/// 1 within a class; 0 (ZeroOne) or -1/(C-1) (Shifted) across classes.
inline MatrixXd target_matrix(const std::vector<int> &labels,
                              TargetVariant variant = TargetVariant::ZeroOne,
                              int n_classes = 0) {
    require(!labels.empty(), "target kernel needs labels");
    if (n_classes <= 0) {
        n_classes = static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
    }
    double cross = 0.0;
    if (variant == TargetVariant::Shifted) {
        require(n_classes >= 2, "shifted target kernel needs at least two classes");
        cross = -1.0 / (n_classes - 1);
    }
    const auto m = static_cast<Eigen::Index>(labels.size());
    MatrixXd t(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            t(i, j) = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]
                          ? 1.0
                          : cross;
        }
    }
    return t;
}

struct SPSAConfig {
    int iterations = 100;
    double a = 0.1;
    double c = 0.1;
    double A = 10.0;
    double alpha_exp = 0.602;
    double gamma_exp = 0.101;
    std::uint64_t seed = 0;

    void validate() const {
        require(iterations >= 1, "SPSA needs at least one iteration");
        require(a > 0.0 && c > 0.0, "SPSA gains a and c must be positive");
        require(A >= 0.0, "SPSA stability constant must be nonnegative");
    }

    double step_gain(int k) const { return a / std::pow(k + 1 + A, alpha_exp); }
    double perturbation(int k) const { return c / std::pow(k + 1, gamma_exp); }
};

struct TraceEntry {
    int iteration = 0;
    double loss = 0.0;
    std::vector<double> lambda;
};

struct AlignmentTrace {
    std::vector<TraceEntry> entries; // entry k holds the parameters after k steps
    std::vector<double> best_lambda;
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;

    double final_loss() const { return entries.empty() ? best_loss : entries.back().loss; }
};

/**
 * Minimizes loss(params, iteration) with simultaneous-perturbation steps.
 * Both perturbed evaluations of one iteration receive the same iteration
 * index so that stochastic losses can share random numbers.
 */
template <class Loss>
AlignmentTrace spsa_minimize(Loss &&loss, std::vector<double> x, const SPSAConfig &cfg) {
    cfg.validate();
    require(!x.empty(), "SPSA needs at least one parameter");
    Rng rng(cfg.seed);
    AlignmentTrace trace;
    const auto record = [&](int k, double f) {
        trace.entries.push_back({k, f, x});
        if (f < trace.best_loss) {
            trace.best_loss = f;
            trace.best_lambda = x;
        }
    };
    std::vector<double> delta(x.size());
    std::vector<double> probe(x.size());
    for (int k = 0; k < cfg.iterations; ++k) {
        record(k, loss(std::as_const(x), k));
        const double ck = cfg.perturbation(k);
        const double ak = cfg.step_gain(k);
        for (auto &v : delta) {
            v = rng.rademacher();
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            probe[i] = x[i] + ck * delta[i];
        }
        const double f_plus = loss(std::as_const(probe), k);
        for (std::size_t i = 0; i < x.size(); ++i) {
            probe[i] = x[i] - ck * delta[i];
        }
        const double f_minus = loss(std::as_const(probe), k);
        const double scale = (f_plus - f_minus) / (2.0 * ck);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] -= ak * scale * delta[i];
        }
        trace.evaluations += 3;
    }
    record(cfg.iterations, loss(std::as_const(x), cfg.iterations));
    trace.evaluations += 1;
    return trace;
}

struct AlignOptions {
    TargetVariant target = TargetVariant::ZeroOne;
    std::vector<double> initial_lambda; // empty: draw from init_seed
    std::uint64_t init_seed = 0;
    double init_spread = 0.0; // initial parameters uniform in [-spread, spread]
};

/// Starting point for alignment: explicit parameters or a seeded uniform draw.
inline std::vector<double> initial_parameters(const FeatureMapSpec &spec,
                                              const AlignOptions &opt) {
    if (!opt.initial_lambda.empty()) {
        require(opt.initial_lambda.size() == spec.parameter_count(),
                "initial parameter vector has the wrong length");
        return opt.initial_lambda;
    }
    std::vector<double> lambda(spec.parameter_count(), 0.0);
    if (opt.init_spread > 0.0) {
        Rng rng(derive_seed(opt.init_seed, {0x1a1}));
        for (auto &v : lambda) {
            v = rng.uniform(-opt.init_spread, opt.init_spread);
        }
    }
    return lambda;
}

/// 1 - A(target, repaired BFT kernel); a constant kernel counts as loss 1.
inline double alignment_loss(const MatrixXd &target, const MatrixXd &x, const FeatureMapSpec &spec,
                             const std::vector<double> &lambda, const KernelConfig &kcfg,
                             const sim::NoiseModel &noise) {
    const auto est = repair(assemble_matrix(x, spec, lambda, kcfg, noise));
    try {
        return 1.0 - centered_alignment(target, est.values);
    } catch (const Error &e) {
        if (e.kind() == ErrorKind::Degenerate) {
            return 1.0;
        }
        throw;
    }
}

/**
 * SPSA over the fiducial parameters. Kernel shots in iteration k are seeded
 * from (kernel master seed, k).
 */
inline AlignmentTrace align_kernel(const MatrixXd &x, const std::vector<int> &labels,
                                   const FeatureMapSpec &spec, const SPSAConfig &cfg,
                                   const KernelConfig &kcfg, const sim::NoiseModel &noise = {},
                                   const AlignOptions &opt = {}) {
    require(static_cast<std::size_t>(x.rows()) == labels.size(),
            "sample and label counts differ");
    kcfg.validate(spec.n);
    const MatrixXd target = target_matrix(labels, opt.target);
    const auto loss = [&](const std::vector<double> &lambda, int k) {
        KernelConfig c = kcfg;
        c.master_seed = derive_seed(kcfg.master_seed, {static_cast<std::uint64_t>(k)});
        return alignment_loss(target, x, spec, lambda, c, noise);
    };
    return spsa_minimize(loss, initial_parameters(spec, opt), cfg);
}

/// Default regularizer for geometric_difference: 1e-8 trace(K_C)/m.
inline double default_regularizer(const MatrixXd &k_classical) {
    return 1e-8 * k_classical.trace() / static_cast<double>(k_classical.rows());
}

/// sqrt(|| sqrt(K_Q) (K_C + reg I)^-1 sqrt(K_Q) ||_2), both inputs PSD-repaired first.
inline double geometric_difference(const MatrixXd &k_classical, const MatrixXd &k_quantum,
                                   std::optional<double> regularizer = std::nullopt) {
    require(k_classical.rows() == k_classical.cols() && k_classical.rows() > 0,
            "classical kernel must be a nonempty square matrix");
    require(k_classical.rows() == k_quantum.rows() && k_classical.cols() == k_quantum.cols(),
            "kernel matrices have different shapes");
    const MatrixXd kc = psd_project(symmetrize(k_classical));
    const MatrixXd kq = psd_project(symmetrize(k_quantum));
    const double reg = regularizer.value_or(default_regularizer(kc));
    require(reg >= 0.0, "regularizer must be nonnegative");
    const MatrixXd a = kc + reg * MatrixXd::Identity(kc.rows(), kc.cols());
    const Eigen::LLT<MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        fail(ErrorKind::Degenerate, "regularized classical kernel is singular");
    }
    const MatrixXd root = sym_sqrt(kq);
    const MatrixXd sandwich = symmetrize(root * llt.solve(root));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sandwich, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

struct GammaSearchResult {
    double gamma = 0.0;
    double g = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, double>> curve; // (gamma, g)
};

/// RBF gamma on a log grid minimizing the geometric difference to k_quantum.
inline GammaSearchResult rbf_gamma_search(const MatrixXd &x, const MatrixXd &k_quantum,
                                          double lo = 1e-3, double hi = 1e3, int points = 25,
                                          std::optional<double> regularizer = std::nullopt) {
    require(lo > 0.0 && hi >= lo && points >= 1, "invalid gamma grid");
    GammaSearchResult r;
    for (int i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        const double gamma = lo * std::pow(hi / lo, t);
        double g = std::numeric_limits<double>::infinity();
        try {
            g = geometric_difference(rbf_matrix(x, gamma), k_quantum, regularizer);
        } catch (const Error &e) {
            if (e.kind() != ErrorKind::Degenerate) {
                throw;
            }
        }
        r.curve.emplace_back(gamma, g);
        if (g < r.g) {
            r.g = g;
            r.gamma = gamma;
        }
    }
    return r;
}

} // namespace qkbft
