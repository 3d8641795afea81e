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
 * Bit-flip-tolerant kernel estimation. The kernel value at tolerance d is the
 * probability (exact mode) or shot fraction (sampled mode) of readout
 * bitstrings with Hamming weight <= d after the kernel circuit.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qkbft/error.hpp"
#include "qkbft/featuremap.hpp"
#include "qkbft/linalg.hpp"
#include "qkbft/parallel.hpp"
#include "qkbft/random.hpp"
#include "qkbft/simcore.hpp"

namespace qkbft {

struct KernelConfig {
    int d = 0;                     // bit-flip tolerance
    std::uint64_t shots = 10000;   // 0 selects exact mode
    bool estimate_diagonal = true; // false fixes the diagonal to 1
    std::uint64_t master_seed = 0;

    bool exact() const { return shots == 0; }

    void validate(int n) const {
        if (d < 0 || d > n) {
            fail(ErrorKind::InvalidArgument, "bit-flip tolerance d=" + std::to_string(d) +
                                                 " outside [0, " + std::to_string(n) + "]");
        }
    }
};

struct KernelMatrixEstimate {
    MatrixXd values; // PSD-repaired when psd_projected, otherwise equal to raw
    MatrixXd raw;
    int d = 0;
    std::uint64_t shots = 0;
    bool psd_projected = false;
    double min_eigenvalue_before = 0.0;
};

/// Seed domains keep square and cross matrices on disjoint random streams.
enum class SeedDomain : std::uint64_t { Train = 1, Cross = 2 };

inline std::uint64_t entry_seed(std::uint64_t master, SeedDomain domain, std::size_t i,
                                std::size_t j) {
    return derive_seed(master, {static_cast<std::uint64_t>(domain), i, j});
}

/// Probability mass (or shot fraction) per readout Hamming weight for kernel circuits.
class KernelEvaluator {
  public:
    KernelEvaluator(FeatureMapSpec spec, std::vector<double> lambda, sim::NoiseModel noise = {})
        : spec_(std::move(spec)), lambda_(std::move(lambda)), noise_(noise) {
        spec_.validate();
        noise_.validate();
        fiducial_ = build_fiducial(spec_, lambda_);
        fiducial_dag_ = fiducial_.adjoint();
    }

    const FeatureMapSpec &spec() const { return spec_; }
    const sim::NoiseModel &noise() const { return noise_; }
    int n() const { return spec_.n; }

    /// D(x) V |0^n>
    sim::StateVector feature_state(std::span<const double> x) const {
        auto s = sim::run_circuit(fiducial_);
        sim::apply_circuit_inplace(s, build_embedding(spec_, x));
        return s;
    }

    /// Noisy readout distribution of the kernel circuit, starting from D(x2) V |0^n>.
    std::vector<double> distribution_from(sim::StateVector state,
                                          std::span<const double> x1) const {
        sim::apply_circuit_inplace(state, build_embedding(spec_, x1).adjoint());
        sim::apply_circuit_inplace(state, fiducial_dag_);
        return sim::outcome_distribution(state, noise_);
    }

    std::vector<double> distribution(std::span<const double> x1,
                                     std::span<const double> x2) const {
        return distribution_from(feature_state(x2), x1);
    }

    std::vector<double> profile_from(const sim::StateVector &state, std::span<const double> x1,
                                     std::uint64_t shots, std::uint64_t seed) const {
        const auto dist = distribution_from(state, x1);
        if (shots == 0) {
            return sim::weight_profile(dist);
        }
        return sim::weight_profile(sim::sample_counts(dist, shots, seed));
    }

    std::vector<double> profile(std::span<const double> x1, std::span<const double> x2,
                                std::uint64_t shots, std::uint64_t seed) const {
        return profile_from(feature_state(x2), x1, shots, seed);
    }

  private:
    FeatureMapSpec spec_;
    std::vector<double> lambda_;
    sim::NoiseModel noise_;
    sim::Circuit fiducial_;
    sim::Circuit fiducial_dag_;
};

inline double cumulative(std::span<const double> profile, int d) {
    double s = 0.0;
    for (int w = 0; w <= d && w < static_cast<int>(profile.size()); ++w) {
        s += profile[static_cast<std::size_t>(w)];
    }
    return std::clamp(s, 0.0, 1.0);
}

/// k^d(x1, x2) for matrix position (i, j); the seed depends only on (master_seed, i, j).
inline double estimate_entry(const FeatureMapSpec &spec, std::span<const double> x1,
                             std::span<const double> x2, std::span<const double> lambda,
                             const KernelConfig &config, const sim::NoiseModel &noise = {},
                             std::size_t i = 0, std::size_t j = 0,
                             SeedDomain domain = SeedDomain::Train) {
    config.validate(spec.n);
    const KernelEvaluator ev(spec, {lambda.begin(), lambda.end()}, noise);
    if (config.exact()) {
        return std::clamp(sim::mass_weight_leq(ev.distribution(x1, x2), config.d), 0.0, 1.0);
    }
    return cumulative(ev.profile(x1, x2, config.shots, entry_seed(config.master_seed, domain, i, j)),
                      config.d);
}

/// Per-entry Hamming-weight profiles; one set of samples serves every tolerance d.
class WeightProfiles {
  public:
    WeightProfiles(std::size_t rows, std::size_t cols, int n)
        : rows_(rows), cols_(cols), n_(n),
          data_(rows * cols * (static_cast<std::size_t>(n) + 1), 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    int n() const { return n_; }

    std::span<double> at(std::size_t i, std::size_t j) {
        return {data_.data() + offset(i, j), static_cast<std::size_t>(n_) + 1};
    }
    std::span<const double> at(std::size_t i, std::size_t j) const {
        return {data_.data() + offset(i, j), static_cast<std::size_t>(n_) + 1};
    }

    MatrixXd matrix(int d) const {
        require(d >= 0 && d <= n_, "tolerance d=" + std::to_string(d) + " outside [0, " +
                                       std::to_string(n_) + "]");
        MatrixXd m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    cumulative(at(i, j), d);
            }
        }
        return m;
    }

  private:
    std::size_t offset(std::size_t i, std::size_t j) const {
        return (i * cols_ + j) * (static_cast<std::size_t>(n_) + 1);
    }

    std::size_t rows_;
    std::size_t cols_;
    int n_;
    std::vector<double> data_;
};

namespace detail {

/// Samples are stored one per row; copies them out as contiguous vectors.
inline std::vector<std::vector<double>> rows_of(const MatrixXd &x) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        auto &r = out[static_cast<std::size_t>(i)];
        r.resize(static_cast<std::size_t>(x.cols()));
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            r[static_cast<std::size_t>(j)] = x(i, j);
        }
    }
    return out;
}

inline std::size_t binomial_prefix(int n, int d) {
    std::size_t total = 0;
    std::size_t c = 1;
    for (int k = 0; k <= d; ++k) {
        total += c;
        c = c * static_cast<std::size_t>(n - k) / static_cast<std::size_t>(k + 1);
    }
    return total;
}

inline std::vector<std::uint64_t> indices_weight_leq(int n, int d) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
        if (sim::hamming_weight(b) <= d) {
            out.push_back(b);
        }
    }
    return out;
}

/// Noiseless exact k^d via overlaps with D(x_i) V |b>, |b| <= d.
inline bool use_overlap_path(const KernelConfig &config, const sim::NoiseModel &noise, int n) {
    return config.exact() && noise.noiseless() &&
           binomial_prefix(n, config.d) <= 2 * static_cast<std::size_t>(n);
}

inline double overlap_mass(const std::vector<sim::StateVector> &bra_set,
                           const sim::StateVector &ket) {
    double s = 0.0;
    for (const auto &b : bra_set) {
        s += std::norm(sim::inner(b, ket));
    }
    return std::clamp(s, 0.0, 1.0);
}

inline std::vector<sim::StateVector> bra_states(const FeatureMapSpec &spec,
                                                std::span<const double> lambda,
                                                std::span<const double> x,
                                                const std::vector<std::uint64_t> &basis) {
    const auto v = build_fiducial(spec, lambda);
    const auto dx = build_embedding(spec, x);
    std::vector<sim::StateVector> out;
    out.reserve(basis.size());
    for (auto b : basis) {
        auto s = sim::StateVector::basis(spec.n, b);
        sim::apply_circuit_inplace(s, v);
        sim::apply_circuit_inplace(s, dx);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace detail

/**
 * Profiles for the square matrix of the samples in x (one per row). Only
 * i <= j is simulated; (j, i) is a copy.
 */
inline WeightProfiles assemble_profiles(const MatrixXd &x, const FeatureMapSpec &spec,
                                        std::span<const double> lambda,
                                        const KernelConfig &config,
                                        const sim::NoiseModel &noise = {}) {
    require(x.rows() > 0, "kernel assembly needs at least one sample");
    require(x.cols() == spec.n, "sample width does not match the feature map");
    const auto m = static_cast<std::size_t>(x.rows());
    const KernelEvaluator ev(spec, {lambda.begin(), lambda.end()}, noise);
    const auto rows = detail::rows_of(x);
    std::vector<sim::StateVector> kets;
    kets.reserve(m);
    for (const auto &r : rows) {
        kets.push_back(ev.feature_state(r));
    }
    std::vector<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = config.estimate_diagonal ? i : i + 1; j < m; ++j) {
            work.emplace_back(i, j);
        }
    }
    WeightProfiles out(m, m, spec.n);
    parallel_for(work.size(), [&](std::size_t k) {
        const auto [i, j] = work[k];
        const auto p = ev.profile_from(kets[j], rows[i], config.shots,
                                       entry_seed(config.master_seed, SeedDomain::Train, i, j));
        std::copy(p.begin(), p.end(), out.at(i, j).begin());
        if (i != j) {
            std::copy(p.begin(), p.end(), out.at(j, i).begin());
        }
    });
    if (!config.estimate_diagonal) {
        for (std::size_t i = 0; i < m; ++i) {
            out.at(i, i)[0] = 1.0;
        }
    }
    return out;
}

/// Profiles for rows of `test` against rows of `train`; no symmetry assumed.
inline WeightProfiles assemble_cross_profiles(const MatrixXd &test, const MatrixXd &train,
                                              const FeatureMapSpec &spec,
                                              std::span<const double> lambda,
                                              const KernelConfig &config,
                                              const sim::NoiseModel &noise = {}) {
    require(test.cols() == spec.n && train.cols() == spec.n,
            "sample width does not match the feature map");
    const auto mt = static_cast<std::size_t>(test.rows());
    const auto mr = static_cast<std::size_t>(train.rows());
    const KernelEvaluator ev(spec, {lambda.begin(), lambda.end()}, noise);
    const auto test_rows = detail::rows_of(test);
    const auto train_rows = detail::rows_of(train);
    std::vector<sim::StateVector> kets;
    kets.reserve(mr);
    for (const auto &r : train_rows) {
        kets.push_back(ev.feature_state(r));
    }
    WeightProfiles out(mt, mr, spec.n);
    parallel_for(mt * mr, [&](std::size_t k) {
        const std::size_t i = k / mr;
        const std::size_t j = k % mr;
        const auto p = ev.profile_from(kets[j], test_rows[i], config.shots,
                                       entry_seed(config.master_seed, SeedDomain::Cross, i, j));
        std::copy(p.begin(), p.end(), out.at(i, j).begin());
    });
    return out;
}

inline MatrixXd overlap_matrix(const MatrixXd &rows_x, const MatrixXd &cols_x,
                               const FeatureMapSpec &spec, std::span<const double> lambda,
                               int d, bool square, bool estimate_diagonal) {
    const auto basis = detail::indices_weight_leq(spec.n, d);
    const auto xr = detail::rows_of(rows_x);
    const auto xc = detail::rows_of(cols_x);
    const KernelEvaluator ev(spec, {lambda.begin(), lambda.end()});
    std::vector<sim::StateVector> kets;
    kets.reserve(xc.size());
    for (const auto &r : xc) {
        kets.push_back(ev.feature_state(r));
    }
    MatrixXd out(rows_x.rows(), cols_x.rows());
    parallel_for(xr.size(), [&](std::size_t i) {
        const auto bras = detail::bra_states(spec, lambda, xr[i], basis);
        const std::size_t j0 = square ? i : 0;
        for (std::size_t j = j0; j < xc.size(); ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            if (square && i == j && !estimate_diagonal) {
                out(ii, jj) = 1.0;
                continue;
            }
            out(ii, jj) = detail::overlap_mass(bras, kets[j]);
        }
    });
    if (square) {
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            for (Eigen::Index j = i + 1; j < out.cols(); ++j) {
                out(j, i) = out(i, j);
            }
        }
    }
    return out;
}

/// Raw symmetric BFT kernel matrix (no PSD repair).
inline KernelMatrixEstimate assemble_matrix(const MatrixXd &x, const FeatureMapSpec &spec,
                                            std::span<const double> lambda,
                                            const KernelConfig &config,
                                            const sim::NoiseModel &noise = {}) {
    config.validate(spec.n);
    noise.validate();
    require(x.rows() > 0, "kernel assembly needs at least one sample");
    require(x.cols() == spec.n, "sample width does not match the feature map");
    KernelMatrixEstimate est;
    est.d = config.d;
    est.shots = config.shots;
    if (detail::use_overlap_path(config, noise, spec.n)) {
        est.raw = overlap_matrix(x, x, spec, lambda, config.d, true, config.estimate_diagonal);
    } else {
        est.raw = assemble_profiles(x, spec, lambda, config, noise).matrix(config.d);
    }
    est.values = est.raw;
    est.min_eigenvalue_before = min_eigenvalue(est.raw);
    return est;
}

/// Projects the estimate onto the PSD cone when its raw matrix has a negative eigenvalue.
inline KernelMatrixEstimate repair(KernelMatrixEstimate est) {
    est.min_eigenvalue_before = min_eigenvalue(est.raw);
    est.psd_projected = est.min_eigenvalue_before < 0.0;
    est.values = est.psd_projected ? psd_project(est.raw) : est.raw;
    return est;
}

/// test x train kernel values; no symmetrization or repair.
inline MatrixXd assemble_cross_matrix(const MatrixXd &test, const MatrixXd &train,
                                      const FeatureMapSpec &spec, std::span<const double> lambda,
                                      const KernelConfig &config,
                                      const sim::NoiseModel &noise = {}) {
    config.validate(spec.n);
    noise.validate();
    if (detail::use_overlap_path(config, noise, spec.n)) {
        return overlap_matrix(test, train, spec, lambda, config.d, false, true);
    }
    return assemble_cross_profiles(test, train, spec, lambda, config, noise).matrix(config.d);
}

/**
 * ||M/||M||_F - P/||P||_F||_F with P the PSD projection of M. When P is zero
 * (M negative semidefinite) the distance is reported as 1.
 */
inline double psd_distance_normalized(const MatrixXd &m) {
    require_symmetric(m, "psd_distance input");
    const double nm = m.norm();
    if (nm == 0.0) {
        fail(ErrorKind::Degenerate, "psd distance of a zero matrix is undefined");
    }
    const MatrixXd p = psd_project(m);
    const double np = p.norm();
    if (np == 0.0) {
        return 1.0;
    }
    return (m / nm - p / np).norm();
}

inline double average_diagonal(const MatrixXd &m) {
    require(m.rows() == m.cols() && m.rows() > 0, "average_diagonal needs a nonempty square matrix");
    return m.diagonal().mean();
}

struct CalibrationPoint {
    int n = 0;
    int d = 0;
    double avg_diagonal = 0.0;
    double psd_distance = 0.0;
};

struct Recommendation {
    int n = 0;
    double threshold = 0.0;
    int recommended_d = 0;
    bool reachable = true;
};

struct CalibrationReport {
    std::vector<CalibrationPoint> points;
    std::vector<Recommendation> recommendations;

    /// Entry for (n, threshold); throws if absent.
    const Recommendation &recommendation(int n, double threshold) const {
        for (const auto &r : recommendations) {
            if (r.n == n && r.threshold == threshold) {
                return r;
            }
        }
        fail(ErrorKind::InvalidArgument, "no recommendation for n=" + std::to_string(n));
    }

    std::vector<CalibrationPoint> points_for(int n) const {
        std::vector<CalibrationPoint> out;
        for (const auto &p : points) {
            if (p.n == n) {
                out.push_back(p);
            }
        }
        return out;
    }
};

/// Slack on the threshold comparison so that exact ties are not lost to rounding.
inline constexpr double kThresholdSlack = 1e-12;

/// Smallest d whose avg_diagonal reaches the threshold; d = n with reachable = false otherwise.
inline Recommendation recommend_d(const std::vector<CalibrationPoint> &curve, double threshold) {
    require(!curve.empty(), "empty calibration curve");
    require(threshold > 0.0 && threshold <= 1.0,
            "calibration threshold must lie in (0, 1], got " + std::to_string(threshold));
    Recommendation r;
    r.n = curve.front().n;
    r.threshold = threshold;
    for (const auto &p : curve) {
        if (p.avg_diagonal >= threshold - kThresholdSlack) {
            r.recommended_d = p.d;
            r.reachable = true;
            return r;
        }
    }
    r.recommended_d = r.n;
    r.reachable = false;
    return r;
}

struct CalibrationOptions {
    std::vector<int> ns;
    sim::NoiseModel noise;
    std::uint64_t shots = 10000; // 0 selects exact mode
    std::vector<double> thresholds{0.9};
    int samples = 15;
    std::uint64_t seed = 0;
    AxisTriple axes;
};

/**
 * Calibration dataset for width n: `samples` feature vectors uniform in
 * [0, pi) and a fiducial parameter vector uniform in [0, 2 pi).
 */
inline std::pair<MatrixXd, std::vector<double>> calibration_inputs(int n, int samples,
                                                                   std::uint64_t seed) {
    Rng rng(derive_seed(seed, {0xca1, static_cast<std::uint64_t>(n)}));
    MatrixXd x(samples, n);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            x(i, j) = rng.uniform(0.0, std::numbers::pi);
        }
    }
    std::vector<double> lambda(3 * static_cast<std::size_t>(n));
    for (auto &v : lambda) {
        v = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    return {x, lambda};
}

/// avg_diagonal and psd_distance for every d in [0, n], from one set of samples per n.
inline CalibrationReport calibrate(const CalibrationOptions &opt) {
    require(!opt.ns.empty(), "calibration needs at least one qubit count");
    require(opt.samples >= 1, "calibration needs at least one sample");
    opt.noise.validate();
    for (double t : opt.thresholds) {
        require(t > 0.0 && t <= 1.0,
                "calibration threshold must lie in (0, 1], got " + std::to_string(t));
    }
    CalibrationReport report;
    for (int n : opt.ns) {
        const auto [x, lambda] = calibration_inputs(n, opt.samples, opt.seed);
        const auto spec = FeatureMapSpec::on_line(n, opt.axes);
        KernelConfig cfg;
        cfg.shots = opt.shots;
        cfg.master_seed = derive_seed(opt.seed, {static_cast<std::uint64_t>(n)});
        const auto profiles = assemble_profiles(x, spec, lambda, cfg, opt.noise);
        std::vector<CalibrationPoint> curve;
        for (int d = 0; d <= n; ++d) {
            const MatrixXd k = profiles.matrix(d);
            curve.push_back({n, d, average_diagonal(k), psd_distance_normalized(k)});
        }
        for (double t : opt.thresholds) {
            report.recommendations.push_back(recommend_d(curve, t));
        }
        report.points.insert(report.points.end(), curve.begin(), curve.end());
    }
    return report;
}

} // namespace qkbft
