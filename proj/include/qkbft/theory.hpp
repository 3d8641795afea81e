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
 * Executable checks of the covariance and subspace results: group-covariant
 * structures, the two-qubit Bell construction, sphere and principal-angle
 * Monte Carlo, and the R_X closed-form kernel experiment.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qkbft/align.hpp"
#include "qkbft/data.hpp"
#include "qkbft/error.hpp"
#include "qkbft/featuremap.hpp"
#include "qkbft/kernel.hpp"
#include "qkbft/parallel.hpp"
#include "qkbft/random.hpp"
#include "qkbft/simcore.hpp"

namespace qkbft::theory {

/// Fiducial state with subgroup generators and one coset representative per class.
struct CovariantStructure {
    sim::StateVector psi{0};
    std::vector<sim::Circuit> generators;
    std::vector<sim::Circuit> cosets;
};

struct CovarianceReport {
    double max_invariance_defect = 0.0; // 1 - |<psi|S|psi>| over generators
    double max_membership_defect = 0.0; // 1 - |<C_c psi|U psi>| over sampled unitaries
    double max_cross_overlap = 0.0;     // |<C_j psi|C_l psi>|, j != l
    std::vector<std::string> violations;

    bool passed() const { return violations.empty(); }
};

inline sim::StateVector applied(const sim::StateVector &psi, const sim::Circuit &c) {
    auto s = psi;
    sim::apply_circuit_inplace(s, c);
    return s;
}

/**
 * Checks that sampled unitaries of class c lie in the coset C_c S (up to a
 * phase on psi), that psi is phase-invariant under every generator, and that
 * distinct cosets map psi to orthogonal states.
 */
inline CovarianceReport check_covariance(const CovariantStructure &s,
                                         const std::vector<std::vector<sim::Circuit>> &samples,
                                         double tol = 1e-9) {
    require(samples.size() <= s.cosets.size(), "more sample classes than cosets");
    CovarianceReport r;
    for (std::size_t g = 0; g < s.generators.size(); ++g) {
        const double v = 1.0 - std::abs(sim::inner(s.psi, applied(s.psi, s.generators[g])));
        r.max_invariance_defect = std::max(r.max_invariance_defect, v);
        if (v > tol) {
            r.violations.push_back("generator " + std::to_string(g) + " moves the fiducial state");
        }
    }
    std::vector<sim::StateVector> images;
    for (const auto &c : s.cosets) {
        images.push_back(applied(s.psi, c));
    }
    for (std::size_t c = 0; c < samples.size(); ++c) {
        for (std::size_t k = 0; k < samples[c].size(); ++k) {
            const double v =
                1.0 - std::abs(sim::inner(images[c], applied(s.psi, samples[c][k])));
            r.max_membership_defect = std::max(r.max_membership_defect, v);
            if (v > tol) {
                r.violations.push_back("sample " + std::to_string(k) + " of class " +
                                       std::to_string(c) + " is outside its coset");
            }
        }
    }
    for (std::size_t a = 0; a < images.size(); ++a) {
        for (std::size_t b = a + 1; b < images.size(); ++b) {
            const double v = std::abs(sim::inner(images[a], images[b]));
            r.max_cross_overlap = std::max(r.max_cross_overlap, v);
            if (v > tol) {
                r.violations.push_back("cosets " + std::to_string(a) + " and " +
                                       std::to_string(b) + " are not orthogonal on the state");
            }
        }
    }
    return r;
}

/// (|00> + |11>)/sqrt(2)
inline sim::StateVector bell_state() {
    const double h = 1.0 / std::numbers::sqrt2;
    return sim::StateVector::from_amplitudes({h, 0.0, 0.0, h});
}

/// R_X(a) on qubit 0 and R_X(b) on qubit 1.
inline sim::Circuit rx_pair(double a, double b) {
    sim::Circuit c(2);
    c.rx(0, a).rx(1, b);
    return c;
}

/// Bell state, subgroup generated by R_X(t) x R_X(-t), cosets {I, I x R_X(pi)}.
inline CovariantStructure bell_structure(double step = std::numbers::pi / 16) {
    CovariantStructure s;
    s.psi = bell_state();
    s.generators.push_back(rx_pair(step, -step));
    s.cosets.push_back(sim::Circuit(2));
    s.cosets.push_back(rx_pair(0.0, std::numbers::pi));
    return s;
}

/// Covariant Bell data: class 0 angles (t, -t), class 1 angles (t, pi - t), t = s * pi/16.
inline Dataset bell_dataset(int samples_per_class = 20, std::uint64_t seed = 0) {
    CovariantSpec spec;
    spec.n_qubits = 2;
    spec.theta = std::numbers::pi / 16;
    spec.direction = {1.0, -1.0};
    spec.offsets = {{0.0, 0.0}, {0.0, std::numbers::pi}};
    spec.s_min = 0;
    spec.s_max = 31;
    spec.samples_per_class = samples_per_class;
    spec.seed = seed;
    return gen_covariant(spec);
}

/// Feature map for the Bell data: axes (Z, Y, X) on a 2-qubit line, unit angle scale.
inline FeatureMapSpec bell_feature_map() {
    return FeatureMapSpec::on_line(2, AxisTriple{Axis::Z, Axis::Y, Axis::X});
}

/**
 * Fiducial parameters preparing (|++> + i|-->)/sqrt(2) with bell_feature_map(),
 * a state that is as covariant for the Bell data as the Bell state itself.
 */
inline std::vector<double> bell_fiducial_parameters() {
    const double h = std::numbers::pi / 2;
    return {0.0, 0.0, h, 0.0, 0.0, h};
}

struct GroupCheck {
    bool passed = false;
    double max_deviation = 0.0;
};

/// Exact kernel on the dataset against the class-indicator kernel.
inline GroupCheck verify_prop_group(const Dataset &ds, const FeatureMapSpec &spec,
                                    const std::vector<double> &lambda, double tol = 1e-9) {
    KernelConfig cfg;
    cfg.shots = 0;
    const auto k = assemble_matrix(ds.features, spec, lambda, cfg).raw;
    const auto t = target_matrix(ds.labels);
    GroupCheck g;
    g.max_deviation = (k - t).cwiseAbs().maxCoeff();
    g.passed = g.max_deviation <= tol;
    return g;
}

/// |<psi|D(x)^dag D(x')|psi>|^2 with D = R_X on each qubit, for an explicit state.
inline double rx_state_kernel(const sim::StateVector &psi, std::span<const double> x1,
                              std::span<const double> x2) {
    sim::Circuit a(psi.n_qubits());
    sim::Circuit b(psi.n_qubits());
    for (int q = 0; q < psi.n_qubits(); ++q) {
        a.rx(q, x1[static_cast<std::size_t>(q)]);
        b.rx(q, x2[static_cast<std::size_t>(q)]);
    }
    return std::norm(sim::inner(applied(psi, a), applied(psi, b)));
}

// ---------------------------------------------------------------------------
// Monte Carlo helpers

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
};

/// Mean and standard error of f(rng) over `trials` draws, split into seeded chunks.
template <class Draw>
McEstimate monte_carlo(std::size_t trials, std::uint64_t seed, Draw &&draw) {
    require(trials >= 1, "Monte Carlo needs at least one trial");
    constexpr std::size_t kChunk = 1 << 14;
    const std::size_t chunks = (trials + kChunk - 1) / kChunk;
    std::vector<double> sum(chunks, 0.0);
    std::vector<double> sum_sq(chunks, 0.0);
    parallel_for(chunks, [&](std::size_t c) {
        Rng rng(derive_seed(seed, {c}));
        const std::size_t end = std::min(trials, (c + 1) * kChunk);
        double s = 0.0;
        double s2 = 0.0;
        for (std::size_t t = c * kChunk; t < end; ++t) {
            const double v = draw(rng);
            s += v;
            s2 += v * v;
        }
        sum[c] = s;
        sum_sq[c] = s2;
    });
    double s = 0.0;
    double s2 = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
        s += sum[c];
        s2 += sum_sq[c];
    }
    const auto n = static_cast<double>(trials);
    McEstimate e;
    e.trials = trials;
    e.mean = s / n;
    const double var = trials > 1 ? std::max(0.0, (s2 - n * e.mean * e.mean) / (n - 1.0)) : 0.0;
    e.std_error = std::sqrt(var / n);
    return e;
}

/// E[<x, x'>^2] for independent uniform points on the unit sphere of R^d.
inline McEstimate mc_sphere_inner(int d, std::size_t trials, std::uint64_t seed) {
    require(d >= 1, "sphere dimension must be positive");
    return monte_carlo(trials, seed, [d](Rng &rng) {
        const VectorXd a = sphere_point(d, rng);
        const VectorXd b = sphere_point(d, rng);
        const double ip = a.dot(b);
        return ip * ip;
    });
}

inline void require_orthonormal(const MatrixXd &b, const char *what) {
    if (b.cols() == 0 || b.cols() > b.rows() ||
        !(b.transpose() * b).isApprox(MatrixXd::Identity(b.cols(), b.cols()), 1e-8)) {
        fail(ErrorKind::InvalidArgument, std::string(what) + " is not an orthonormal basis");
    }
}

struct PrincipalAngles {
    std::vector<double> angles; // ascending, so cosines are nonincreasing
    MatrixXd u;                 // aligned basis of the first subspace
    MatrixXd v;                 // aligned basis of the second subspace
};

/// Angles from the singular values of B1^T B2; u, v are the matching principal vectors.
inline PrincipalAngles principal_angles(const MatrixXd &b1, const MatrixXd &b2) {
    require_orthonormal(b1, "first basis");
    require_orthonormal(b2, "second basis");
    require(b1.rows() == b2.rows(), "bases live in different ambient spaces");
    Eigen::JacobiSVD<MatrixXd> svd(b1.transpose() * b2, Eigen::ComputeFullU | Eigen::ComputeFullV);
    PrincipalAngles p;
    const auto k = std::min(b1.cols(), b2.cols());
    for (Eigen::Index i = 0; i < k; ++i) {
        p.angles.push_back(std::acos(std::clamp(svd.singularValues()(i), 0.0, 1.0)));
    }
    p.u = b1 * svd.matrixU();
    p.v = b2 * svd.matrixV();
    return p;
}

/// max |<u_i, v_j>| over i != j for the principal vectors.
inline double verify_orthogonality(const MatrixXd &b1, const MatrixXd &b2) {
    const auto p = principal_angles(b1, b2);
    const MatrixXd g = p.u.transpose() * p.v;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            if (i != j) {
                worst = std::max(worst, std::abs(g(i, j)));
            }
        }
    }
    return worst;
}

/// (1/d^2) sum cos^2(theta_j), the bound on the cross-subspace expectation.
inline double cross_bound(const std::vector<double> &angles, int d) {
    double s = 0.0;
    for (double t : angles) {
        s += std::cos(t) * std::cos(t);
    }
    return s / (static_cast<double>(d) * d);
}

inline McEstimate mc_pair_inner(const MatrixXd &bx, const MatrixXd &by, std::size_t trials,
                                std::uint64_t seed) {
    return monte_carlo(trials, seed, [&](Rng &rng) {
        const VectorXd x = bx * sphere_point(static_cast<int>(bx.cols()), rng);
        const VectorXd y = by * sphere_point(static_cast<int>(by.cols()), rng);
        const double ip = x.dot(y);
        return ip * ip;
    });
}

struct InequalityResult {
    McEstimate within;
    McEstimate cross;
    double bound = 0.0;        // (1/d^2) sum cos^2
    double separation = 0.0;   // (within - cross) / combined standard error
};

/// Two d-dimensional subspaces of R^ambient, orthogonal or randomly tilted.
inline InequalityResult classical_inequality(int d, int ambient, bool orthogonal,
                                             std::size_t trials, std::uint64_t seed) {
    SubspaceSpec spec;
    spec.ambient_dim = ambient;
    spec.class_dims = {d, d};
    spec.rotate = !orthogonal;
    spec.seed = seed;
    const auto bases = union_subspace_bases(spec);
    InequalityResult r;
    r.within = mc_pair_inner(bases[0], bases[0], trials, derive_seed(seed, {1}));
    r.cross = mc_pair_inner(bases[0], bases[1], trials, derive_seed(seed, {2}));
    r.bound = cross_bound(principal_angles(bases[0], bases[1]).angles, d);
    const double se = std::hypot(r.within.std_error, r.cross.std_error);
    r.separation = se > 0.0 ? (r.within.mean - r.cross.mean) / se
                            : (r.within.mean > r.cross.mean ? std::numeric_limits<double>::infinity() : 0.0);
    return r;
}

// ---------------------------------------------------------------------------
// R_X(2 pi x) kernel on |0^n>

/// prod_i cos^2(factor * (x_i - y_i)); factor = pi matches D(x) = prod R_X(2 pi x_i).
inline double closed_form_kernel(std::span<const double> x, std::span<const double> y,
                                 double factor = std::numbers::pi) {
    require(x.size() == y.size(), "closed form inputs differ in length");
    double k = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double c = std::cos(factor * (x[i] - y[i]));
        k *= c * c;
    }
    return k;
}

/// Same quantity by statevector simulation.
inline double statevector_rx_kernel(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "kernel inputs differ in length");
    const int n = static_cast<int>(x.size());
    sim::Circuit c(n);
    for (int q = 0; q < n; ++q) {
        c.rx(q, 2.0 * std::numbers::pi * y[static_cast<std::size_t>(q)]);
    }
    for (int q = 0; q < n; ++q) {
        c.rx(q, -2.0 * std::numbers::pi * x[static_cast<std::size_t>(q)]);
    }
    return std::norm(sim::run_circuit(c)[0]);
}

enum class SubspaceCase { Same, OrthogonalEqual, IndependentEqual, OrthogonalDouble, IndependentDouble };

inline const char *to_string(SubspaceCase c) {
    switch (c) {
    case SubspaceCase::Same:
        return "same";
    case SubspaceCase::OrthogonalEqual:
        return "orthogonal_equal";
    case SubspaceCase::IndependentEqual:
        return "independent_equal";
    case SubspaceCase::OrthogonalDouble:
        return "orthogonal_double";
    case SubspaceCase::IndependentDouble:
        return "independent_double";
    }
    return "?";
}

inline constexpr SubspaceCase kAllCases[] = {
    SubspaceCase::Same, SubspaceCase::OrthogonalEqual, SubspaceCase::IndependentEqual,
    SubspaceCase::OrthogonalDouble, SubspaceCase::IndependentDouble};

struct SubspaceRow {
    SubspaceCase which = SubspaceCase::Same;
    int dim_x = 0;
    int dim_y = 0;
    McEstimate estimate;
};

struct SubspaceExperiment {
    int ambient_factor = 3;     // ambient dimension = factor * dim
    bool random_frame = true;   // false: subspaces spanned by coordinate axes
    double factor = std::numbers::pi;
};

/**
 * E[k(x, y)] for x uniform on the unit sphere of X and y on that of Y, for the
 * five placements of Y. X and the orthogonal Y are column blocks of one frame;
 * the independent cases turn Y by a fixed Haar rotation of span(X, Y).
 */
inline std::vector<SubspaceRow> quantum_subspace_expectations(const std::vector<int> &dims,
                                                              std::size_t trials,
                                                              std::uint64_t seed,
                                                              const SubspaceExperiment &ex = {}) {
    require(ex.ambient_factor >= 3, "ambient factor must leave room for a double-size Y");
    std::vector<SubspaceRow> rows;
    for (int d : dims) {
        require(d >= 1, "subspace dimension must be positive");
        const int n = ex.ambient_factor * d;
        Rng rng(derive_seed(seed, {0xf16a, static_cast<std::uint64_t>(d)}));
        const MatrixXd frame =
            ex.random_frame ? haar_orthogonal(n, rng) : MatrixXd::Identity(n, n);
        const MatrixXd bx = frame.leftCols(d);
        const auto tilt = [&](const MatrixXd &by) {
            const auto span = static_cast<int>(d + by.cols());
            const MatrixXd joint = frame.leftCols(span);
            const MatrixXd h = haar_orthogonal(span, rng);
            return MatrixXd(joint * (h * (joint.transpose() * by)));
        };
        const MatrixXd y_eq = frame.middleCols(d, d);
        const MatrixXd y_dbl = frame.middleCols(d, 2 * d);
        const MatrixXd y_eq_tilt = tilt(y_eq);
        const MatrixXd y_dbl_tilt = tilt(y_dbl);
        for (auto which : kAllCases) {
            const MatrixXd *by = &bx;
            switch (which) {
            case SubspaceCase::Same:
                break;
            case SubspaceCase::OrthogonalEqual:
                by = &y_eq;
                break;
            case SubspaceCase::IndependentEqual:
                by = &y_eq_tilt;
                break;
            case SubspaceCase::OrthogonalDouble:
                by = &y_dbl;
                break;
            case SubspaceCase::IndependentDouble:
                by = &y_dbl_tilt;
                break;
            }
            const double factor = ex.factor;
            const auto est = monte_carlo(
                trials, derive_seed(seed, {static_cast<std::uint64_t>(d),
                                           static_cast<std::uint64_t>(which)}),
                [&](Rng &r) {
                    const VectorXd x = bx * sphere_point(d, r);
                    const VectorXd y = *by * sphere_point(static_cast<int>(by->cols()), r);
                    return closed_form_kernel(std::span<const double>(x.data(), x.size()),
                                              std::span<const double>(y.data(), y.size()),
                                              factor);
                });
            rows.push_back({which, d, static_cast<int>(by->cols()), est});
        }
    }
    return rows;
}

} // namespace qkbft::theory
