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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "qkbft/theory.hpp"

namespace {

using namespace qkbft;
using namespace qkbft::theory;
constexpr double kPi = std::numbers::pi;

std::vector<std::vector<sim::Circuit>> bell_samples(const Dataset &ds) {
    std::vector<std::vector<sim::Circuit>> out(2);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out[static_cast<std::size_t>(ds.labels[i])].push_back(
            rx_pair(ds.features(r, 0), ds.features(r, 1)));
    }
    return out;
}

TEST(Covariance, BellStructureHolds) {
    const auto ds = bell_dataset(20, 1);
    const auto report = check_covariance(bell_structure(), bell_samples(ds));
    EXPECT_TRUE(report.passed());
    EXPECT_LT(report.max_invariance_defect, 1e-12);
    EXPECT_LT(report.max_membership_defect, 1e-12);
    EXPECT_LT(report.max_cross_overlap, 1e-12);
}

TEST(Covariance, ProductStateFails) {
    auto s = bell_structure();
    s.psi = sim::StateVector(2);
    const auto report = check_covariance(s, bell_samples(bell_dataset(5, 2)));
    EXPECT_FALSE(report.passed());
    EXPECT_GT(report.max_invariance_defect, 1e-3);
}

TEST(Covariance, SwappedLabelsFail) {
    const auto ds = bell_dataset(5, 3);
    auto samples = bell_samples(ds);
    std::swap(samples[0], samples[1]);
    EXPECT_FALSE(check_covariance(bell_structure(), samples).passed());
}

TEST(Covariance, KernelIsClassIndicator) {
    const auto ds = bell_dataset(12, 4);
    const auto g = verify_prop_group(ds, bell_feature_map(), bell_fiducial_parameters());
    EXPECT_TRUE(g.passed);
    EXPECT_LT(g.max_deviation, 1e-9);
    const auto zero = verify_prop_group(ds, bell_feature_map(), std::vector<double>(6, 0.0));
    EXPECT_FALSE(zero.passed);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < ds.size(); ++j) {
            const auto a = ds.features.row(static_cast<Eigen::Index>(i));
            const auto b = ds.features.row(static_cast<Eigen::Index>(j));
            const std::vector<double> x(a.begin(), a.end());
            const std::vector<double> y(b.begin(), b.end());
            EXPECT_NEAR(rx_state_kernel(bell_state(), x, y), ds.labels[i] == ds.labels[j], 1e-12);
        }
    }
}

TEST(MonteCarlo, SphereInnerIsReciprocalDimension) {
    for (int d : {2, 5, 9}) {
        const auto e = mc_sphere_inner(d, 100000, 7);
        EXPECT_EQ(e.trials, 100000u);
        EXPECT_LE(std::abs(e.mean - 1.0 / d), 4.0 * e.std_error) << "d=" << d;
    }
}

TEST(MonteCarlo, ChunkedAndDeterministic) {
    const auto draw = [](Rng &rng) { return rng.uniform(); };
    const auto a = monte_carlo(40000, 3, draw);
    const auto b = monte_carlo(40000, 3, draw);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_NEAR(a.std_error, std::sqrt(1.0 / 12.0 / 40000.0), 1e-4);
    const auto c = monte_carlo(1, 3, draw);
    EXPECT_EQ(c.std_error, 0.0);
    EXPECT_THROW(monte_carlo(0, 3, draw), Error);
}

TEST(PrincipalAngles, KnownConfigurations) {
    MatrixXd e(3, 1);
    e << 1, 0, 0;
    MatrixXd f(3, 1);
    f << std::cos(0.3), std::sin(0.3), 0;
    EXPECT_NEAR(principal_angles(e, f).angles[0], 0.3, 1e-12);
    MatrixXd plane(3, 2);
    plane << 1, 0, 0, 1, 0, 0;
    const auto self = principal_angles(plane, plane).angles;
    EXPECT_NEAR(self[0], 0.0, 1e-7);
    EXPECT_NEAR(self[1], 0.0, 1e-7);
    MatrixXd z(3, 1);
    z << 0, 0, 1;
    EXPECT_NEAR(principal_angles(plane, z).angles[0], kPi / 2, 1e-12);
    EXPECT_THROW(principal_angles(2.0 * e, f), Error);
}

TEST(PrincipalAngles, PrincipalVectorsAreBiorthogonal) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SubspaceSpec spec;
        spec.ambient_dim = 12;
        spec.class_dims = {3, 4};
        spec.seed = seed;
        const auto b = union_subspace_bases(spec);
        EXPECT_LT(verify_orthogonality(b[0], b[1]), 1e-10);
        const auto p = principal_angles(b[0], b[1]);
        for (std::size_t k = 1; k < p.angles.size(); ++k) {
            EXPECT_LE(p.angles[k - 1], p.angles[k] + 1e-12);
        }
    }
}

TEST(Inequality, CrossMatchesBoundAndWithinIsReciprocal) {
    for (int d : {2, 4}) {
        for (bool orth : {true, false}) {
            const auto r = classical_inequality(d, 3 * d, orth, 100000, 11);
            EXPECT_LE(std::abs(r.within.mean - 1.0 / d), 4.0 * r.within.std_error);
            EXPECT_LE(std::abs(r.cross.mean - r.bound), 4.0 * r.cross.std_error + 1e-12);
            EXPECT_GT(r.separation, 3.0);
            if (orth) {
                EXPECT_NEAR(r.bound, 0.0, 1e-20);
            }
        }
    }
}

TEST(ClosedForm, MatchesStatevector) {
    Rng rng(12);
    for (int n : {1, 3, 6}) {
        for (int t = 0; t < 20; ++t) {
            std::vector<double> x(static_cast<std::size_t>(n));
            std::vector<double> y(static_cast<std::size_t>(n));
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] = rng.uniform(-1.0, 1.0);
                y[i] = rng.uniform(-1.0, 1.0);
            }
            EXPECT_NEAR(closed_form_kernel(x, y), statevector_rx_kernel(x, y), 1e-12);
        }
    }
    const std::vector<double> a{0.25};
    const std::vector<double> b{0.0};
    EXPECT_NEAR(closed_form_kernel(a, b), 0.5, 1e-15);
    EXPECT_GT(std::abs(closed_form_kernel(a, b, 1.0) - statevector_rx_kernel(a, b)), 0.1);
}

TEST(SubspaceExperiment, SameSubspaceDominates) {
    const auto rows = quantum_subspace_expectations({1, 2}, 20000, 13);
    ASSERT_EQ(rows.size(), 10u);
    for (std::size_t base = 0; base < rows.size(); base += 5) {
        EXPECT_EQ(rows[base].which, SubspaceCase::Same);
        EXPECT_EQ(rows[base + 3].dim_y, 2 * rows[base].dim_x);
        for (std::size_t k = 1; k < 5; ++k) {
            EXPECT_GT(rows[base].estimate.mean, rows[base + k].estimate.mean);
        }
    }
    SubspaceExperiment ex;
    ex.ambient_factor = 2;
    EXPECT_THROW(quantum_subspace_expectations({1}, 10, 0, ex), Error);
}

} // namespace
