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
#include "oracles.hpp"
#include "qkbft/kernel.hpp"

namespace {

using namespace qkbft;
constexpr double kPi = std::numbers::pi;

struct Fixture {
    FeatureMapSpec spec;
    std::vector<double> lambda;
    MatrixXd x;
};

Fixture random_fixture(int n, int m, std::uint64_t seed) {
    Rng rng(seed);
    Fixture f;
    f.spec = FeatureMapSpec::on_line(n);
    f.lambda.resize(f.spec.parameter_count());
    for (auto &v : f.lambda) {
        v = rng.uniform(-kPi, kPi);
    }
    f.x.resize(m, n);
    for (Eigen::Index i = 0; i < f.x.rows(); ++i) {
        for (Eigen::Index j = 0; j < f.x.cols(); ++j) {
            f.x(i, j) = rng.uniform(0.0, kPi);
        }
    }
    return f;
}

std::vector<double> row(const MatrixXd &x, Eigen::Index i) {
    return {x.row(i).begin(), x.row(i).end()};
}

TEST(Kernel, FullToleranceIsOne) {
    auto f = random_fixture(4, 3, 1);
    KernelConfig cfg;
    cfg.d = 4;
    cfg.shots = 0;
    const sim::NoiseModel nm{0.1, 0.2, 0.3};
    EXPECT_NEAR(estimate_entry(f.spec, row(f.x, 0), row(f.x, 1), f.lambda, cfg, nm), 1.0, 1e-12);
    cfg.shots = 500;
    EXPECT_NEAR(estimate_entry(f.spec, row(f.x, 0), row(f.x, 1), f.lambda, cfg, nm), 1.0, 1e-12);
}

TEST(Kernel, SelfOverlapIsOne) {
    auto f = random_fixture(5, 2, 2);
    KernelConfig cfg;
    cfg.shots = 0;
    for (int d = 0; d <= 5; ++d) {
        cfg.d = d;
        EXPECT_NEAR(estimate_entry(f.spec, row(f.x, 0), row(f.x, 0), f.lambda, cfg), 1.0, 1e-12);
    }
}

TEST(Kernel, IdentityCircuitBinomialOracle) {
    const auto spec = FeatureMapSpec::on_line(10);
    const std::vector<double> lambda(30, 0.4);
    const std::vector<double> x(10, 0.7);
    KernelConfig cfg;
    cfg.shots = 0;
    cfg.d = 1;
    sim::NoiseModel nm;
    nm.p01 = 0.02;
    const double v = estimate_entry(spec, x, x, lambda, cfg, nm);
    const double expected = std::pow(0.98, 10) + 10 * 0.02 * std::pow(0.98, 9);
    EXPECT_NEAR(v, expected, 1e-12);
    EXPECT_NEAR(v, 0.9838, 1e-4);
}

TEST(Kernel, ToleranceOutOfRange) {
    auto f = random_fixture(3, 2, 3);
    KernelConfig cfg;
    cfg.d = 4;
    EXPECT_THROW(estimate_entry(f.spec, row(f.x, 0), row(f.x, 1), f.lambda, cfg), Error);
    cfg.d = -1;
    EXPECT_THROW(assemble_matrix(f.x, f.spec, f.lambda, cfg), Error);
}

TEST(Kernel, MonotoneInTolerance) {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto f = random_fixture(5, 2, 100 + static_cast<std::uint64_t>(trial));
        const sim::NoiseModel nm{rng.uniform(0.0, 0.1), rng.uniform(0.0, 0.1), rng.uniform(0.0, 0.2)};
        for (std::uint64_t shots : {std::uint64_t{0}, std::uint64_t{2000}}) {
            KernelConfig cfg;
            cfg.shots = shots;
            cfg.master_seed = 9;
            double prev = -1.0;
            for (int d = 0; d <= 5; ++d) {
                cfg.d = d;
                const double v = estimate_entry(f.spec, row(f.x, 0), row(f.x, 1), f.lambda, cfg, nm, 0, 1);
                EXPECT_GE(v, prev);
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
                prev = v;
            }
        }
    }
}

TEST(Kernel, SingleSampleWithoutDiagonal) {
    auto f = random_fixture(3, 1, 4);
    KernelConfig cfg;
    cfg.estimate_diagonal = false;
    const auto k = assemble_matrix(f.x, f.spec, f.lambda, cfg, sim::NoiseModel{0.2, 0.0, 0.0});
    ASSERT_EQ(k.raw.rows(), 1);
    EXPECT_EQ(k.raw(0, 0), 1.0);
}

TEST(Kernel, MirroredEntriesBitIdentical) {
    auto f = random_fixture(4, 7, 6);
    for (std::uint64_t shots : {std::uint64_t{0}, std::uint64_t{300}}) {
        KernelConfig cfg;
        cfg.shots = shots;
        cfg.d = 1;
        const auto k = assemble_matrix(f.x, f.spec, f.lambda, cfg, sim::NoiseModel{0.05, 0.01, 0.0});
        for (Eigen::Index i = 0; i < k.raw.rows(); ++i) {
            for (Eigen::Index j = 0; j < k.raw.cols(); ++j) {
                EXPECT_EQ(k.raw(i, j), k.raw(j, i));
                EXPECT_GE(k.raw(i, j), 0.0);
                EXPECT_LE(k.raw(i, j), 1.0);
            }
        }
    }
}

TEST(Kernel, NoiselessGramIsPsd) {
    for (int d : {0, 1, 2}) {
        auto f = random_fixture(5, 12, 7 + static_cast<std::uint64_t>(d));
        KernelConfig cfg;
        cfg.shots = 0;
        cfg.d = d;
        const auto k = assemble_matrix(f.x, f.spec, f.lambda, cfg);
        if (d == 0) {
            EXPECT_GE(k.min_eigenvalue_before, -1e-9);
        }
        EXPECT_NEAR(average_diagonal(k.raw), 1.0, 1e-12);
    }
}

TEST(Kernel, FastPathMatchesFullSimulation) {
    auto f = random_fixture(6, 5, 8);
    for (int d : {0, 1, 3}) {
        KernelConfig cfg;
        cfg.shots = 0;
        cfg.d = d;
        const auto k = assemble_matrix(f.x, f.spec, f.lambda, cfg);
        // only the upper triangle is simulated; the lower one mirrors it
        for (Eigen::Index i = 0; i < f.x.rows(); ++i) {
            for (Eigen::Index j = i; j < f.x.rows(); ++j) {
                const auto dist = KernelEvaluator(f.spec, f.lambda).distribution(row(f.x, i), row(f.x, j));
                EXPECT_NEAR(k.raw(i, j), sim::mass_weight_leq(dist, d), 1e-12);
            }
        }
    }
}

TEST(Kernel, EntriesIndependentOfEvaluationOrder) {
    auto f = random_fixture(4, 6, 9);
    KernelConfig cfg;
    cfg.shots = 400;
    cfg.master_seed = 77;
    cfg.d = 1;
    const sim::NoiseModel nm{0.03, 0.01, 0.0};
    const auto before = default_threads();
    default_threads() = 1;
    const auto a = assemble_matrix(f.x, f.spec, f.lambda, cfg, nm);
    default_threads() = 4;
    const auto b = assemble_matrix(f.x, f.spec, f.lambda, cfg, nm);
    default_threads() = before;
    EXPECT_EQ(a.raw, b.raw);
    for (Eigen::Index i = 0; i < 6; ++i) {
        for (Eigen::Index j = i; j < 6; ++j) {
            EXPECT_EQ(a.raw(i, j), estimate_entry(f.spec, row(f.x, i), row(f.x, j), f.lambda, cfg, nm,
                                                  static_cast<std::size_t>(i),
                                                  static_cast<std::size_t>(j)));
        }
    }
}

TEST(Kernel, CrossMatrixMatchesSquare) {
    auto f = random_fixture(4, 5, 10);
    KernelConfig cfg;
    cfg.shots = 0;
    for (int d : {0, 2}) {
        cfg.d = d;
        const auto sq = assemble_matrix(f.x, f.spec, f.lambda, cfg);
        const auto cr = assemble_cross_matrix(f.x, f.x, f.spec, f.lambda, cfg);
        const MatrixXd upper = (sq.raw - cr).triangularView<Eigen::Upper>();
        EXPECT_LT(upper.cwiseAbs().maxCoeff(), 1e-12);
        if (d == 0) {
            EXPECT_LT((sq.raw - cr).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
    const auto one = assemble_cross_matrix(f.x.topRows(1), f.x, f.spec, f.lambda, cfg);
    EXPECT_NEAR(one(0, 0), 1.0, 1e-12);
    cfg.shots = 100;
    const auto noisy = assemble_cross_matrix(f.x, f.x.topRows(3), f.spec, f.lambda, cfg,
                                             sim::NoiseModel{0.1, 0.1, 0.1});
    EXPECT_GE(noisy.minCoeff(), 0.0);
    EXPECT_LE(noisy.maxCoeff(), 1.0);
}

TEST(Kernel, ProfilesServeEveryTolerance) {
    auto f = random_fixture(4, 4, 11);
    KernelConfig cfg;
    cfg.shots = 1000;
    cfg.master_seed = 5;
    const sim::NoiseModel nm{0.05, 0.0, 0.0};
    const auto prof = assemble_profiles(f.x, f.spec, f.lambda, cfg, nm);
    for (int d = 0; d <= 4; ++d) {
        cfg.d = d;
        EXPECT_EQ(prof.matrix(d), assemble_matrix(f.x, f.spec, f.lambda, cfg, nm).raw);
    }
}

TEST(PsdProject, KnownCases) {
    MatrixXd a(2, 2);
    a << 0, 1, 1, 0;
    const auto p = psd_project(a);
    EXPECT_NEAR((p - MatrixXd::Constant(2, 2, 0.5)).norm(), 0.0, 1e-12);
    MatrixXd b(2, 2);
    b << 1, 0, 0, -0.5;
    MatrixXd expected(2, 2);
    expected << 1, 0, 0, 0;
    EXPECT_NEAR((psd_project(b) - expected).norm(), 0.0, 1e-12);
    MatrixXd ns(2, 2);
    ns << 1, 2, 0, 1;
    EXPECT_THROW(psd_project(ns), Error);
}

TEST(PsdProject, Properties) {
    Rng rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 1 + static_cast<int>(rng.uniform_int(0, 12));
        const MatrixXd s = gen::random_symmetric(m, rng);
        const MatrixXd p = psd_project(s);
        EXPECT_GE(min_eigenvalue(p), -1e-9);
        EXPECT_LT((psd_project(p) - p).cwiseAbs().maxCoeff(), 1e-10);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                EXPECT_EQ(p(i, j), p(j, i));
            }
        }
        const MatrixXd psd = gen::random_psd(m, 3, rng);
        EXPECT_LT((psd_project(psd) - psd).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(PsdDistance, KnownCases) {
    MatrixXd a(2, 2);
    a << 0, 1, 1, 0;
    const double expected = (a / std::sqrt(2.0) - MatrixXd::Constant(2, 2, 0.5)).norm();
    EXPECT_NEAR(psd_distance_normalized(a), expected, 1e-12);
    EXPECT_NEAR(psd_distance_normalized(3.5 * a), expected, 1e-12);
    EXPECT_EQ(psd_distance_normalized(MatrixXd::Identity(3, 3)), 0.0);
    EXPECT_THROW(psd_distance_normalized(MatrixXd::Zero(2, 2)), Error);
}

TEST(PsdDistance, ScaleInvariant) {
    Rng rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        const MatrixXd s = gen::random_symmetric(6, rng);
        EXPECT_NEAR(psd_distance_normalized(s), psd_distance_normalized(7.0 * s), 1e-12);
    }
}

TEST(Repair, FlagsAndProjects) {
    KernelMatrixEstimate est;
    est.raw.resize(2, 2);
    est.raw << 1.0, 1.2, 1.2, 1.0;
    const auto r = repair(est);
    EXPECT_TRUE(r.psd_projected);
    EXPECT_NEAR(r.min_eigenvalue_before, -0.2, 1e-12);
    EXPECT_GE(min_eigenvalue(r.values), -1e-9);
    est.raw = MatrixXd::Identity(2, 2);
    const auto ok = repair(est);
    EXPECT_FALSE(ok.psd_projected);
    EXPECT_EQ(ok.values, ok.raw);
}

TEST(AverageDiagonal, Basics) {
    EXPECT_EQ(average_diagonal(MatrixXd::Identity(4, 4)), 1.0);
    MatrixXd m(2, 2);
    m << 0.5, 9, 9, 1.0;
    EXPECT_DOUBLE_EQ(average_diagonal(m), 0.75);
}

TEST(Calibration, NoiselessRecommendsZero) {
    CalibrationOptions opt;
    opt.ns = {3, 5};
    opt.shots = 0;
    opt.thresholds = {0.5, 0.9, 1.0};
    opt.samples = 5;
    const auto r = calibrate(opt);
    for (const auto &rec : r.recommendations) {
        EXPECT_EQ(rec.recommended_d, 0);
        EXPECT_TRUE(rec.reachable);
    }
    for (const auto &p : r.points) {
        EXPECT_NEAR(p.avg_diagonal, 1.0, 1e-12);
    }
}

TEST(Calibration, BinomialDiagonal) {
    CalibrationOptions opt;
    opt.ns = {4, 10};
    opt.shots = 0;
    opt.noise.p01 = 0.02;
    opt.thresholds = {0.9};
    opt.samples = 4;
    const auto r = calibrate(opt);
    for (const auto &p : r.points) {
        EXPECT_NEAR(p.avg_diagonal, oracle::binomial_cdf(p.n, 0.02, p.d), 1e-12);
    }
    EXPECT_EQ(r.recommendation(10, 0.9).recommended_d, 1);
    EXPECT_EQ(r.recommendation(4, 0.9).recommended_d, 0);
}

TEST(Calibration, DiagonalNondecreasingInTolerance) {
    CalibrationOptions opt;
    opt.ns = {6};
    opt.shots = 2000;
    opt.noise = {0.04, 0.01, 0.05};
    opt.samples = 4;
    const auto pts = calibrate(opt).points_for(6);
    for (std::size_t k = 1; k < pts.size(); ++k) {
        EXPECT_GE(pts[k].avg_diagonal, pts[k - 1].avg_diagonal);
    }
}

TEST(Calibration, RejectsBadThreshold) {
    CalibrationOptions opt;
    opt.ns = {3};
    opt.thresholds = {1.2};
    EXPECT_THROW(calibrate(opt), Error);
    opt.thresholds = {0.0};
    EXPECT_THROW(calibrate(opt), Error);
}

TEST(Calibration, UnreachableFlag) {
    const std::vector<CalibrationPoint> curve{{2, 0, 0.5, 0.0}, {2, 1, 0.7, 0.0}, {2, 2, 0.8, 0.0}};
    const auto r = recommend_d(curve, 0.9);
    EXPECT_FALSE(r.reachable);
    EXPECT_EQ(r.recommended_d, 2);
}

} // namespace
