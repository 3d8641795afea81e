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

// Seeded random inputs for property tests.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "qkbft/coupling.hpp"
#include "qkbft/random.hpp"
#include "qkbft/simcore.hpp"

namespace gen {

inline qkbft::sim::StateVector random_state(int n, qkbft::Rng &rng) {
    std::vector<std::complex<double>> a(std::size_t{1} << n);
    double norm = 0.0;
    for (auto &v : a) {
        v = {rng.normal(), rng.normal()};
        norm += std::norm(v);
    }
    for (auto &v : a) {
        v /= std::sqrt(norm);
    }
    return qkbft::sim::StateVector::from_amplitudes(std::move(a));
}

inline qkbft::sim::Circuit random_circuit(int n, int length, qkbft::Rng &rng) {
    qkbft::sim::Circuit c(n);
    for (int g = 0; g < length; ++g) {
        const auto kind = rng.uniform_int(0, n > 1 ? 3 : 2);
        const auto q = static_cast<int>(rng.uniform_int(0, n - 1));
        const double t = rng.uniform(-2 * std::numbers::pi, 2 * std::numbers::pi);
        switch (kind) {
        case 0:
            c.rx(q, t);
            break;
        case 1:
            c.ry(q, t);
            break;
        case 2:
            c.rz(q, t);
            break;
        default: {
            auto r = static_cast<int>(rng.uniform_int(0, n - 2));
            if (r >= q) {
                ++r;
            }
            c.cz(q, r);
        }
        }
    }
    return c;
}

inline Eigen::MatrixXd random_matrix(int rows, int cols, qkbft::Rng &rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(i, j) = rng.normal();
        }
    }
    return m;
}

inline Eigen::MatrixXd random_symmetric(int m, qkbft::Rng &rng) {
    const Eigen::MatrixXd a = random_matrix(m, m, rng);
    return 0.5 * (a + a.transpose());
}

/// Gram matrix of m random vectors in R^rank.
inline Eigen::MatrixXd random_psd(int m, int rank, qkbft::Rng &rng) {
    const Eigen::MatrixXd f = random_matrix(m, rank, rng);
    Eigen::MatrixXd k = f * f.transpose();
    return 0.5 * (k + k.transpose());
}

/// Labels in [0, classes) with every class present (requires m >= classes).
inline std::vector<int> random_labels(int m, int classes, qkbft::Rng &rng) {
    std::vector<int> y(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        y[static_cast<std::size_t>(i)] = i < classes ? i : static_cast<int>(rng.uniform_int(0, classes - 1));
    }
    rng.shuffle(y);
    return y;
}

/// Random connected graph: a random tree plus `extra` random edges.
inline qkbft::CouplingMap random_connected(int n, int extra, qkbft::Rng &rng) {
    std::set<std::pair<int, int>> e;
    for (int v = 1; v < n; ++v) {
        const auto u = static_cast<int>(rng.uniform_int(0, v - 1));
        e.emplace(u, v);
    }
    for (int k = 0; k < extra && n > 2; ++k) {
        const auto u = static_cast<int>(rng.uniform_int(0, n - 1));
        const auto v = static_cast<int>(rng.uniform_int(0, n - 1));
        if (u != v) {
            e.emplace(std::min(u, v), std::max(u, v));
        }
    }
    return {n, {e.begin(), e.end()}};
}

} // namespace gen
