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

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library code paths being checked.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// P(Binomial(n, p) <= d) by direct summation.
inline double binomial_cdf(int n, double p, int d) {
    double total = 0.0;
    for (int k = 0; k <= d && k <= n; ++k) {
        double c = 1.0;
        for (int i = 0; i < k; ++i) {
            c = c * (n - i) / (i + 1);
        }
        total += c * std::pow(p, k) * std::pow(1.0 - p, n - k);
    }
    return total;
}

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// 2x2 rotation exp(-i theta/2 P) for P in {X, Y, Z}.
inline CMat rotation(char axis, double theta) {
    const std::complex<double> i(0.0, 1.0);
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    CMat m(2, 2);
    if (axis == 'X') {
        m << c, -i * s, -i * s, c;
    } else if (axis == 'Y') {
        m << c, -s, s, c;
    } else {
        m << std::exp(-i * theta / 2.0), 0.0, 0.0, std::exp(i * theta / 2.0);
    }
    return m;
}

inline CMat kron(const CMat &a, const CMat &b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Full matrix of a single-qubit gate on qubit q of n (qubit 0 = least significant).
inline CMat embed(const CMat &g, int q, int n) {
    CMat out = CMat::Identity(1, 1);
    for (int k = n - 1; k >= 0; --k) {
        out = kron(out, k == q ? g : CMat::Identity(2, 2));
    }
    return out;
}

inline CMat cz(int a, int b, int n) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    CMat out = CMat::Identity(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        if (((k >> a) & 1) && ((k >> b) & 1)) {
            out(k, k) = -1.0;
        }
    }
    return out;
}

inline double dual_value(const Eigen::MatrixXd &k, const std::vector<int> &y,
                         const std::vector<double> &a) {
    double lin = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        lin += a[i];
        for (std::size_t j = 0; j < a.size(); ++j) {
            quad += a[i] * a[j] * y[i] * y[j] * k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return lin - 0.5 * quad;
}

/**
 * Exact maximizer of sum(a) - a^T Q a / 2 over 0 <= a <= C, y^T a = 0 by
 * enumerating every face of the box (each coordinate at 0, at C, or free).
 * On each face the stationary point of the equality-constrained problem comes
 * from one KKT solve; the best feasible one is the optimum. Only for small m.
 */
inline std::vector<double> brute_force_dual(const Eigen::MatrixXd &k, const std::vector<int> &y,
                                            double c) {
    const auto m = y.size();
    std::size_t faces = 1;
    for (std::size_t i = 0; i < m; ++i) {
        faces *= 3;
    }
    std::vector<double> best;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t code = 0; code < faces; ++code) {
        std::vector<double> a(m, 0.0);
        std::vector<std::size_t> free;
        std::size_t rest = code;
        for (std::size_t i = 0; i < m; ++i) {
            const auto state = rest % 3;
            rest /= 3;
            if (state == 1) {
                a[i] = c;
            } else if (state == 2) {
                free.push_back(i);
            }
        }
        double fixed_balance = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            fixed_balance += y[i] * a[i];
        }
        if (!free.empty()) {
            const auto f = static_cast<Eigen::Index>(free.size());
            Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(f + 1, f + 1);
            Eigen::VectorXd rhs(f + 1);
            for (Eigen::Index r = 0; r < f; ++r) {
                const auto i = free[static_cast<std::size_t>(r)];
                double g = 1.0;
                for (std::size_t j = 0; j < m; ++j) {
                    g -= y[i] * y[j] * k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * a[j];
                }
                rhs(r) = g;
                for (Eigen::Index s = 0; s < f; ++s) {
                    const auto j = free[static_cast<std::size_t>(s)];
                    sys(r, s) = y[i] * y[j] * k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                }
                sys(r, f) = y[i];
                sys(f, r) = y[i];
            }
            rhs(f) = -fixed_balance;
            const Eigen::VectorXd sol = sys.completeOrthogonalDecomposition().solve(rhs);
            if ((sys * sol - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) {
                continue;
            }
            for (Eigen::Index r = 0; r < f; ++r) {
                a[free[static_cast<std::size_t>(r)]] = sol(r);
            }
        } else if (std::abs(fixed_balance) > 1e-12) {
            continue;
        }
        const bool inside = std::all_of(a.begin(), a.end(), [&](double v) {
            return v >= -1e-12 && v <= c + 1e-12;
        });
        if (!inside) {
            continue;
        }
        const double value = dual_value(k, y, a);
        if (value > best_value) {
            best_value = value;
            best = a;
        }
    }
    return best;
}

/// All-pairs hop distances (infinity when disconnected) by Floyd-Warshall.
inline std::vector<std::vector<int>> hop_distances(int n,
                                                   const std::vector<std::pair<int, int>> &edges) {
    const int inf = std::numeric_limits<int>::max() / 4;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
    for (int i = 0; i < n; ++i) {
        d[i][i] = 0;
    }
    for (auto [u, v] : edges) {
        d[u][v] = d[v][u] = 1;
    }
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
            }
        }
    }
    return d;
}

} // namespace oracle
