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

#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "qkbft/error.hpp"
#include "qkbft/linalg.hpp"

namespace qkbft {

/// exp(-gamma ||a_i - b_j||^2) for rows of a and b.
inline MatrixXd rbf_cross(const MatrixXd &a, const MatrixXd &b, double gamma) {
    require(gamma > 0.0, "rbf gamma must be positive");
    require(a.cols() == b.cols(), "rbf inputs have different widths");
    MatrixXd k(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            k(i, j) = std::exp(-gamma * (a.row(i) - b.row(j)).squaredNorm());
        }
    }
    return k;
}

inline MatrixXd rbf_matrix(const MatrixXd &x, double gamma) {
    MatrixXd k = rbf_cross(x, x, gamma);
    return symmetrize(k);
}

/// g1 exp(-|a-b|^2 / (2 s1^2)) + g2 exp(-|a-b|^2 / (2 s2^2))
inline MatrixXd generalized_rbf_cross(const MatrixXd &a, const MatrixXd &b, double gamma1,
                                      double sigma1, double gamma2, double sigma2) {
    require(gamma1 > 0.0 && sigma1 > 0.0 && gamma2 > 0.0 && sigma2 > 0.0,
            "generalized rbf parameters must be positive");
    require(a.cols() == b.cols(), "kernel inputs have different widths");
    const double w1 = 1.0 / (2.0 * sigma1 * sigma1);
    const double w2 = 1.0 / (2.0 * sigma2 * sigma2);
    MatrixXd k(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            const double d2 = (a.row(i) - b.row(j)).squaredNorm();
            k(i, j) = gamma1 * std::exp(-w1 * d2) + gamma2 * std::exp(-w2 * d2);
        }
    }
    return k;
}

inline MatrixXd generalized_rbf_matrix(const MatrixXd &x, double gamma1, double sigma1,
                                       double gamma2, double sigma2) {
    return symmetrize(generalized_rbf_cross(x, x, gamma1, sigma1, gamma2, sigma2));
}

struct ClassicalKernelSpec {
    enum class Variant { Rbf, GeneralizedRbf };

    Variant variant = Variant::Rbf;
    double gamma = 1.0;
    double gamma1 = 1.0;
    double sigma1 = 1.0;
    double gamma2 = 1.0;
    double sigma2 = 1.0;

    static ClassicalKernelSpec rbf(double g) { return {Variant::Rbf, g, 1.0, 1.0, 1.0, 1.0}; }
    static ClassicalKernelSpec generalized(double g1, double s1, double g2, double s2) {
        return {Variant::GeneralizedRbf, 1.0, g1, s1, g2, s2};
    }

    void validate() const {
        if (variant == Variant::Rbf) {
            require(gamma > 0.0, "rbf gamma must be positive");
        } else {
            require(gamma1 > 0.0 && sigma1 > 0.0 && gamma2 > 0.0 && sigma2 > 0.0,
                    "generalized rbf parameters must be positive");
        }
    }

    MatrixXd matrix(const MatrixXd &x) const {
        validate();
        return variant == Variant::Rbf ? rbf_matrix(x, gamma)
                                       : generalized_rbf_matrix(x, gamma1, sigma1, gamma2, sigma2);
    }

    MatrixXd cross(const MatrixXd &a, const MatrixXd &b) const {
        validate();
        return variant == Variant::Rbf
                   ? rbf_cross(a, b, gamma)
                   : generalized_rbf_cross(a, b, gamma1, sigma1, gamma2, sigma2);
    }

    std::string name() const { return variant == Variant::Rbf ? "rbf" : "generalized_rbf"; }
};

} // namespace qkbft
