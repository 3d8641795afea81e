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

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "qkbft/error.hpp"

namespace qkbft {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline bool is_symmetric(const MatrixXd &m, double tol = 0.0) {
    if (m.rows() != m.cols()) {
        return false;
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
            if (std::abs(m(i, j) - m(j, i)) > tol * scale) {
                return false;
            }
        }
    }
    return true;
}

inline void require_symmetric(const MatrixXd &m, const char *what) {
    if (!is_symmetric(m, 1e-10)) {
        fail(ErrorKind::InvalidArgument, std::string(what) + " must be a symmetric matrix");
    }
}

inline double min_eigenvalue(const MatrixXd &m) {
    require_symmetric(m, "min_eigenvalue input");
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

/// Average of m and its transpose; mirrored entries are bit-identical afterwards.
inline MatrixXd symmetrize(const MatrixXd &m) {
    MatrixXd s = m;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

/**
 * Nearest PSD matrix in Frobenius norm: negative eigenvalues clipped to zero.
 * A matrix that is already PSD is returned as is.
 */
inline MatrixXd psd_project(const MatrixXd &m) {
    require_symmetric(m, "psd_project input");
    if (m.size() == 0) {
        return m;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    const VectorXd &w = es.eigenvalues();
    if (w.minCoeff() >= 0.0) {
        return m;
    }
    const MatrixXd &v = es.eigenvectors();
    return symmetrize(v * w.cwiseMax(0.0).asDiagonal() * v.transpose());
}

/// Symmetric square root of the PSD part of m.
inline MatrixXd sym_sqrt(const MatrixXd &m) {
    require_symmetric(m, "sym_sqrt input");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    const MatrixXd &v = es.eigenvectors();
    return symmetrize(v * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                      v.transpose());
}

} // namespace qkbft
