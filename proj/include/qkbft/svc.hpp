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
 * C-SVC on precomputed kernels. The binary solver is SMO with second-order
 * working-set selection; multiclass prediction is one-vs-one voting.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qkbft/error.hpp"
#include "qkbft/linalg.hpp"
#include "qkbft/parallel.hpp"
#include "qkbft/random.hpp"

namespace qkbft {

struct SMOOptions {
    double tolerance = 1e-3;
    std::size_t max_iterations = 10'000'000;
};

struct BinarySVCModel {
    std::vector<double> alpha; // one per training sample
    std::vector<int> y;        // +1 / -1
    double bias = 0.0;
    double C = 1.0;
    std::vector<std::size_t> support; // indices with alpha > 0
    std::size_t iterations = 0;

    double coefficient(std::size_t i) const { return alpha[i] * y[i]; }
};

/// sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
inline double dual_objective(const MatrixXd &k, const std::vector<int> &y,
                             const std::vector<double> &alpha) {
    const auto m = alpha.size();
    double lin = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        lin += alpha[i];
        for (std::size_t j = 0; j < m; ++j) {
            quad += alpha[i] * alpha[j] * y[i] * y[j] *
                    k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return lin - 0.5 * quad;
}

namespace detail {

inline bool in_up(int y, double a, double c) { return (y > 0 && a < c) || (y < 0 && a > 0.0); }
inline bool in_low(int y, double a, double c) { return (y > 0 && a > 0.0) || (y < 0 && a < c); }

} // namespace detail

/// Maximal KKT violation max_{I_up} -y G - min_{I_low} -y G of a dual point.
inline double kkt_violation(const MatrixXd &k, const std::vector<int> &y,
                            const std::vector<double> &alpha, double c) {
    const auto m = alpha.size();
    double up = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < m; ++t) {
        double g = -1.0;
        for (std::size_t s = 0; s < m; ++s) {
            g += y[t] * y[s] * k(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) *
                 alpha[s];
        }
        const double v = -y[t] * g;
        if (detail::in_up(y[t], alpha[t], c)) {
            up = std::max(up, v);
        }
        if (detail::in_low(y[t], alpha[t], c)) {
            low = std::min(low, v);
        }
    }
    return std::max(0.0, up - low);
}

/// Dual C-SVC on a precomputed PSD kernel; labels must be +1 or -1 with both present.
inline BinarySVCModel fit_binary(const MatrixXd &k, const std::vector<int> &y, double c = 1.0,
                                 const SMOOptions &opt = {}) {
    const auto m = y.size();
    require(k.rows() == k.cols() && static_cast<std::size_t>(k.rows()) == m,
            "kernel shape does not match the label count");
    require(c > 0.0, "SVC regularization C must be positive");
    bool has_pos = false;
    bool has_neg = false;
    for (int v : y) {
        require(v == 1 || v == -1, "binary labels must be +1 or -1");
        has_pos = has_pos || v == 1;
        has_neg = has_neg || v == -1;
    }
    if (!has_pos || !has_neg) {
        fail(ErrorKind::InvalidArgument, "binary SVC needs samples of both classes");
    }
    constexpr double tau = 1e-12;
    const auto q = [&](std::size_t i, std::size_t j) {
        return y[i] * y[j] * k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    };
    BinarySVCModel model;
    model.y = y;
    model.C = c;
    model.alpha.assign(m, 0.0);
    auto &alpha = model.alpha;
    std::vector<double> grad(m, -1.0);

    std::size_t iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        // working set: i maximizes -y G over I_up, j minimizes the second-order gain over I_low
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = m;
        for (std::size_t t = 0; t < m; ++t) {
            if (detail::in_up(y[t], alpha[t], c) && -y[t] * grad[t] > gmax) {
                gmax = -y[t] * grad[t];
                i = t;
            }
        }
        double gmin = std::numeric_limits<double>::infinity();
        double best_obj = std::numeric_limits<double>::infinity();
        std::size_t j = m;
        for (std::size_t t = 0; t < m; ++t) {
            if (!detail::in_low(y[t], alpha[t], c)) {
                continue;
            }
            const double v = -y[t] * grad[t];
            gmin = std::min(gmin, v);
            if (i == m) {
                continue;
            }
            const double b = gmax - v;
            if (b > 0.0) {
                double a = q(i, i) + q(t, t) - 2.0 * y[i] * y[t] * q(i, t);
                if (a <= 0.0) {
                    a = tau;
                }
                const double obj = -(b * b) / a;
                if (obj < best_obj) {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        if (i == m || j == m || gmax - gmin < opt.tolerance) {
            break;
        }

        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        if (y[i] != y[j]) {
            double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if (quad <= 0.0) {
                quad = tau;
            }
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if (quad <= 0.0) {
                quad = tau;
            }
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_ai;
        const double dj = alpha[j] - old_aj;
        for (std::size_t t = 0; t < m; ++t) {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }
    model.iterations = iter;

    // bias: mean of y G over free vectors, else the midpoint of the feasible interval
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int n_free = 0;
    for (std::size_t t = 0; t < m; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] < 0) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
    model.bias = -rho;
    for (std::size_t t = 0; t < m; ++t) {
        if (alpha[t] > 0.0) {
            model.support.push_back(t);
        }
    }
    return model;
}

/// sum_i alpha_i y_i K(test, x_i) + bias for each row of k_cross (test x train).
inline std::vector<double> decision_function(const BinarySVCModel &model,
                                             const MatrixXd &k_cross) {
    if (static_cast<std::size_t>(k_cross.cols()) != model.alpha.size()) {
        fail(ErrorKind::InvalidArgument,
             "cross kernel has " + std::to_string(k_cross.cols()) + " columns, model has " +
                 std::to_string(model.alpha.size()) + " training samples");
    }
    std::vector<double> out(static_cast<std::size_t>(k_cross.rows()), model.bias);
    for (Eigen::Index r = 0; r < k_cross.rows(); ++r) {
        double s = model.bias;
        for (std::size_t i : model.support) {
            s += model.coefficient(i) * k_cross(r, static_cast<Eigen::Index>(i));
        }
        out[static_cast<std::size_t>(r)] = s;
    }
    return out;
}

/// Classifier for classes (pos, neg) trained on the samples listed in `indices`.
struct PairwiseModel {
    int pos = 0;
    int neg = 0;
    std::vector<std::size_t> indices;
    BinarySVCModel model;
};

struct MulticlassModel {
    std::vector<int> classes; // ascending
    std::vector<PairwiseModel> pairs;
    std::size_t n_train = 0;
};

struct Prediction {
    std::vector<int> labels;
    std::vector<std::vector<int>> votes; // per sample, per class position
};

inline std::vector<double> decision_function(const PairwiseModel &p, const MatrixXd &k_cross) {
    MatrixXd sub(k_cross.rows(), static_cast<Eigen::Index>(p.indices.size()));
    for (std::size_t c = 0; c < p.indices.size(); ++c) {
        sub.col(static_cast<Eigen::Index>(c)) = k_cross.col(static_cast<Eigen::Index>(p.indices[c]));
    }
    return decision_function(p.model, sub);
}

/// One binary model per unordered class pair, trained on the corresponding kernel sub-block.
inline MulticlassModel fit_multiclass(const MatrixXd &k, const std::vector<int> &labels,
                                      double c = 1.0, const SMOOptions &opt = {}) {
    require(k.rows() == k.cols() && static_cast<std::size_t>(k.rows()) == labels.size(),
            "kernel shape does not match the label count");
    MulticlassModel mc;
    mc.n_train = labels.size();
    std::set<int> cls(labels.begin(), labels.end());
    mc.classes.assign(cls.begin(), cls.end());
    require(mc.classes.size() >= 2, "multiclass SVC needs at least two classes");
    for (std::size_t a = 0; a < mc.classes.size(); ++a) {
        for (std::size_t b = a + 1; b < mc.classes.size(); ++b) {
            PairwiseModel p;
            p.pos = mc.classes[a];
            p.neg = mc.classes[b];
            mc.pairs.push_back(std::move(p));
        }
    }
    parallel_for(mc.pairs.size(), [&](std::size_t idx) {
        auto &p = mc.pairs[idx];
        std::vector<int> y;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == p.pos || labels[i] == p.neg) {
                p.indices.push_back(i);
                y.push_back(labels[i] == p.pos ? 1 : -1);
            }
        }
        MatrixXd sub(static_cast<Eigen::Index>(p.indices.size()),
                     static_cast<Eigen::Index>(p.indices.size()));
        for (std::size_t r = 0; r < p.indices.size(); ++r) {
            for (std::size_t s = 0; s < p.indices.size(); ++s) {
                sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) =
                    k(static_cast<Eigen::Index>(p.indices[r]),
                      static_cast<Eigen::Index>(p.indices[s]));
            }
        }
        p.model = fit_binary(sub, y, c, opt);
    });
    return mc;
}

/**
 * Majority vote over pairwise classifiers (positive decision votes for the
 * pair's first class). Ties go to the larger sum of |decision| over the votes
 * a class received, then to the lower class.
 */
inline Prediction predict_detailed(const MulticlassModel &mc, const MatrixXd &k_cross) {
    require(static_cast<std::size_t>(k_cross.cols()) == mc.n_train,
            "cross kernel column count does not match the training set");
    const auto rows = static_cast<std::size_t>(k_cross.rows());
    const auto nc = mc.classes.size();
    std::map<int, std::size_t> pos_of;
    for (std::size_t i = 0; i < nc; ++i) {
        pos_of[mc.classes[i]] = i;
    }
    std::vector<std::vector<int>> votes(rows, std::vector<int>(nc, 0));
    std::vector<std::vector<double>> strength(rows, std::vector<double>(nc, 0.0));
    for (const auto &p : mc.pairs) {
        const auto dec = decision_function(p, k_cross);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t w = dec[r] > 0.0 ? pos_of[p.pos] : pos_of[p.neg];
            votes[r][w] += 1;
            strength[r][w] += std::abs(dec[r]);
        }
    }
    Prediction out;
    out.labels.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < nc; ++c) {
            if (votes[r][c] > votes[r][best] ||
                (votes[r][c] == votes[r][best] && strength[r][c] > strength[r][best])) {
                best = c;
            }
        }
        out.labels[r] = mc.classes[best];
    }
    out.votes = std::move(votes);
    return out;
}

inline std::vector<int> predict(const MulticlassModel &mc, const MatrixXd &k_cross) {
    return predict_detailed(mc, k_cross).labels;
}

inline double accuracy(const std::vector<int> &predicted, const std::vector<int> &truth) {
    require(predicted.size() == truth.size() && !truth.empty(),
            "accuracy needs equally sized nonempty label vectors");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        hit += predicted[i] == truth[i] ? 1 : 0;
    }
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

/// Stratified fold id per sample: each class is shuffled and dealt round-robin.
inline std::vector<int> stratified_folds(const std::vector<int> &labels, int folds,
                                         std::uint64_t seed) {
    require(folds >= 2, "cross-validation needs at least two folds");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[labels[i]].push_back(i);
    }
    std::vector<int> fold(labels.size(), 0);
    Rng rng(derive_seed(seed, {0xf01d}));
    int next = 0;
    for (auto &[cls, idx] : by_class) {
        rng.shuffle(idx);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            fold[idx[k]] = next;
            next = (next + 1) % folds;
        }
    }
    return fold;
}

struct CrossValidation {
    int folds = 5;
    std::uint64_t seed = 0;
    double C = 1.0; // used when a grid point has no C of its own
};

template <class Param> struct GridSearchResult {
    std::size_t best_index = 0;
    Param best;
    std::vector<double> scores; // mean fold accuracy per grid point
};

namespace detail {

inline MatrixXd take(const MatrixXd &k, const std::vector<std::size_t> &rows,
                     const std::vector<std::size_t> &cols) {
    MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                k(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
        }
    }
    return out;
}

} // namespace detail

/// Mean stratified k-fold accuracy of a multiclass SVC on a full kernel matrix.
inline double cross_val_accuracy(const MatrixXd &k, const std::vector<int> &labels, double c,
                                 const std::vector<int> &fold, int folds) {
    double total = 0.0;
    int used = 0;
    for (int f = 0; f < folds; ++f) {
        std::vector<std::size_t> tr;
        std::vector<std::size_t> te;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            (fold[i] == f ? te : tr).push_back(i);
        }
        if (te.empty()) {
            continue;
        }
        std::vector<int> ytr;
        std::vector<int> yte;
        for (auto i : tr) {
            ytr.push_back(labels[i]);
        }
        for (auto i : te) {
            yte.push_back(labels[i]);
        }
        if (std::set<int>(ytr.begin(), ytr.end()).size() < 2) {
            continue;
        }
        const auto model = fit_multiclass(detail::take(k, tr, tr), ytr, c);
        total += accuracy(predict(model, detail::take(k, te, tr)), yte);
        ++used;
    }
    require(used > 0, "no usable cross-validation fold");
    return total / used;
}

/**
 * Grid point with the best mean cross-validated accuracy; ties go to the
 * earlier point. kernel_of(param) returns the full kernel over all samples.
 * A grid point with a member C overrides cv.C.
 */
template <class Param, class KernelFn>
GridSearchResult<Param> grid_search(const std::vector<Param> &grid, KernelFn &&kernel_of,
                                    const std::vector<int> &labels,
                                    const CrossValidation &cv = {}) {
    require(!grid.empty(), "grid search needs a nonempty grid");
    const auto fold = stratified_folds(labels, cv.folds, cv.seed);
    GridSearchResult<Param> r;
    r.scores.resize(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double c = cv.C;
        if constexpr (requires { grid[g].C; }) {
            c = grid[g].C;
        }
        r.scores[g] = cross_val_accuracy(kernel_of(grid[g]), labels, c, fold, cv.folds);
        if (r.scores[g] > r.scores[r.best_index]) {
            r.best_index = g;
        }
    }
    r.best = grid[r.best_index];
    return r;
}

} // namespace qkbft
