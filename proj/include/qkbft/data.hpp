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
 * Datasets: union-of-subspaces and covariant-coset generators, a bit-flip
 * code generator, CSV persistence, stratified splitting and standardization.
 */

#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <Eigen/Dense>

#include "qkbft/error.hpp"
#include "qkbft/linalg.hpp"
#include "qkbft/random.hpp"

namespace qkbft {

struct Dataset {
    MatrixXd features;                    // one sample per row
    std::vector<int> labels;              // index into class_names
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    std::vector<int> importance_order;    // feature indices, most important first

    std::size_t size() const { return labels.size(); }
    int n_features() const { return static_cast<int>(features.cols()); }
    int n_classes() const { return static_cast<int>(class_names.size()); }

    void validate() const {
        require(static_cast<std::size_t>(features.rows()) == labels.size(),
                "dataset has " + std::to_string(features.rows()) + " rows and " +
                    std::to_string(labels.size()) + " labels");
        require(feature_names.empty() ||
                    static_cast<int>(feature_names.size()) == n_features(),
                "feature name count does not match the feature count");
        require(features.allFinite(), "dataset contains non-finite values");
        std::vector<std::size_t> per_class(class_names.size(), 0);
        for (int l : labels) {
            require(l >= 0 && l < n_classes(), "label " + std::to_string(l) + " has no class");
            ++per_class[static_cast<std::size_t>(l)];
        }
        for (std::size_t c = 0; c < per_class.size(); ++c) {
            require(per_class[c] > 0, "class " + class_names[c] + " has no samples");
        }
        const auto order = importance();
        std::vector<char> seen(order.size(), 0);
        require(static_cast<int>(order.size()) == n_features(),
                "importance order length does not match the feature count");
        for (int f : order) {
            require(f >= 0 && f < n_features() && !seen[static_cast<std::size_t>(f)],
                    "importance order is not a permutation");
            seen[static_cast<std::size_t>(f)] = 1;
        }
    }

    /// importance_order, or the identity when unset.
    std::vector<int> importance() const {
        if (!importance_order.empty()) {
            return importance_order;
        }
        std::vector<int> id(static_cast<std::size_t>(n_features()));
        std::iota(id.begin(), id.end(), 0);
        return id;
    }

    Dataset subset(const std::vector<std::size_t> &rows) const {
        Dataset d;
        d.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            require(rows[r] < size(), "subset row out of range");
            d.features.row(static_cast<Eigen::Index>(r)) =
                features.row(static_cast<Eigen::Index>(rows[r]));
            d.labels.push_back(labels[rows[r]]);
        }
        d.class_names = class_names;
        d.feature_names = feature_names;
        d.importance_order = importance_order;
        return d;
    }

    /// Keeps only the given feature columns, in the given order.
    Dataset select_features(const std::vector<int> &cols) const {
        Dataset d;
        d.features.resize(features.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) {
            require(cols[c] >= 0 && cols[c] < n_features(), "feature index out of range");
            d.features.col(static_cast<Eigen::Index>(c)) = features.col(cols[c]);
            if (!feature_names.empty()) {
                d.feature_names.push_back(feature_names[static_cast<std::size_t>(cols[c])]);
            }
        }
        d.labels = labels;
        d.class_names = class_names;
        return d;
    }

    bool operator==(const Dataset &o) const {
        return features.rows() == o.features.rows() && features.cols() == o.features.cols() &&
               features == o.features && labels == o.labels && class_names == o.class_names &&
               feature_names == o.feature_names && importance() == o.importance();
    }
};

inline std::vector<std::string> default_names(const std::string &prefix, int count) {
    std::vector<std::string> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(prefix + std::to_string(i));
    }
    return out;
}

/// Haar-distributed orthogonal matrix; with `special`, determinant +1.
inline MatrixXd haar_orthogonal(int n, Rng &rng, bool special = true) {
    MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            g(i, j) = rng.normal();
        }
    }
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd q = qr.householderQ();
    const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) {
            q.col(j) = -q.col(j);
        }
    }
    if (special && n > 0 && q.determinant() < 0.0) {
        q.col(0) = -q.col(0);
    }
    return q;
}

/// Uniform point on the unit sphere of R^d.
inline VectorXd sphere_point(int d, Rng &rng) {
    VectorXd g(d);
    double norm = 0.0;
    while (norm == 0.0) {
        for (Eigen::Index i = 0; i < d; ++i) {
            g(i) = rng.normal();
        }
        norm = g.norm();
    }
    return g / norm;
}

struct SubspaceSpec {
    int ambient_dim = 10;
    std::vector<int> class_dims{2, 2, 2};
    int samples_per_class = 200;
    bool rotate = true;
    std::uint64_t seed = 0;

    void validate() const {
        require(ambient_dim >= 1, "ambient dimension must be positive");
        require(!class_dims.empty(), "at least one class is required");
        require(samples_per_class >= 1, "samples per class must be positive");
        int total = 0;
        for (int d : class_dims) {
            require(d >= 1, "subspace dimensions must be positive");
            total += d;
        }
        if (total > ambient_dim) {
            fail(ErrorKind::InvalidArgument,
                 "subspace dimensions sum to " + std::to_string(total) +
                     ", more than the ambient dimension " + std::to_string(ambient_dim));
        }
    }
};

/**
 * Orthonormal basis per class. Classes start as disjoint column blocks of one
 * Haar frame (mutually orthogonal); with `rotate`, every class after the
 * first is turned by its own Haar rotation inside the joint span, which
 * leaves them independent but no longer orthogonal.
 */
inline std::vector<MatrixXd> union_subspace_bases(const SubspaceSpec &spec) {
    spec.validate();
    Rng rng(derive_seed(spec.seed, {0xba5e}));
    const MatrixXd frame = haar_orthogonal(spec.ambient_dim, rng);
    const int total = std::accumulate(spec.class_dims.begin(), spec.class_dims.end(), 0);
    const MatrixXd joint = frame.leftCols(total);
    std::vector<MatrixXd> bases;
    int offset = 0;
    for (std::size_t c = 0; c < spec.class_dims.size(); ++c) {
        const int d = spec.class_dims[c];
        MatrixXd b = frame.middleCols(offset, d);
        offset += d;
        if (spec.rotate && c > 0) {
            const MatrixXd h = haar_orthogonal(total, rng);
            b = joint * (h * (joint.transpose() * b));
        }
        bases.push_back(std::move(b));
    }
    return bases;
}

/// Samples uniform on the unit sphere of each class subspace, class-major order.
inline Dataset gen_union_subspaces(const SubspaceSpec &spec) {
    const auto bases = union_subspace_bases(spec);
    Rng rng(derive_seed(spec.seed, {0x5a3}));
    Dataset ds;
    const auto nc = static_cast<int>(bases.size());
    ds.features.resize(static_cast<Eigen::Index>(nc) * spec.samples_per_class, spec.ambient_dim);
    Eigen::Index row = 0;
    for (int c = 0; c < nc; ++c) {
        const auto &b = bases[static_cast<std::size_t>(c)];
        for (int s = 0; s < spec.samples_per_class; ++s) {
            ds.features.row(row++) = (b * sphere_point(static_cast<int>(b.cols()), rng)).transpose();
            ds.labels.push_back(c);
        }
    }
    ds.class_names = default_names("", nc);
    ds.feature_names = default_names("x", spec.ambient_dim);
    return ds;
}

/**
 * Coset data x = s * theta * direction + offset[class] (tied mode, one integer
 * s per sample) or x_q = s_q * theta + offset[class][q] (independent integers
 * per qubit, when direction is empty).
 */
struct CovariantSpec {
    int n_qubits = 2;
    double theta = std::numbers::pi / 16;
    std::vector<double> direction;           // length n_qubits, or empty
    std::vector<std::vector<double>> offsets; // one vector of length n_qubits per class
    int s_min = 0;
    int s_max = 31;
    int samples_per_class = 20;
    std::uint64_t seed = 0;

    void validate() const {
        require(n_qubits >= 1, "covariant data needs at least one qubit");
        require(theta != 0.0 && std::isfinite(theta), "subgroup step must be nonzero");
        require(s_min <= s_max, "integer range is empty");
        require(samples_per_class >= 1, "samples per class must be positive");
        require(offsets.size() >= 1, "at least one class offset is required");
        require(direction.empty() || static_cast<int>(direction.size()) == n_qubits,
                "direction length must equal the qubit count");
        for (const auto &o : offsets) {
            require(static_cast<int>(o.size()) == n_qubits,
                    "class offset length must equal the qubit count");
        }
        for (std::size_t a = 0; a < offsets.size(); ++a) {
            for (std::size_t b = a + 1; b < offsets.size(); ++b) {
                if (same_coset(offsets[a], offsets[b])) {
                    fail(ErrorKind::InvalidArgument,
                         "class offsets " + std::to_string(a) + " and " + std::to_string(b) +
                             " differ by a multiple of the subgroup step");
                }
            }
        }
    }

  private:
    static bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

    bool same_coset(const std::vector<double> &a, const std::vector<double> &b) const {
        if (direction.empty()) {
            for (std::size_t q = 0; q < a.size(); ++q) {
                if (!is_integer((a[q] - b[q]) / theta)) {
                    return false;
                }
            }
            return true;
        }
        // tied: a - b must equal k * theta * direction for one integer k
        std::optional<double> k;
        for (std::size_t q = 0; q < a.size(); ++q) {
            const double diff = a[q] - b[q];
            if (direction[q] == 0.0) {
                if (std::abs(diff) > 1e-9) {
                    return false;
                }
                continue;
            }
            const double kq = diff / (theta * direction[q]);
            if (!is_integer(kq) || (k && std::abs(*k - kq) > 1e-9)) {
                return false;
            }
            k = kq;
        }
        return true;
    }
};

inline Dataset gen_covariant(const CovariantSpec &spec) {
    spec.validate();
    Rng rng(derive_seed(spec.seed, {0xc05e7}));
    const auto nc = static_cast<int>(spec.offsets.size());
    Dataset ds;
    ds.features.resize(static_cast<Eigen::Index>(nc) * spec.samples_per_class, spec.n_qubits);
    Eigen::Index row = 0;
    for (int c = 0; c < nc; ++c) {
        const auto &off = spec.offsets[static_cast<std::size_t>(c)];
        for (int s = 0; s < spec.samples_per_class; ++s) {
            if (spec.direction.empty()) {
                for (int q = 0; q < spec.n_qubits; ++q) {
                    const auto k = static_cast<double>(rng.uniform_int(spec.s_min, spec.s_max));
                    ds.features(row, q) = k * spec.theta + off[static_cast<std::size_t>(q)];
                }
            } else {
                const auto k = static_cast<double>(rng.uniform_int(spec.s_min, spec.s_max));
                for (int q = 0; q < spec.n_qubits; ++q) {
                    ds.features(row, q) =
                        k * spec.theta * spec.direction[static_cast<std::size_t>(q)] +
                        off[static_cast<std::size_t>(q)];
                }
            }
            ds.labels.push_back(c);
            ++row;
        }
    }
    ds.class_names = default_names("", nc);
    ds.feature_names = default_names("q", spec.n_qubits);
    return ds;
}

/**
 * Bit-flip codes: random codewords at pairwise Hamming distance >=
 * min_distance; every sample is its class codeword with `flips` distinct bits
 * inverted, no flip pattern repeated within a class. Features are pi * bit.
 */
struct FlipCodeSpec {
    int n_bits = 12;
    int n_classes = 3;
    int samples_per_class = 10;
    int min_distance = 6;
    int flips = 1;
    std::uint64_t seed = 0;
};

inline std::vector<std::uint64_t> flip_patterns(int n, int weight) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
        if (std::popcount(b) == weight) {
            out.push_back(b);
        }
    }
    return out;
}

inline Dataset gen_flip_codes(const FlipCodeSpec &spec) {
    require(spec.n_bits >= 1 && spec.n_bits <= 24, "flip codes need 1..24 bits");
    require(spec.n_classes >= 1 && spec.samples_per_class >= 1,
            "flip codes need positive class and sample counts");
    require(spec.flips >= 0 && spec.flips <= spec.n_bits, "flip count out of range");
    auto patterns = flip_patterns(spec.n_bits, spec.flips);
    require(static_cast<int>(patterns.size()) >= spec.samples_per_class,
            "not enough distinct flip patterns for the requested samples per class");
    Rng rng(derive_seed(spec.seed, {0xf11b}));
    std::vector<std::uint64_t> words;
    const auto top = static_cast<std::int64_t>((std::uint64_t{1} << spec.n_bits) - 1);
    for (int attempt = 0; static_cast<int>(words.size()) < spec.n_classes; ++attempt) {
        if (attempt > 100000) {
            fail(ErrorKind::InvalidArgument, "cannot place codewords at the requested distance");
        }
        const auto w = static_cast<std::uint64_t>(rng.uniform_int(0, top));
        const bool ok = std::all_of(words.begin(), words.end(), [&](std::uint64_t v) {
            return std::popcount(v ^ w) >= spec.min_distance;
        });
        if (ok) {
            words.push_back(w);
        }
    }
    Dataset ds;
    ds.features.resize(static_cast<Eigen::Index>(spec.n_classes) * spec.samples_per_class,
                       spec.n_bits);
    Eigen::Index row = 0;
    for (int c = 0; c < spec.n_classes; ++c) {
        rng.shuffle(patterns);
        for (int s = 0; s < spec.samples_per_class; ++s) {
            const auto bits = words[static_cast<std::size_t>(c)] ^ patterns[static_cast<std::size_t>(s)];
            for (int q = 0; q < spec.n_bits; ++q) {
                ds.features(row, q) = ((bits >> q) & 1U) ? std::numbers::pi : 0.0;
            }
            ds.labels.push_back(c);
            ++row;
        }
    }
    ds.class_names = default_names("", spec.n_classes);
    ds.feature_names = default_names("b", spec.n_bits);
    return ds;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
            cell.pop_back();
        }
        const auto first = cell.find_first_not_of(' ');
        out.push_back(first == std::string::npos ? std::string{} : cell.substr(first));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

inline bool parse_double(std::string_view s, double &v) {
    if (s.empty()) {
        return false;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && p == s.data() + s.size() && std::isfinite(v);
}

inline bool parse_long(std::string_view s, long long &v) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return !s.empty() && ec == std::errc{} && p == s.data() + s.size();
}

} // namespace detail

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, p};
}

/// Sorted class names: numerically when every name is an integer, else lexicographically.
inline std::vector<std::string> sorted_class_names(const std::set<std::string> &names) {
    std::vector<std::string> out(names.begin(), names.end());
    const bool numeric = std::all_of(out.begin(), out.end(), [](const std::string &s) {
        long long v = 0;
        return detail::parse_long(s, v);
    });
    if (numeric) {
        std::sort(out.begin(), out.end(), [](const std::string &a, const std::string &b) {
            long long x = 0;
            long long y = 0;
            detail::parse_long(a, x);
            detail::parse_long(b, y);
            return x < y;
        });
    }
    return out;
}

inline constexpr const char *kImportanceTag = "#importance";

/**
 * Header: feature names plus a "label" column in any position. An optional
 * row whose label cell is "#importance" gives each feature's rank
 * (0 = most important).
 */
inline Dataset read_csv(std::istream &in, const std::string &source = "<stream>") {
    const auto where = [&](int line) { return source + ":" + std::to_string(line) + ": "; };
    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \r") != std::string::npos) {
            header = detail::split_csv_line(line);
            break;
        }
    }
    if (header.empty()) {
        fail(ErrorKind::Parse, source + ": empty CSV file");
    }
    const auto label_it = std::find(header.begin(), header.end(), "label");
    if (label_it == header.end()) {
        fail(ErrorKind::Parse, where(line_no) + "header has no \"label\" column");
    }
    const auto label_col = static_cast<std::size_t>(label_it - header.begin());
    Dataset ds;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != label_col) {
            ds.feature_names.push_back(header[c]);
        }
    }
    const auto nf = ds.feature_names.size();
    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    std::vector<double> ranks;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \r") == std::string::npos) {
            continue;
        }
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size()) {
            fail(ErrorKind::Parse, where(line_no) + "expected " + std::to_string(header.size()) +
                                       " fields, found " + std::to_string(cells.size()));
        }
        std::vector<double> values;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label_col) {
                continue;
            }
            double v = 0.0;
            if (!detail::parse_double(cells[c], v)) {
                fail(ErrorKind::Parse, where(line_no) + "non-numeric value \"" + cells[c] +
                                           "\" in column " + header[c]);
            }
            values.push_back(v);
        }
        if (cells[label_col] == kImportanceTag) {
            if (!ranks.empty()) {
                fail(ErrorKind::Parse, where(line_no) + "duplicate importance row");
            }
            ranks = std::move(values);
            continue;
        }
        if (cells[label_col].empty()) {
            fail(ErrorKind::Parse, where(line_no) + "missing label");
        }
        rows.push_back(std::move(values));
        raw_labels.push_back(cells[label_col]);
    }
    if (rows.empty()) {
        fail(ErrorKind::Parse, source + ": no data rows");
    }
    ds.class_names = sorted_class_names({raw_labels.begin(), raw_labels.end()});
    std::map<std::string, int> class_id;
    for (std::size_t i = 0; i < ds.class_names.size(); ++i) {
        class_id[ds.class_names[i]] = static_cast<int>(i);
    }
    ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(nf));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < nf; ++c) {
            ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
        ds.labels.push_back(class_id[raw_labels[r]]);
    }
    if (!ranks.empty()) {
        std::vector<int> order(nf);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return ranks[static_cast<std::size_t>(a)] < ranks[static_cast<std::size_t>(b)];
        });
        for (std::size_t k = 0; k < nf; ++k) {
            if (ranks[static_cast<std::size_t>(order[k])] != static_cast<double>(k)) {
                fail(ErrorKind::Parse, source + ": importance ranks must be a permutation of 0.." +
                                           std::to_string(nf - 1));
            }
        }
        ds.importance_order = order;
    }
    ds.validate();
    return ds;
}

inline Dataset load_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::Io, "cannot open dataset " + path);
    }
    return read_csv(in, path);
}

inline void write_csv(const Dataset &ds, std::ostream &out) {
    ds.validate();
    const auto names =
        ds.feature_names.empty() ? default_names("x", ds.n_features()) : ds.feature_names;
    for (const auto &n : names) {
        require(n.find(',') == std::string::npos && n != "label",
                "feature name \"" + n + "\" cannot be written to CSV");
        out << n << ',';
    }
    out << "label\n";
    const auto order = ds.importance();
    bool identity = true;
    for (std::size_t k = 0; k < order.size(); ++k) {
        identity = identity && order[k] == static_cast<int>(k);
    }
    if (!identity) {
        std::vector<int> rank(order.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            rank[static_cast<std::size_t>(order[k])] = static_cast<int>(k);
        }
        for (int r : rank) {
            out << r << ',';
        }
        out << kImportanceTag << '\n';
    }
    for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
        for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
            out << format_double(ds.features(i, j)) << ',';
        }
        const auto &name = ds.class_names[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])];
        require(name.find(',') == std::string::npos && !name.empty() && name != kImportanceTag,
                "class name \"" + name + "\" cannot be written to CSV");
        out << name << '\n';
    }
}

inline void save_csv(const Dataset &ds, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorKind::Io, "cannot write dataset " + path);
    }
    write_csv(ds, out);
    if (!out) {
        fail(ErrorKind::Io, "write failed for " + path);
    }
}

// ---------------------------------------------------------------------------
// Splitting and scaling

struct Split {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_rows; // ascending
    std::vector<std::size_t> test_rows;  // ascending
};

/// Stratified split: round(fraction * class size) samples of each class go to train.
inline Split split(const Dataset &ds, double fraction, std::uint64_t seed) {
    require(fraction > 0.0 && fraction < 1.0, "split fraction must lie in (0, 1)");
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(ds.n_classes()));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
    }
    Rng rng(derive_seed(seed, {0x5b1}));
    Split s;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto &idx = by_class[c];
        if (idx.size() < 2) {
            fail(ErrorKind::InvalidArgument,
                 "class " + ds.class_names[c] + " has fewer than 2 samples and cannot be split");
        }
        rng.shuffle(idx);
        auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        s.train_rows.insert(s.train_rows.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        s.test_rows.insert(s.test_rows.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }
    std::sort(s.train_rows.begin(), s.train_rows.end());
    std::sort(s.test_rows.begin(), s.test_rows.end());
    s.train = ds.subset(s.train_rows);
    s.test = ds.subset(s.test_rows);
    return s;
}

/// Per-feature z-score fitted on one matrix and applied to others.
struct Standardizer {
    VectorXd mean;
    VectorXd scale;

    static Standardizer fit(const MatrixXd &x) {
        require(x.rows() > 0, "cannot standardize an empty matrix");
        Standardizer s;
        s.mean = x.colwise().mean().transpose();
        s.scale.resize(x.cols());
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double var = (x.col(j).array() - s.mean(j)).square().mean();
            s.scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
        }
        return s;
    }

    MatrixXd transform(const MatrixXd &x) const {
        require(x.cols() == mean.size(), "standardizer width mismatch");
        MatrixXd out = x;
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            out.col(j) = (x.col(j).array() - mean(j)) / scale(j);
        }
        return out;
    }
};

} // namespace qkbft
