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
 * Plain-text records for kernel matrices, calibration reports, alignment
 * traces, fitted models and subspace-expectation tables. Every number goes
 * through format_double, so files reproduce byte for byte.
 */

#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qkbft/align.hpp"
#include "qkbft/data.hpp"
#include "qkbft/error.hpp"
#include "qkbft/kernel.hpp"
#include "qkbft/svc.hpp"
#include "qkbft/theory.hpp"

namespace qkbft::io {

inline std::ofstream open_out(const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorKind::Io, "cannot write " + path);
    }
    return out;
}

inline std::ifstream open_in(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::Io, "cannot open " + path);
    }
    return in;
}

/// Reads a comma-separated table with one header row; blank lines are skipped.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> lines; // source line of each row

    std::size_t column(const std::string &name, const std::string &source) const {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == name) {
                return c;
            }
        }
        fail(ErrorKind::Parse, source + ": missing column \"" + name + "\"");
    }
};

inline Table read_table(std::istream &in, const std::string &source) {
    Table t;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \r") == std::string::npos) {
            continue;
        }
        auto cells = detail::split_csv_line(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size()) {
            fail(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": expected " +
                                       std::to_string(t.header.size()) + " fields, found " +
                                       std::to_string(cells.size()));
        }
        t.rows.push_back(std::move(cells));
        t.lines.push_back(line_no);
    }
    if (t.header.empty()) {
        fail(ErrorKind::Parse, source + ": empty file");
    }
    return t;
}

inline double cell_double(const Table &t, std::size_t r, std::size_t c, const std::string &source) {
    double v = 0.0;
    if (!detail::parse_double(t.rows[r][c], v)) {
        fail(ErrorKind::Parse, source + ":" + std::to_string(t.lines[r]) + ": bad number \"" +
                                   t.rows[r][c] + "\"");
    }
    return v;
}

inline long long cell_long(const Table &t, std::size_t r, std::size_t c, const std::string &source) {
    long long v = 0;
    if (!detail::parse_long(t.rows[r][c], v)) {
        fail(ErrorKind::Parse, source + ":" + std::to_string(t.lines[r]) + ": bad integer \"" +
                                   t.rows[r][c] + "\"");
    }
    return v;
}

// ---------------------------------------------------------------------------
// kernel matrices: header "id,<col ids>", then one row per sample

struct KernelTable {
    MatrixXd values;
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
};

inline std::vector<std::string> sample_ids(std::size_t count, const std::string &prefix = "s") {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < count; ++i) {
        ids.push_back(prefix + std::to_string(i));
    }
    return ids;
}

inline void write_kernel(const MatrixXd &k, std::ostream &out,
                         std::vector<std::string> row_ids = {},
                         std::vector<std::string> col_ids = {}) {
    if (row_ids.empty()) {
        row_ids = sample_ids(static_cast<std::size_t>(k.rows()));
    }
    if (col_ids.empty()) {
        col_ids = sample_ids(static_cast<std::size_t>(k.cols()));
    }
    require(row_ids.size() == static_cast<std::size_t>(k.rows()) &&
                col_ids.size() == static_cast<std::size_t>(k.cols()),
            "kernel id lists do not match the matrix shape");
    out << "id";
    for (const auto &c : col_ids) {
        out << ',' << c;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        out << row_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            out << ',' << format_double(k(i, j));
        }
        out << '\n';
    }
}

inline KernelTable read_kernel(std::istream &in, const std::string &source = "<kernel>") {
    const auto t = read_table(in, source);
    if (t.header.front() != "id") {
        fail(ErrorKind::Parse, source + ": kernel header must start with \"id\"");
    }
    KernelTable k;
    k.col_ids.assign(t.header.begin() + 1, t.header.end());
    k.values.resize(static_cast<Eigen::Index>(t.rows.size()),
                    static_cast<Eigen::Index>(k.col_ids.size()));
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        k.row_ids.push_back(t.rows[r][0]);
        for (std::size_t c = 1; c < t.header.size(); ++c) {
            k.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) =
                cell_double(t, r, c, source);
        }
    }
    return k;
}

// ---------------------------------------------------------------------------
// calibration

inline void write_calibration(const CalibrationReport &r, std::ostream &out) {
    out << "n,d,avg_diagonal,psd_distance\n";
    for (const auto &p : r.points) {
        out << p.n << ',' << p.d << ',' << format_double(p.avg_diagonal) << ','
            << format_double(p.psd_distance) << '\n';
    }
}

inline void write_recommendations(const CalibrationReport &r, std::ostream &out) {
    out << "n,threshold,recommended_d,reachable\n";
    for (const auto &x : r.recommendations) {
        out << x.n << ',' << format_double(x.threshold) << ',' << x.recommended_d << ','
            << (x.reachable ? 1 : 0) << '\n';
    }
}

inline std::vector<CalibrationPoint> read_calibration(std::istream &in,
                                                      const std::string &source = "<calibration>") {
    const auto t = read_table(in, source);
    const auto cn = t.column("n", source);
    const auto cd = t.column("d", source);
    const auto ca = t.column("avg_diagonal", source);
    const auto cp = t.column("psd_distance", source);
    std::vector<CalibrationPoint> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out.push_back({static_cast<int>(cell_long(t, r, cn, source)),
                       static_cast<int>(cell_long(t, r, cd, source)),
                       cell_double(t, r, ca, source), cell_double(t, r, cp, source)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// alignment traces: iteration,loss,lambda0,...

inline void write_trace(const AlignmentTrace &trace, std::ostream &out) {
    require(!trace.entries.empty(), "cannot write an empty trace");
    out << "iteration,loss";
    for (std::size_t p = 0; p < trace.entries.front().lambda.size(); ++p) {
        out << ",lambda" << p;
    }
    out << '\n';
    for (const auto &e : trace.entries) {
        out << e.iteration << ',' << format_double(e.loss);
        for (double v : e.lambda) {
            out << ',' << format_double(v);
        }
        out << '\n';
    }
}

inline std::vector<TraceEntry> read_trace(std::istream &in, const std::string &source = "<trace>") {
    const auto t = read_table(in, source);
    if (t.header.size() < 3 || t.header[0] != "iteration" || t.header[1] != "loss") {
        fail(ErrorKind::Parse, source + ": trace header must be iteration,loss,lambda...");
    }
    std::vector<TraceEntry> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        TraceEntry e;
        e.iteration = static_cast<int>(cell_long(t, r, 0, source));
        e.loss = cell_double(t, r, 1, source);
        for (std::size_t c = 2; c < t.header.size(); ++c) {
            e.lambda.push_back(cell_double(t, r, c, source));
        }
        out.push_back(std::move(e));
    }
    if (out.empty()) {
        fail(ErrorKind::Parse, source + ": trace has no entries");
    }
    return out;
}

/// Single parameter vector, one value per line under a "lambda" header.
inline void write_parameters(const std::vector<double> &lambda, std::ostream &out) {
    out << "lambda\n";
    for (double v : lambda) {
        out << format_double(v) << '\n';
    }
}

inline std::vector<double> read_parameters(std::istream &in,
                                           const std::string &source = "<parameters>") {
    const auto t = read_table(in, source);
    const auto c = t.column("lambda", source);
    std::vector<double> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out.push_back(cell_double(t, r, c, source));
    }
    return out;
}

// ---------------------------------------------------------------------------
// multiclass models: pair_pos,pair_neg,kind,index,value

inline void write_model(const MulticlassModel &mc, std::ostream &out) {
    out << "pair_pos,pair_neg,kind,index,value\n";
    out << "-1,-1,n_train,-1," << mc.n_train << '\n';
    for (std::size_t c = 0; c < mc.classes.size(); ++c) {
        out << "-1,-1,class," << c << ',' << mc.classes[c] << '\n';
    }
    for (const auto &p : mc.pairs) {
        const auto head = std::to_string(p.pos) + ',' + std::to_string(p.neg) + ',';
        out << head << "C,-1," << format_double(p.model.C) << '\n';
        out << head << "bias,-1," << format_double(p.model.bias) << '\n';
        for (std::size_t k = 0; k < p.indices.size(); ++k) {
            out << head << "train_index," << k << ',' << p.indices[k] << '\n';
            out << head << "y," << k << ',' << p.model.y[k] << '\n';
            out << head << "alpha," << k << ',' << format_double(p.model.alpha[k]) << '\n';
        }
    }
}

inline MulticlassModel read_model(std::istream &in, const std::string &source = "<model>") {
    const auto t = read_table(in, source);
    const auto cp = t.column("pair_pos", source);
    const auto cn = t.column("pair_neg", source);
    const auto ck = t.column("kind", source);
    const auto ci = t.column("index", source);
    const auto cv = t.column("value", source);
    MulticlassModel mc;
    std::map<std::pair<int, int>, PairwiseModel> pairs;
    std::vector<std::pair<int, int>> order;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto pos = static_cast<int>(cell_long(t, r, cp, source));
        const auto neg = static_cast<int>(cell_long(t, r, cn, source));
        const auto &kind = t.rows[r][ck];
        const auto index = cell_long(t, r, ci, source);
        const auto bad = [&] {
            fail(ErrorKind::Parse, source + ":" + std::to_string(t.lines[r]) +
                                       ": unexpected record \"" + kind + "\"");
        };
        if (pos < 0) {
            if (kind == "n_train") {
                mc.n_train = static_cast<std::size_t>(cell_long(t, r, cv, source));
            } else if (kind == "class") {
                mc.classes.push_back(static_cast<int>(cell_long(t, r, cv, source)));
            } else {
                bad();
            }
            continue;
        }
        const auto key = std::make_pair(pos, neg);
        if (!pairs.contains(key)) {
            order.push_back(key);
            pairs[key].pos = pos;
            pairs[key].neg = neg;
        }
        auto &p = pairs[key];
        const auto slot = [&](auto &vec) -> auto & {
            if (index < 0) {
                bad();
            }
            if (vec.size() <= static_cast<std::size_t>(index)) {
                vec.resize(static_cast<std::size_t>(index) + 1);
            }
            return vec[static_cast<std::size_t>(index)];
        };
        if (kind == "C") {
            p.model.C = cell_double(t, r, cv, source);
        } else if (kind == "bias") {
            p.model.bias = cell_double(t, r, cv, source);
        } else if (kind == "train_index") {
            slot(p.indices) = static_cast<std::size_t>(cell_long(t, r, cv, source));
        } else if (kind == "y") {
            slot(p.model.y) = static_cast<int>(cell_long(t, r, cv, source));
        } else if (kind == "alpha") {
            slot(p.model.alpha) = cell_double(t, r, cv, source);
        } else {
            bad();
        }
    }
    for (const auto &key : order) {
        auto p = pairs[key];
        if (p.model.alpha.size() != p.indices.size() || p.model.y.size() != p.indices.size()) {
            fail(ErrorKind::Parse, source + ": incomplete records for pair " +
                                       std::to_string(key.first) + "/" +
                                       std::to_string(key.second));
        }
        for (std::size_t k = 0; k < p.model.alpha.size(); ++k) {
            if (p.model.alpha[k] > 0.0) {
                p.model.support.push_back(k);
            }
        }
        mc.pairs.push_back(std::move(p));
    }
    if (mc.classes.size() < 2 || mc.pairs.empty() || mc.n_train == 0) {
        fail(ErrorKind::Parse, source + ": model has no classes or pairs");
    }
    return mc;
}

// ---------------------------------------------------------------------------
// predictions

inline void write_predictions(const std::vector<int> &truth, const std::vector<int> &predicted,
                              const std::vector<std::string> &class_names, std::ostream &out) {
    require(truth.size() == predicted.size(), "prediction and label counts differ");
    out << "sample,label,predicted\n";
    for (std::size_t i = 0; i < truth.size(); ++i) {
        out << i << ',' << class_names[static_cast<std::size_t>(truth[i])] << ','
            << class_names[static_cast<std::size_t>(predicted[i])] << '\n';
    }
}

// ---------------------------------------------------------------------------
// subspace expectation tables

inline void write_subspace_rows(const std::vector<theory::SubspaceRow> &rows, std::ostream &out) {
    out << "case,dim_x,dim_y,estimate,stderr,trials\n";
    for (const auto &r : rows) {
        out << theory::to_string(r.which) << ',' << r.dim_x << ',' << r.dim_y << ','
            << format_double(r.estimate.mean) << ',' << format_double(r.estimate.std_error) << ','
            << r.estimate.trials << '\n';
    }
}

// ---------------------------------------------------------------------------
// helpers

template <class Writer> void save(const std::string &path, Writer &&write) {
    auto out = open_out(path);
    write(out);
    out.flush();
    if (!out) {
        fail(ErrorKind::Io, "write failed for " + path);
    }
}

template <class Reader> auto load(const std::string &path, Reader &&read) {
    auto in = open_in(path);
    return read(in, path);
}

} // namespace qkbft::io
