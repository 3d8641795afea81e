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
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qkbft/error.hpp"

namespace qkbft {

/// Undirected hardware connectivity graph on physical qubits 0..n_physical-1.
class CouplingMap {
  public:
    using Edge = std::pair<int, int>;

    CouplingMap() = default;

    CouplingMap(int n_physical, const std::vector<Edge> &edges) : n_(n_physical) {
        require(n_physical >= 0, "coupling map size must be nonnegative");
        std::set<Edge> seen;
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || u >= n_ || v >= n_) {
                fail(ErrorKind::InvalidArgument, "coupling edge (" + std::to_string(u) + ", " +
                                                     std::to_string(v) +
                                                     ") references a missing qubit");
            }
            if (u == v) {
                fail(ErrorKind::InvalidArgument,
                     "coupling map has a self-loop at qubit " + std::to_string(u));
            }
            const Edge e{std::min(u, v), std::max(u, v)};
            if (!seen.insert(e).second) {
                fail(ErrorKind::InvalidArgument, "coupling map has a duplicate edge (" +
                                                     std::to_string(e.first) + ", " +
                                                     std::to_string(e.second) + ")");
            }
        }
        edges_.assign(seen.begin(), seen.end());
        adjacency_.assign(static_cast<std::size_t>(n_), {});
        for (auto [u, v] : edges_) {
            adjacency_[static_cast<std::size_t>(u)].push_back(v);
            adjacency_[static_cast<std::size_t>(v)].push_back(u);
        }
        for (auto &nbrs : adjacency_) {
            std::sort(nbrs.begin(), nbrs.end());
        }
    }

    int n_physical() const { return n_; }
    /// Edges with first < second, sorted.
    const std::vector<Edge> &edges() const { return edges_; }
    /// Neighbours in ascending order.
    const std::vector<int> &neighbors(int q) const {
        return adjacency_.at(static_cast<std::size_t>(q));
    }

    bool has_edge(int u, int v) const {
        const Edge e{std::min(u, v), std::max(u, v)};
        return std::binary_search(edges_.begin(), edges_.end(), e);
    }

    static CouplingMap line(int n) {
        std::vector<Edge> e;
        for (int i = 0; i + 1 < n; ++i) {
            e.emplace_back(i, i + 1);
        }
        return {n, e};
    }

    static CouplingMap ring(int n) {
        require(n >= 3, "a ring needs at least 3 qubits");
        auto e = line(n).edges();
        e.emplace_back(0, n - 1);
        return {n, e};
    }

    static CouplingMap star(int n) {
        std::vector<Edge> e;
        for (int i = 1; i < n; ++i) {
            e.emplace_back(0, i);
        }
        return {n, e};
    }

    /**
     * Heavy-hex-like lattice: `rows` lines of `row_len` qubits joined by bridge
     * qubits every 4 columns, with the bridge offset alternating between 0 and
     * 2 from one gap to the next. Numbering runs row 0, bridges of gap 0,
     * row 1, and so on. heavy_hex(8, 16) has 156 qubits.
     */
    static CouplingMap heavy_hex(int rows, int row_len) {
        require(rows >= 1 && row_len >= 1, "heavy-hex lattice needs positive dimensions");
        std::vector<Edge> e;
        int next = 0;
        std::vector<std::pair<int, int>> bridges; // (column, qubit) hanging below the last row
        for (int r = 0; r < rows; ++r) {
            std::vector<int> row;
            for (int c = 0; c < row_len; ++c) {
                row.push_back(next++);
                if (c > 0) {
                    e.emplace_back(row[static_cast<std::size_t>(c - 1)], row.back());
                }
            }
            for (auto [c, b] : bridges) {
                e.emplace_back(b, row[static_cast<std::size_t>(c)]);
            }
            bridges.clear();
            if (r + 1 < rows) {
                for (int c = (r % 2 == 0) ? 0 : 2; c < row_len; c += 4) {
                    bridges.emplace_back(c, next);
                    e.emplace_back(row[static_cast<std::size_t>(c)], next++);
                }
            }
        }
        return {next, e};
    }

    /// Reads "u v" pairs, one per line. Blank lines and '#' comments are skipped.
    static CouplingMap from_edge_list(std::istream &in, int n_physical = -1) {
        std::vector<Edge> e;
        std::string line;
        int line_no = 0;
        int max_q = -1;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) {
                line.erase(hash);
            }
            std::istringstream ls(line);
            int u = 0;
            int v = 0;
            if (!(ls >> u)) {
                continue;
            }
            std::string extra;
            if (!(ls >> v) || (ls >> extra)) {
                fail(ErrorKind::Parse,
                     "edge list line " + std::to_string(line_no) + ": expected \"u v\"");
            }
            e.emplace_back(u, v);
            max_q = std::max({max_q, u, v});
        }
        return {n_physical >= 0 ? n_physical : max_q + 1, e};
    }

    static CouplingMap load(const std::string &path, int n_physical = -1) {
        std::ifstream in(path);
        if (!in) {
            fail(ErrorKind::Io, "cannot open coupling map file " + path);
        }
        return from_edge_list(in, n_physical);
    }

  private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adjacency_;
};

} // namespace qkbft
