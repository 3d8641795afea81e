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
 * Covariant feature-map circuits: a coupling-aware BFS entangler, placement of
 * features onto qubits by importance, the 3n-parameter fiducial layer, the
 * data embedding layer and the full kernel circuit.
 */

#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "qkbft/coupling.hpp"
#include "qkbft/error.hpp"
#include "qkbft/simcore.hpp"

namespace qkbft {

enum class Axis { X, Y, Z };

inline char to_char(Axis a) {
    switch (a) {
    case Axis::X:
        return 'X';
    case Axis::Y:
        return 'Y';
    case Axis::Z:
        return 'Z';
    }
    return '?';
}

inline Axis parse_axis(char c) {
    switch (c) {
    case 'X':
    case 'x':
        return Axis::X;
    case 'Y':
    case 'y':
        return Axis::Y;
    case 'Z':
    case 'z':
        return Axis::Z;
    default:
        fail(ErrorKind::InvalidArgument, std::string("unknown rotation axis '") + c + "'");
    }
}

inline sim::GateOp rotation(Axis a, int q, double angle) {
    switch (a) {
    case Axis::X:
        return sim::GateOp::rx(q, angle);
    case Axis::Y:
        return sim::GateOp::ry(q, angle);
    case Axis::Z:
        break;
    }
    return sim::GateOp::rz(q, angle);
}

/// Rotation axes of the fiducial layer (alpha, beta, gamma); gamma is also the embedding axis.
struct AxisTriple {
    Axis alpha = Axis::Z;
    Axis beta = Axis::Y;
    Axis gamma = Axis::X;

    static AxisTriple parse(const std::string &s) {
        require(s.size() == 3, "axis triple must have three letters, got \"" + s + "\"");
        return {parse_axis(s[0]), parse_axis(s[1]), parse_axis(s[2])};
    }

    std::string str() const { return {to_char(alpha), to_char(beta), to_char(gamma)}; }

    bool operator==(const AxisTriple &) const = default;
};

/**
 * Selected qubits, spanning tree and CZ schedule. Physical ids refer to the
 * coupling map; logical qubit i is qubit_order[i].
 */
struct EntanglerPlan {
    using Edge = std::pair<int, int>;

    std::vector<int> qubit_order; // physical ids, BFS visit order of the selection pass
    int root = 0;                 // physical id of the tree root
    std::vector<Edge> tree_edges; // (parent, child), physical ids, BFS discovery order
    std::vector<std::vector<Edge>> layers;
    int height = 0;

    int n() const { return static_cast<int>(qubit_order.size()); }
    int scheduled_depth() const { return static_cast<int>(layers.size()); }

    int logical(int physical) const {
        const auto it = std::find(qubit_order.begin(), qubit_order.end(), physical);
        require(it != qubit_order.end(),
                "qubit " + std::to_string(physical) + " is not part of the plan");
        return static_cast<int>(it - qubit_order.begin());
    }

    int root_position() const { return logical(root); }

    /// Layers flattened and translated to logical indices.
    std::vector<Edge> logical_schedule() const {
        std::vector<Edge> out;
        for (const auto &layer : layers) {
            for (auto [u, v] : layer) {
                out.emplace_back(logical(u), logical(v));
            }
        }
        return out;
    }
};

namespace detail {

struct BfsTree {
    std::vector<int> order;
    std::vector<std::pair<int, int>> edges;
    int height = 0;
};

/// BFS restricted to `allowed` (all qubits when empty), stopping after `limit` visits.
inline BfsTree bfs(const CouplingMap &g, int start, const std::vector<char> &allowed,
                   std::size_t limit) {
    BfsTree t;
    std::vector<int> level(static_cast<std::size_t>(g.n_physical()), -1);
    std::queue<int> frontier;
    level[static_cast<std::size_t>(start)] = 0;
    frontier.push(start);
    t.order.push_back(start);
    while (!frontier.empty() && t.order.size() < limit) {
        const int u = frontier.front();
        frontier.pop();
        for (int v : g.neighbors(u)) {
            if (t.order.size() >= limit) {
                break;
            }
            const auto vi = static_cast<std::size_t>(v);
            if (level[vi] >= 0 || (!allowed.empty() && !allowed[vi])) {
                continue;
            }
            level[vi] = level[static_cast<std::size_t>(u)] + 1;
            t.height = std::max(t.height, level[vi]);
            t.order.push_back(v);
            t.edges.emplace_back(u, v);
            frontier.push(v);
        }
    }
    return t;
}

} // namespace detail

/// First-fit packing of edges, in the given order, into vertex-disjoint layers.
inline std::vector<std::vector<EntanglerPlan::Edge>>
schedule_layers(const std::vector<EntanglerPlan::Edge> &edges) {
    std::vector<std::vector<EntanglerPlan::Edge>> layers;
    std::vector<std::vector<int>> busy;
    for (const auto &e : edges) {
        std::size_t k = 0;
        for (; k < layers.size(); ++k) {
            const auto &b = busy[k];
            if (std::find(b.begin(), b.end(), e.first) == b.end() &&
                std::find(b.begin(), b.end(), e.second) == b.end()) {
                break;
            }
        }
        if (k == layers.size()) {
            layers.emplace_back();
            busy.emplace_back();
        }
        layers[k].push_back(e);
        busy[k].push_back(e.first);
        busy[k].push_back(e.second);
    }
    return layers;
}

/**
 * Picks n connected qubits and a minimum-height BFS spanning tree over them.
 * Every physical qubit seeds a candidate subgraph (its first n BFS visits);
 * inside a candidate every qubit is tried as root. Lower height wins, ties go
 * to the lower root and then to the lower seed.
 */
inline EntanglerPlan build_entangler(const CouplingMap &coupling, int n) {
    require(n >= 1, "entangler needs at least one qubit");
    require(n <= coupling.n_physical(),
            "coupling map has " + std::to_string(coupling.n_physical()) +
                " qubits, fewer than the requested " + std::to_string(n));
    const auto limit = static_cast<std::size_t>(n);
    std::optional<EntanglerPlan> best;
    for (int start = 0; start < coupling.n_physical(); ++start) {
        const auto selection = detail::bfs(coupling, start, {}, limit);
        if (selection.order.size() < limit) {
            continue;
        }
        std::vector<char> allowed(static_cast<std::size_t>(coupling.n_physical()), 0);
        for (int q : selection.order) {
            allowed[static_cast<std::size_t>(q)] = 1;
        }
        std::vector<int> roots = selection.order;
        std::sort(roots.begin(), roots.end());
        std::optional<detail::BfsTree> best_tree;
        int best_root = -1;
        for (int r : roots) {
            auto tree = detail::bfs(coupling, r, allowed, limit);
            if (!best_tree || tree.height < best_tree->height) {
                best_tree = std::move(tree);
                best_root = r;
            }
        }
        if (!best || best_tree->height < best->height) {
            EntanglerPlan plan;
            plan.qubit_order = selection.order;
            plan.root = best_root;
            plan.tree_edges = best_tree->edges;
            plan.height = best_tree->height;
            best = std::move(plan);
        }
    }
    if (!best) {
        fail(ErrorKind::InvalidArgument, "coupling map has no connected subgraph of " +
                                             std::to_string(n) + " qubits");
    }
    best->layers = schedule_layers(best->tree_edges);
    return *best;
}

/**
 * assignment[q] = feature placed on logical qubit q. The most important
 * feature goes to the root; the rest fill positions root+1, root-1, root+2,
 * root-2, ... of qubit_order, skipping positions that fall off either end.
 */
inline std::vector<int> assign_features(std::span<const int> importance_order,
                                        const EntanglerPlan &plan) {
    const int n = plan.n();
    require(static_cast<int>(importance_order.size()) == n,
            "importance order has " + std::to_string(importance_order.size()) +
                " entries for " + std::to_string(n) + " qubits");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int f : importance_order) {
        require(f >= 0 && f < n && !seen[static_cast<std::size_t>(f)],
                "importance order is not a permutation of 0.." + std::to_string(n - 1));
        seen[static_cast<std::size_t>(f)] = 1;
    }
    const int p = plan.root_position();
    std::vector<int> positions{p};
    for (int k = 1; static_cast<int>(positions.size()) < n; ++k) {
        if (p + k < n) {
            positions.push_back(p + k);
        }
        if (p - k >= 0) {
            positions.push_back(p - k);
        }
    }
    std::vector<int> assignment(static_cast<std::size_t>(n), -1);
    for (int rank = 0; rank < n; ++rank) {
        assignment[static_cast<std::size_t>(positions[static_cast<std::size_t>(rank)])] =
            importance_order[static_cast<std::size_t>(rank)];
    }
    return assignment;
}

struct FeatureMapSpec {
    int n = 0;
    AxisTriple axes;
    std::vector<int> assignment; // feature index per logical qubit
    double angle_scale = 1.0;
    EntanglerPlan entangler;

    std::size_t parameter_count() const { return 3 * static_cast<std::size_t>(n); }

    void validate() const {
        require(n >= 1, "feature map needs at least one qubit");
        require(entangler.n() == n, "entangler size does not match the feature map");
        require(static_cast<int>(assignment.size()) == n, "assignment size mismatch");
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        for (int f : assignment) {
            require(f >= 0 && f < n && !seen[static_cast<std::size_t>(f)],
                    "feature assignment is not a bijection");
            seen[static_cast<std::size_t>(f)] = 1;
        }
    }

    /// Spec over the given coupling map; importance defaults to feature order.
    static FeatureMapSpec make(const CouplingMap &coupling, int n, AxisTriple axes = {},
                               std::vector<int> importance_order = {},
                               double angle_scale = 1.0) {
        FeatureMapSpec s;
        s.n = n;
        s.axes = axes;
        s.angle_scale = angle_scale;
        s.entangler = build_entangler(coupling, n);
        if (importance_order.empty()) {
            for (int i = 0; i < n; ++i) {
                importance_order.push_back(i);
            }
        }
        s.assignment = assign_features(importance_order, s.entangler);
        s.validate();
        return s;
    }

    /// Spec on a line of n qubits.
    static FeatureMapSpec on_line(int n, AxisTriple axes = {}, double angle_scale = 1.0) {
        return make(CouplingMap::line(n), n, axes, {}, angle_scale);
    }
};

/// V: per qubit R_alpha, R_beta, R_gamma with parameters lambda[3q..3q+2], then one CZ per tree edge.
inline sim::Circuit build_fiducial(const FeatureMapSpec &spec, std::span<const double> lambda) {
    require(lambda.size() == spec.parameter_count(),
            "fiducial needs " + std::to_string(spec.parameter_count()) + " parameters, got " +
                std::to_string(lambda.size()));
    sim::Circuit c(spec.n);
    for (int q = 0; q < spec.n; ++q) {
        const auto base = 3 * static_cast<std::size_t>(q);
        c.add(rotation(spec.axes.alpha, q, lambda[base]));
        c.add(rotation(spec.axes.beta, q, lambda[base + 1]));
        c.add(rotation(spec.axes.gamma, q, lambda[base + 2]));
    }
    for (auto [u, v] : spec.entangler.logical_schedule()) {
        c.cz(u, v);
    }
    return c;
}

/// D(x): R_gamma(angle_scale * x[assignment[q]]) on each qubit q.
inline sim::Circuit build_embedding(const FeatureMapSpec &spec, std::span<const double> x) {
    require(static_cast<int>(x.size()) == spec.n,
            "feature vector has " + std::to_string(x.size()) + " entries for " +
                std::to_string(spec.n) + " qubits");
    sim::Circuit c(spec.n);
    for (int q = 0; q < spec.n; ++q) {
        c.add(rotation(spec.axes.gamma, q,
                       spec.angle_scale * x[static_cast<std::size_t>(
                                              spec.assignment[static_cast<std::size_t>(q)])]));
    }
    return c;
}

/// V, D(x2), D(x1)^dagger, V^dagger. P(0^n) of the output is the fidelity kernel.
inline sim::Circuit build_kernel_circuit(const FeatureMapSpec &spec, std::span<const double> x1,
                                         std::span<const double> x2,
                                         std::span<const double> lambda) {
    const auto v = build_fiducial(spec, lambda);
    sim::Circuit c(spec.n);
    c.append(v);
    c.append(build_embedding(spec, x2));
    c.append(build_embedding(spec, x1).adjoint());
    c.append(v.adjoint());
    return c;
}

} // namespace qkbft
