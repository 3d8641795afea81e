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

#include <algorithm>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "qkbft/featuremap.hpp"

namespace {

using namespace qkbft;
constexpr double kPi = std::numbers::pi;

void expect_valid_plan(const CouplingMap &g, const EntanglerPlan &plan, int n) {
    ASSERT_EQ(plan.n(), n);
    ASSERT_EQ(static_cast<int>(plan.tree_edges.size()), n - 1);
    std::set<int> members(plan.qubit_order.begin(), plan.qubit_order.end());
    ASSERT_EQ(static_cast<int>(members.size()), n);
    // connected + n-1 edges => spanning tree; also check edges exist in the coupling map
    std::vector<int> parent(static_cast<std::size_t>(g.n_physical()));
    for (int q : members) {
        parent[static_cast<std::size_t>(q)] = q;
    }
    const auto find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    };
    for (auto [u, v] : plan.tree_edges) {
        EXPECT_TRUE(g.has_edge(u, v));
        EXPECT_TRUE(members.count(u) && members.count(v));
        const int a = find(u);
        const int b = find(v);
        EXPECT_NE(a, b) << "cycle in tree";
        parent[static_cast<std::size_t>(a)] = b;
    }
    std::multiset<std::pair<int, int>> scheduled;
    for (const auto &layer : plan.layers) {
        std::set<int> used;
        for (auto [u, v] : layer) {
            EXPECT_TRUE(used.insert(u).second);
            EXPECT_TRUE(used.insert(v).second);
            scheduled.insert({u, v});
        }
    }
    const std::multiset<std::pair<int, int>> tree(plan.tree_edges.begin(), plan.tree_edges.end());
    EXPECT_EQ(scheduled, tree);
}

TEST(CouplingMap, RejectsMalformedGraphs) {
    EXPECT_THROW(CouplingMap(3, {{0, 0}}), Error);
    EXPECT_THROW(CouplingMap(3, {{0, 1}, {1, 0}}), Error);
    EXPECT_THROW(CouplingMap(3, {{0, 3}}), Error);
}

TEST(CouplingMap, Generators) {
    EXPECT_EQ(CouplingMap::line(5).edges().size(), 4u);
    EXPECT_EQ(CouplingMap::ring(5).edges().size(), 5u);
    const auto hh = CouplingMap::heavy_hex(8, 16);
    EXPECT_EQ(hh.n_physical(), 156);
    for (int q = 0; q < hh.n_physical(); ++q) {
        EXPECT_GE(hh.neighbors(q).size(), 1u);
        EXPECT_LE(hh.neighbors(q).size(), 3u);
    }
}

TEST(CouplingMap, EdgeListFile) {
    std::istringstream in("# comment\n0 1\n\n1 2  # trailing\n2 3\n");
    const auto g = CouplingMap::from_edge_list(in);
    EXPECT_EQ(g.n_physical(), 4);
    EXPECT_EQ(g.edges().size(), 3u);
    std::istringstream bad("0 1\n1\n");
    try {
        CouplingMap::from_edge_list(bad);
        FAIL();
    } catch (const Error &e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(Entangler, PathPicksCenter) {
    const auto g = CouplingMap::line(5);
    const auto plan = build_entangler(g, 5);
    EXPECT_EQ(plan.root, 2);
    EXPECT_EQ(plan.height, 2);
    expect_valid_plan(g, plan, 5);
}

TEST(Entangler, SingleEdge) {
    const auto g = CouplingMap::line(2);
    const auto plan = build_entangler(g, 2);
    EXPECT_EQ(plan.tree_edges.size(), 1u);
    EXPECT_EQ(plan.layers.size(), 1u);
}

TEST(Entangler, StarSerializes) {
    const auto g = CouplingMap::star(6);
    const auto plan = build_entangler(g, 6);
    EXPECT_EQ(plan.root, 0);
    EXPECT_EQ(plan.height, 1);
    EXPECT_EQ(plan.scheduled_depth(), 5);
}

TEST(Entangler, DisconnectedRejected) {
    const CouplingMap g(4, {{0, 1}, {2, 3}});
    EXPECT_THROW(build_entangler(g, 3), Error);
    EXPECT_THROW(build_entangler(CouplingMap::line(3), 4), Error);
}

TEST(Entangler, HeightIsMinimalEccentricity) {
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(0, 10));
        const auto g = gen::random_connected(n, static_cast<int>(rng.uniform_int(0, n)), rng);
        const auto plan = build_entangler(g, n);
        expect_valid_plan(g, plan, n);
        const auto dist = oracle::hop_distances(n, g.edges());
        int best = n;
        int best_root = -1;
        for (int r = 0; r < n; ++r) {
            const int ecc = *std::max_element(dist[r].begin(), dist[r].end());
            if (ecc < best) {
                best = ecc;
                best_root = r;
            }
        }
        EXPECT_EQ(plan.height, best);
        EXPECT_EQ(plan.root, best_root);
    }
}

TEST(Entangler, SubgraphsOfLargerMaps) {
    Rng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const int total = 6 + static_cast<int>(rng.uniform_int(0, 12));
        const auto g = gen::random_connected(total, 3, rng);
        const int n = 2 + static_cast<int>(rng.uniform_int(0, total - 2));
        expect_valid_plan(g, build_entangler(g, n), n);
    }
    const auto hh = CouplingMap::heavy_hex(3, 8);
    for (int n = 2; n <= 20; ++n) {
        expect_valid_plan(hh, build_entangler(hh, n), n);
    }
}

TEST(Placement, AlternatesAroundRoot) {
    EntanglerPlan plan;
    plan.qubit_order = {0, 1, 2, 3, 4};
    plan.root = 2;
    const std::vector<int> importance{0, 1, 2, 3, 4};
    const auto a = assign_features(importance, plan);
    EXPECT_EQ(a, (std::vector<int>{4, 2, 0, 1, 3}));
}

TEST(Placement, EdgeRootAndTrivialCases) {
    EntanglerPlan plan;
    plan.qubit_order = {7};
    plan.root = 7;
    EXPECT_EQ(assign_features(std::vector<int>{0}, plan), std::vector<int>{0});
    plan.qubit_order = {3, 4, 5, 6};
    plan.root = 3;
    EXPECT_EQ(assign_features(std::vector<int>{2, 0, 3, 1}, plan), (std::vector<int>{2, 0, 3, 1}));
    EXPECT_THROW(assign_features(std::vector<int>{0, 0, 1, 2}, plan), Error);
    EXPECT_THROW(assign_features(std::vector<int>{0, 1}, plan), Error);
}

TEST(Placement, AlwaysBijective) {
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_int(0, 14));
        const auto g = gen::random_connected(n, 2, rng);
        const auto plan = build_entangler(g, n);
        std::vector<int> imp(static_cast<std::size_t>(n));
        std::iota(imp.begin(), imp.end(), 0);
        rng.shuffle(imp);
        auto a = assign_features(imp, plan);
        EXPECT_EQ(a[static_cast<std::size_t>(plan.root_position())], imp[0]);
        std::sort(a.begin(), a.end());
        for (int i = 0; i < n; ++i) {
            EXPECT_EQ(a[static_cast<std::size_t>(i)], i);
        }
    }
}

TEST(FeatureMap, ParameterCount) {
    EXPECT_EQ(FeatureMapSpec::on_line(10).parameter_count(), 30u);
    const auto spec = FeatureMapSpec::on_line(3);
    EXPECT_THROW(build_fiducial(spec, std::vector<double>(8, 0.0)), Error);
}

TEST(FeatureMap, FiducialStructure) {
    const auto spec = FeatureMapSpec::on_line(4, AxisTriple{Axis::X, Axis::Y, Axis::Z});
    std::vector<double> lambda(12);
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        lambda[i] = 0.1 * static_cast<double>(i + 1);
    }
    const auto c = build_fiducial(spec, lambda);
    ASSERT_EQ(c.size(), 12u + 3u);
    EXPECT_EQ(c.gates()[0].kind, sim::GateKind::RX);
    EXPECT_EQ(c.gates()[1].kind, sim::GateKind::RY);
    EXPECT_EQ(c.gates()[2].kind, sim::GateKind::RZ);
    EXPECT_DOUBLE_EQ(c.gates()[5].angle, 0.6);
    EXPECT_EQ(c.gates()[5].target, 1);
    EXPECT_EQ(c.count(sim::GateKind::CZ), 3u);
    for (std::size_t k = 12; k < c.size(); ++k) {
        EXPECT_EQ(c.gates()[k].kind, sim::GateKind::CZ);
    }
}

TEST(FeatureMap, ZeroFiducialKeepsZeroState) {
    const auto spec = FeatureMapSpec::on_line(5);
    const auto s = sim::run_circuit(build_fiducial(spec, std::vector<double>(15, 0.0)));
    EXPECT_NEAR(std::abs(s[0]), 1.0, 1e-15);
}

TEST(FeatureMap, EmbeddingLayer) {
    const auto spec = FeatureMapSpec::on_line(3);
    const auto c = build_embedding(spec, std::vector<double>{0.0, 0.0, 0.0});
    EXPECT_EQ(c.count(sim::GateKind::CZ), 0u);
    EXPECT_NEAR(std::abs(sim::run_circuit(c)[0]), 1.0, 1e-15);
    const auto one = FeatureMapSpec::on_line(1);
    const auto s = sim::run_circuit(build_embedding(one, std::vector<double>{kPi}));
    EXPECT_NEAR(s.probabilities()[1], 1.0, 1e-15);
    EXPECT_THROW(build_embedding(spec, std::vector<double>{0.0}), Error);
}

TEST(FeatureMap, EmbeddingFollowsAssignment) {
    auto spec = FeatureMapSpec::on_line(3, {}, 2.0);
    spec.assignment = {2, 0, 1};
    const auto c = build_embedding(spec, std::vector<double>{0.1, 0.2, 0.3});
    EXPECT_DOUBLE_EQ(c.gates()[0].angle, 0.6);
    EXPECT_DOUBLE_EQ(c.gates()[1].angle, 0.2);
    EXPECT_DOUBLE_EQ(c.gates()[2].angle, 0.4);
}

TEST(FeatureMap, KernelCircuitIdentityOnEqualInputs) {
    Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_int(0, 7));
        const auto g = gen::random_connected(n, 2, rng);
        const auto axes = AxisTriple{static_cast<Axis>(rng.uniform_int(0, 2)),
                                     static_cast<Axis>(rng.uniform_int(0, 2)),
                                     static_cast<Axis>(rng.uniform_int(0, 2))};
        const auto spec = FeatureMapSpec::make(g, n, axes, {}, rng.uniform(0.5, 3.0));
        std::vector<double> lambda(spec.parameter_count());
        std::vector<double> x(static_cast<std::size_t>(n));
        for (auto &v : lambda) {
            v = rng.uniform(-kPi, kPi);
        }
        for (auto &v : x) {
            v = rng.uniform(-kPi, kPi);
        }
        const auto s = sim::run_circuit(build_kernel_circuit(spec, x, x, lambda));
        EXPECT_NEAR(std::abs(s[0]), 1.0, 1e-12);
    }
}

TEST(FeatureMap, KernelCircuitCzCount) {
    Rng rng(47);
    for (int n = 2; n <= 20; ++n) {
        for (const auto &g : {CouplingMap::line(n), CouplingMap::heavy_hex(3, 8),
                              gen::random_connected(n + 3, 4, rng)}) {
            const auto spec = FeatureMapSpec::make(g, n);
            const std::vector<double> lambda(spec.parameter_count(), 0.2);
            const std::vector<double> x(static_cast<std::size_t>(n), 0.3);
            EXPECT_EQ(build_kernel_circuit(spec, x, x, lambda).count(sim::GateKind::CZ),
                      static_cast<std::size_t>(2 * (n - 1)));
        }
    }
}

TEST(FeatureMap, PaperScaleGateCounts) {
    const auto hh = CouplingMap::heavy_hex(8, 16);
    for (auto [n, expected] : {std::pair{100, 198u}, std::pair{156, 310u}}) {
        const auto spec = FeatureMapSpec::make(hh, n);
        const std::vector<double> lambda(spec.parameter_count(), 0.0);
        const std::vector<double> x(static_cast<std::size_t>(n), 0.0);
        EXPECT_EQ(build_fiducial(spec, lambda).count(sim::GateKind::CZ),
                  static_cast<std::size_t>(n - 1));
        EXPECT_EQ(build_kernel_circuit(spec, x, x, lambda).count(sim::GateKind::CZ), expected);
    }
}

TEST(FeatureMap, AxisParsing) {
    EXPECT_EQ(AxisTriple::parse("zyx"), (AxisTriple{Axis::Z, Axis::Y, Axis::X}));
    EXPECT_EQ(AxisTriple::parse("XYZ").str(), "XYZ");
    EXPECT_THROW(AxisTriple::parse("XY"), Error);
    EXPECT_THROW(AxisTriple::parse("XYW"), Error);
}

} // namespace
