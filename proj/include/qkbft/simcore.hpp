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
 * Exact statevector simulation of RX/RY/RZ/CZ circuits, a readout-flip plus
 * global-depolarizing noise channel on the outcome distribution, and seeded
 * shot sampling.
 *
 * Bit ordering: qubit 0 is the least-significant bit of a basis index. In
 * printed bitstrings qubit 0 is the rightmost character.
 */

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qkbft/error.hpp"
#include "qkbft/random.hpp"

namespace qkbft::sim {

using Complex = std::complex<double>;

/// Largest register accepted by StateVector.
inline constexpr int kMaxQubits = 24;

enum class GateKind { RX, RY, RZ, CZ };

inline const char *to_string(GateKind k) {
    switch (k) {
    case GateKind::RX:
        return "RX";
    case GateKind::RY:
        return "RY";
    case GateKind::RZ:
        return "RZ";
    case GateKind::CZ:
        return "CZ";
    }
    return "?";
}

struct GateOp {
    GateKind kind = GateKind::RZ;
    int target = 0;
    int control = -1; // second qubit for CZ
    double angle = 0.0;

    static GateOp rx(int q, double theta) { return {GateKind::RX, q, -1, theta}; }
    static GateOp ry(int q, double theta) { return {GateKind::RY, q, -1, theta}; }
    static GateOp rz(int q, double theta) { return {GateKind::RZ, q, -1, theta}; }
    static GateOp cz(int a, int b) { return {GateKind::CZ, a, b, 0.0}; }

    bool is_two_qubit() const { return kind == GateKind::CZ; }

    GateOp adjoint() const {
        GateOp g = *this;
        if (!is_two_qubit()) {
            g.angle = -angle;
        }
        return g;
    }

    void validate(int n_qubits) const {
        const auto in_range = [n_qubits](int q) { return q >= 0 && q < n_qubits; };
        if (!in_range(target)) {
            fail(ErrorKind::InvalidArgument,
                 std::string("gate ") + to_string(kind) + " target " +
                     std::to_string(target) + " out of range for " +
                     std::to_string(n_qubits) + " qubits");
        }
        if (is_two_qubit()) {
            if (!in_range(control)) {
                fail(ErrorKind::InvalidArgument,
                     "CZ qubit " + std::to_string(control) + " out of range for " +
                         std::to_string(n_qubits) + " qubits");
            }
            if (control == target) {
                fail(ErrorKind::InvalidArgument, "CZ targets must be distinct");
            }
        }
    }
};

class Circuit {
  public:
    Circuit() = default;
    explicit Circuit(int n_qubits) : n_qubits_(n_qubits) {
        require(n_qubits >= 0, "circuit qubit count must be nonnegative");
    }

    int n_qubits() const { return n_qubits_; }
    const std::vector<GateOp> &gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }
    bool empty() const { return gates_.empty(); }

    Circuit &add(const GateOp &g) {
        g.validate(n_qubits_);
        gates_.push_back(g);
        return *this;
    }
    Circuit &rx(int q, double t) { return add(GateOp::rx(q, t)); }
    Circuit &ry(int q, double t) { return add(GateOp::ry(q, t)); }
    Circuit &rz(int q, double t) { return add(GateOp::rz(q, t)); }
    Circuit &cz(int a, int b) { return add(GateOp::cz(a, b)); }

    Circuit &append(const Circuit &other) {
        require(other.n_qubits_ == n_qubits_, "cannot append circuits of different width");
        gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
        return *this;
    }

    /// Inverse circuit: reversed order, each gate inverted.
    Circuit adjoint() const {
        Circuit out(n_qubits_);
        out.gates_.reserve(gates_.size());
        for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
            out.gates_.push_back(it->adjoint());
        }
        return out;
    }

    std::size_t count(GateKind kind) const {
        return static_cast<std::size_t>(std::count_if(
            gates_.begin(), gates_.end(), [kind](const GateOp &g) { return g.kind == kind; }));
    }

  private:
    int n_qubits_ = 0;
    std::vector<GateOp> gates_;
};

class StateVector {
  public:
    /// |0^n>
    explicit StateVector(int n_qubits) : n_(n_qubits) {
        check_width(n_qubits);
        amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
        amps_[0] = 1.0;
    }

    /// Computational basis state |index>.
    static StateVector basis(int n_qubits, std::uint64_t index) {
        StateVector s(n_qubits);
        require(index < s.dim(), "basis index out of range");
        s.amps_[0] = 0.0;
        s.amps_[index] = 1.0;
        return s;
    }

    static StateVector from_amplitudes(std::vector<Complex> amps) {
        require(!amps.empty() && std::has_single_bit(amps.size()),
                "amplitude vector length must be a power of two");
        StateVector s(0);
        s.n_ = std::countr_zero(amps.size());
        check_width(s.n_);
        s.amps_ = std::move(amps);
        return s;
    }

    int n_qubits() const { return n_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const Complex> amplitudes() const { return amps_; }
    std::span<Complex> amplitudes() { return amps_; }
    const Complex &operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const {
        double s = 0.0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            p[i] = std::norm(amps_[i]);
        }
        return p;
    }

  private:
    static void check_width(int n) {
        if (n < 0 || n > kMaxQubits) {
            fail(ErrorKind::InvalidArgument,
                 "exact simulation supports 0.." + std::to_string(kMaxQubits) +
                     " qubits, requested " + std::to_string(n));
        }
    }

    int n_ = 0;
    std::vector<Complex> amps_;
};

/// <a|b>
inline Complex inner(const StateVector &a, const StateVector &b) {
    require(a.dim() == b.dim(), "inner product of states with different widths");
    Complex s{0.0, 0.0};
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += std::conj(x[i]) * y[i];
    }
    return s;
}

namespace detail {

inline void apply_1q(std::span<Complex> v, int q, Complex m00, Complex m01, Complex m10,
                     Complex m11) {
    const std::size_t stride = std::size_t{1} << q;
    const std::size_t n = v.size();
    for (std::size_t base = 0; base < n; base += 2 * stride) {
        for (std::size_t j = base; j < base + stride; ++j) {
            const Complex a = v[j];
            const Complex b = v[j + stride];
            v[j] = m00 * a + m01 * b;
            v[j + stride] = m10 * a + m11 * b;
        }
    }
}

inline void apply_rz(std::span<Complex> v, int q, double theta) {
    const Complex p0 = std::polar(1.0, -theta / 2.0);
    const Complex p1 = std::polar(1.0, theta / 2.0);
    const std::size_t mask = std::size_t{1} << q;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] *= (i & mask) ? p1 : p0;
    }
}

inline void apply_cz(std::span<Complex> v, int a, int b) {
    const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if ((i & mask) == mask) {
            v[i] = -v[i];
        }
    }
}

} // namespace detail

/// Applies one gate in place. RX(t) = cos(t/2) I - i sin(t/2) X, likewise RY, RZ.
inline void apply_gate_inplace(StateVector &state, const GateOp &gate) {
    gate.validate(state.n_qubits());
    auto v = state.amplitudes();
    const double c = std::cos(gate.angle / 2.0);
    const double s = std::sin(gate.angle / 2.0);
    switch (gate.kind) {
    case GateKind::RX:
        detail::apply_1q(v, gate.target, c, Complex{0.0, -s}, Complex{0.0, -s}, c);
        break;
    case GateKind::RY:
        detail::apply_1q(v, gate.target, c, -s, s, c);
        break;
    case GateKind::RZ:
        detail::apply_rz(v, gate.target, gate.angle);
        break;
    case GateKind::CZ:
        detail::apply_cz(v, gate.target, gate.control);
        break;
    }
}

inline StateVector apply_gate(StateVector state, const GateOp &gate) {
    apply_gate_inplace(state, gate);
    return state;
}

inline void apply_circuit_inplace(StateVector &state, const Circuit &circuit) {
    require(circuit.n_qubits() == state.n_qubits(),
            "circuit width " + std::to_string(circuit.n_qubits()) +
                " does not match state width " + std::to_string(state.n_qubits()));
    for (const auto &g : circuit.gates()) {
        apply_gate_inplace(state, g);
    }
}

/// Circuit applied to |0^n>, gates in list order.
inline StateVector run_circuit(const Circuit &circuit) {
    StateVector s(circuit.n_qubits());
    apply_circuit_inplace(s, circuit);
    return s;
}

/// Synthetic noise acting on the outcome distribution only.
struct NoiseModel {
    double p01 = 0.0;        // P(read 1 | prepared 0), per qubit
    double p10 = 0.0;        // P(read 0 | prepared 1), per qubit
    double lambda_dep = 0.0; // weight of the uniform distribution

    bool noiseless() const { return p01 == 0.0 && p10 == 0.0 && lambda_dep == 0.0; }

    void validate() const {
        const auto ok = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!ok(p01) || !ok(p10) || !ok(lambda_dep)) {
            fail(ErrorKind::InvalidArgument,
                 "noise probabilities must lie in [0, 1] (p01=" + std::to_string(p01) +
                     ", p10=" + std::to_string(p10) +
                     ", lambda_dep=" + std::to_string(lambda_dep) + ")");
        }
    }
};

inline int hamming_weight(std::uint64_t x) { return std::popcount(x); }

inline int width_of(std::size_t dist_size) {
    require(dist_size > 0 && std::has_single_bit(dist_size),
            "distribution length must be a power of two");
    return std::countr_zero(dist_size);
}

/// Independent per-qubit readout flips applied to a distribution in place.
inline void apply_readout_flips(std::vector<double> &dist, double p01, double p10) {
    if (p01 == 0.0 && p10 == 0.0) {
        return;
    }
    const int n = width_of(dist.size());
    for (int q = 0; q < n; ++q) {
        const std::size_t stride = std::size_t{1} << q;
        for (std::size_t base = 0; base < dist.size(); base += 2 * stride) {
            for (std::size_t j = base; j < base + stride; ++j) {
                const double a = dist[j];
                const double b = dist[j + stride];
                dist[j] = a * (1.0 - p01) + b * p10;
                dist[j + stride] = a * p01 + b * (1.0 - p10);
            }
        }
    }
}

/// (1 - lambda)|amp|^2 + lambda * uniform, then readout flips.
inline std::vector<double> outcome_distribution(const StateVector &state,
                                                const NoiseModel &noise) {
    noise.validate();
    auto p = state.probabilities();
    if (noise.lambda_dep > 0.0) {
        const double u = 1.0 / static_cast<double>(p.size());
        for (auto &x : p) {
            x = (1.0 - noise.lambda_dep) * x + noise.lambda_dep * u;
        }
    }
    apply_readout_flips(p, noise.p01, noise.p10);
    return p;
}

struct ShotCounts {
    int n_qubits = 0;
    std::uint64_t shots = 0;
    std::map<std::uint64_t, std::uint64_t> counts; // basis index -> count

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto &[k, c] : counts) {
            t += c;
        }
        return t;
    }

    std::uint64_t count(std::uint64_t index) const {
        const auto it = counts.find(index);
        return it == counts.end() ? 0 : it->second;
    }
};

inline constexpr double kNormalizationTolerance = 1e-9;

/// Multinomial sample by inverse-CDF lookup; identical (dist, shots, seed) give identical counts.
inline ShotCounts sample_counts(std::span<const double> dist, std::uint64_t shots,
                                std::uint64_t seed) {
    const int n = width_of(dist.size());
    require(shots > 0, "shots must be positive");
    std::vector<double> cdf(dist.size());
    double total = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (!(dist[i] >= -kNormalizationTolerance)) {
            fail(ErrorKind::InvalidArgument, "distribution has a negative entry");
        }
        total += std::max(0.0, dist[i]);
        cdf[i] = total;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
        fail(ErrorKind::InvalidArgument,
             "distribution is not normalized (sum=" + std::to_string(total) + ")");
    }
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i] > 0.0) {
            last_nonzero = i;
        }
    }
    Rng rng(seed);
    std::vector<std::uint64_t> tally(dist.size(), 0);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * total;
        auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) -
                                            cdf.begin());
        tally[std::min(idx, last_nonzero)] += 1;
    }
    ShotCounts out;
    out.n_qubits = n;
    out.shots = shots;
    for (std::size_t i = 0; i < tally.size(); ++i) {
        if (tally[i] > 0) {
            out.counts.emplace(i, tally[i]);
        }
    }
    return out;
}

/// Probability mass per Hamming weight 0..n.
inline std::vector<double> weight_profile(std::span<const double> dist) {
    const int n = width_of(dist.size());
    std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t i = 0; i < dist.size(); ++i) {
        w[static_cast<std::size_t>(hamming_weight(i))] += dist[i];
    }
    return w;
}

/// Fraction of shots per Hamming weight 0..n.
inline std::vector<double> weight_profile(const ShotCounts &counts) {
    std::vector<double> w(static_cast<std::size_t>(counts.n_qubits) + 1, 0.0);
    for (const auto &[index, c] : counts.counts) {
        w[static_cast<std::size_t>(hamming_weight(index))] += static_cast<double>(c);
    }
    for (auto &x : w) {
        x /= static_cast<double>(counts.shots);
    }
    return w;
}

/// Total probability of bitstrings with Hamming weight <= d.
inline double mass_weight_leq(std::span<const double> dist, int d) {
    const int n = width_of(dist.size());
    require(d >= 0 && d <= n, "tolerance d=" + std::to_string(d) + " outside [0, " +
                                  std::to_string(n) + "]");
    double s = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (hamming_weight(i) <= d) {
            s += dist[i];
        }
    }
    return s;
}

/// n-character bitstring, qubit 0 rightmost.
inline std::string to_bitstring(std::uint64_t index, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int q = 0; q < n; ++q) {
        if ((index >> q) & 1U) {
            s[static_cast<std::size_t>(n - 1 - q)] = '1';
        }
    }
    return s;
}

} // namespace qkbft::sim
