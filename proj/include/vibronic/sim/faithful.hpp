// Copyright 2026 The vibronic Authors
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
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "vibronic/circuit/ir.hpp"
#include "vibronic/error.hpp"
#include "vibronic/sim/semantic.hpp"
#include "vibronic/sim/state.hpp"

namespace vibronic::sim {

// Largest number of basis labels the gate-level simulator keeps.
inline constexpr std::size_t faithful_support_cap = std::size_t{1} << 22;

// Multi-controlled X: flip `target` when (label & mask) == value.
struct Mcx {
    std::uint64_t mask = 0;
    std::uint64_t value = 0;
    unsigned target = 0;

    std::uint64_t apply(std::uint64_t label) const {
        return (label & mask) == value ? label ^ (std::uint64_t{1} << target) : label;
    }
};

using ReversibleProgram = std::vector<Mcx>;

inline void append_inverse(ReversibleProgram& out, const ReversibleProgram& p) {
    out.insert(out.end(), p.rbegin(), p.rend());
}

// Lowering of the arithmetic gates to X, CNOT, Toffoli and wider MCX gates
// acting on the full qubit label. Additions use controlled ripple
// increments, so no carry ancillas are needed.
namespace lower {

inline std::uint64_t qbit(unsigned q) { return std::uint64_t{1} << q; }

// dst += 2^pos (mod 2^width) when every control in `ctrl` is 1.
inline void controlled_increment(ReversibleProgram& out, std::uint64_t ctrl, const circuit::Register& dst,
                                 unsigned pos) {
    for (unsigned j = dst.width; j-- > pos;) {
        std::uint64_t m = ctrl;
        for (unsigned b = pos; b < j; ++b) m |= qbit(dst.qubit(b));
        out.push_back({m, m, dst.qubit(j)});
    }
}

inline void controlled_add_power(ReversibleProgram& out, std::uint64_t ctrl, const circuit::Register& dst, unsigned pos,
                                 bool negative) {
    if (pos >= dst.width) return;
    if (!negative) {
        controlled_increment(out, ctrl, dst, pos);
    } else {
        ReversibleProgram inc;
        controlled_increment(inc, ctrl, dst, pos);
        append_inverse(out, inc);
    }
}

// dst += lhs * rhs with both operands two's complement.
inline ReversibleProgram signed_multiply_add(const circuit::Register& lhs, const circuit::Register& rhs,
                                             const circuit::Register& dst) {
    ReversibleProgram out;
    for (unsigned i = 0; i < rhs.width; ++i) {
        for (unsigned t = 0; t < lhs.width; ++t) {
            const bool negative = (t + 1 == lhs.width) != (i + 1 == rhs.width);
            controlled_add_power(out, qbit(lhs.qubit(t)) | qbit(rhs.qubit(i)), dst, t + i, negative);
        }
    }
    return out;
}

// dst += src, src two's complement.
inline ReversibleProgram signed_add(const circuit::Register& src, const circuit::Register& dst) {
    ReversibleProgram out;
    for (unsigned t = 0; t < src.width; ++t) controlled_add_power(out, qbit(src.qubit(t)), dst, t, t + 1 == src.width);
    return out;
}

// target ^= table[selector]: one MCX per set bit, selected by the full
// selector value.
inline ReversibleProgram load(const circuit::RegisterLayout& L, const circuit::Load& g) {
    ReversibleProgram out;
    const auto& target = L[g.target];
    for (std::size_t s = 0; s < g.table.size(); ++s) {
        std::uint64_t mask = 0, value = 0;
        if (g.selector) {
            const auto& sel = L[*g.selector];
            for (unsigned b = 0; b < sel.width; ++b) {
                mask |= qbit(sel.qubit(b));
                if ((s >> b) & 1u) value |= qbit(sel.qubit(b));
            }
        }
        const auto bits = static_cast<std::uint64_t>(g.table[s]) & bit_mask(target.width);
        for (unsigned b = 0; b < target.width; ++b)
            if ((bits >> b) & 1u) out.push_back({mask, value, target.qubit(b)});
    }
    return out;
}

inline std::vector<ReversibleProgram> programs(const circuit::Circuit& c) {
    using namespace circuit;
    const auto& L = c.layout;
    const auto targets = detail::uncompute_targets(c.gates);
    std::vector<ReversibleProgram> out(c.gates.size());
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        std::visit(
            [&](const auto& g) {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Load>) {
                    out[i] = load(L, g);
                } else if constexpr (std::is_same_v<T, SignedMult>) {
                    out[i] = signed_multiply_add(L[g.lhs], L[g.rhs], L[g.dst]);
                } else if constexpr (std::is_same_v<T, MultAddPhase>) {
                    out[i] = signed_multiply_add(L[g.lhs], L[g.rhs], L[L.phase_gradient()]);
                } else if constexpr (std::is_same_v<T, AddPhase>) {
                    out[i] = signed_add(L[g.src], L[L.phase_gradient()]);
                } else if constexpr (std::is_same_v<T, Uncompute>) {
                    append_inverse(out[i], out[static_cast<std::size_t>(targets[i])]);
                } else if constexpr (std::is_same_v<T, PauliX>) {
                    out[i].push_back({0, 0, g.qubit});
                } else if constexpr (std::is_same_v<T, Cnot>) {
                    out[i].push_back({qbit(g.control), qbit(g.control), g.target});
                }
            },
            c.gates[i]);
    }
    return out;
}

}  // namespace lower

struct FaithfulResult {
    StateVector state;       // system part after projecting the ancillas
    double ancilla_overlap;  // squared norm kept by the projection, relative to the input
};

// Gate-level simulation on the full register file: the ancillas start in
// |0>, the phase register in its Fourier eigenstate
// |R> = 2^{-w/2} sum_y exp(-2 pi i y / 2^frac)|y>. Arithmetic gates run as
// their MCX lowering; at the end the ancillas are projected back onto
// |0>|R>.
inline FaithfulResult apply_faithful(const StateVector& input, const circuit::Circuit& c,
                                     std::size_t support_cap = faithful_support_cap) {
    using namespace circuit;
    const auto& L = c.layout;
    check_layout_matches(L, input.shape);
    validate_circuit(c);
    if (L.total_qubits() > 64) throw SizeCapError("gate-level simulation supports at most 64 qubits");
    const auto& phase = L[L.phase_gradient()];
    if (phase.width > 24) throw SizeCapError("gate-level simulation needs a phase register of at most 24 qubits");
    const auto frac = L.fixed_point().frac_bits;
    const std::size_t R = std::size_t{1} << phase.width;

    auto resource = [&](std::uint64_t y) {
        return std::polar(
            std::pow(2.0, -0.5 * phase.width),
            -2.0 * std::numbers::pi * std::ldexp(static_cast<double>(y & bit_mask(frac)), -static_cast<int>(frac)));
    };

    using Entry = std::pair<std::uint64_t, cplx>;
    std::vector<Entry> state;
    double input_norm2 = 0.0;
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (input[i] == cplx{}) continue;
        input_norm2 += std::norm(input[i]);
        const auto label = qubit_label_of_index(L, i);
        for (std::uint64_t y = 0; y < R; ++y) state.emplace_back(label | (y << phase.offset), input[i] * resource(y));
        if (state.size() > support_cap) throw SizeCapError("gate-level simulation support exceeds cap");
    }

    const auto progs = lower::programs(c);
    for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
        const auto& gate = c.gates[gi];
        if (const auto* h = std::get_if<Hadamard>(&gate)) {
            const std::uint64_t m = lower::qbit(h->qubit);
            std::unordered_map<std::uint64_t, cplx> next;
            next.reserve(state.size() * 2);
            const double s = 1.0 / std::sqrt(2.0);
            for (const auto& [label, a] : state) {
                const bool one = label & m;
                next[label & ~m] += s * a;
                next[label | m] += (one ? -s : s) * a;
            }
            state.clear();
            for (const auto& e : next)
                if (std::abs(e.second) > 1e-15) state.push_back(e);
        } else if (const auto* q = std::get_if<Qft>(&gate)) {
            const auto& reg = L[q->reg];
            const std::uint64_t rmask = bit_mask(reg.width) << reg.offset;
            const std::size_t K = std::size_t{1} << reg.width;
            std::unordered_map<std::uint64_t, std::vector<cplx>> fibers;
            for (const auto& [label, a] : state) {
                auto& f = fibers[label & ~rmask];
                if (f.empty()) f.assign(K, cplx{});
                f[(label & rmask) >> reg.offset] += a;
            }
            Eigen::FFT<double> fft;
            std::vector<cplx> out(K);
            const double scale = std::sqrt(static_cast<double>(K));
            state.clear();
            for (auto& [rest, f] : fibers) {
                if (q->inverse) {
                    fft.fwd(out, f);
                    for (auto& v : out) v /= scale;
                } else {
                    fft.inv(out, f);
                    for (auto& v : out) v *= scale;
                }
                for (std::size_t y = 0; y < K; ++y)
                    if (std::abs(out[y]) > 1e-15)
                        state.emplace_back(rest | (static_cast<std::uint64_t>(y) << reg.offset), out[y]);
            }
        } else {
            for (auto& [label, a] : state)
                for (const auto& g : progs[gi]) label = g.apply(label);
        }
        if (state.size() > support_cap) throw SizeCapError("gate-level simulation support exceeds cap");
    }

    // project ancillas onto |0> and the phase register onto |R>
    std::uint64_t ancilla_mask = 0;
    for (unsigned qb = L.system_qubits(); qb < L.total_qubits(); ++qb) ancilla_mask |= lower::qbit(qb);
    const std::uint64_t phase_mask = bit_mask(phase.width) << phase.offset;
    FaithfulResult res{StateVector(input.shape), 0.0};
    for (const auto& [label, a] : state) {
        if (label & ancilla_mask & ~phase_mask) continue;
        const std::uint64_t y = (label & phase_mask) >> phase.offset;
        const auto sys = label & ~ancilla_mask;
        res.state[index_of_qubit_label(L, sys)] += std::conj(resource(y)) * a;
    }
    res.ancilla_overlap = input_norm2 > 0.0 ? res.state.norm() * res.state.norm() / input_norm2 : 1.0;
    return res;
}

}  // namespace vibronic::sim
