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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "vibronic/circuit/ir.hpp"
#include "vibronic/error.hpp"
#include "vibronic/parallel.hpp"
#include "vibronic/sim/state.hpp"

namespace vibronic::sim {

inline std::uint64_t bit_mask(unsigned width) {
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

// Two's-complement value of the low `width` bits, as a wrapped uint64.
inline std::uint64_t sign_extend(std::uint64_t v, unsigned width) {
    if (width == 0) return 0;
    v &= bit_mask(width);
    if (width < 64 && ((v >> (width - 1)) & 1u)) v |= ~bit_mask(width);
    return v;
}

inline std::int64_t signed_of(std::uint64_t v, unsigned width) {
    return static_cast<std::int64_t>(sign_extend(v, width));
}

namespace detail {

// For each gate, the index of the gate an Uncompute reverses (or -1).
inline std::vector<long> uncompute_targets(const std::vector<circuit::Gate>& gates) {
    std::vector<long> out(gates.size(), -1);
    std::vector<std::pair<unsigned, long>> stack;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        if (const auto* l = std::get_if<circuit::Load>(&gates[i])) {
            stack.emplace_back(l->tag, static_cast<long>(i));
        } else if (const auto* m = std::get_if<circuit::SignedMult>(&gates[i])) {
            stack.emplace_back(m->tag, static_cast<long>(i));
        } else if (const auto* u = std::get_if<circuit::Uncompute>(&gates[i])) {
            if (stack.empty() || stack.back().first != u->tag) {
                throw ValidationError("unmatched uncompute of tag " + std::to_string(u->tag));
            }
            out[i] = stack.back().second;
            stack.pop_back();
        }
    }
    return out;
}

}  // namespace detail

// Register-level executor for the arithmetic gates: exact modular integer
// arithmetic on basis labels, the phase register read as an accumulator.
class RegisterMachine {
  public:
    explicit RegisterMachine(const circuit::RegisterLayout& L) : layout_(L), regs_(L.registers().size(), 0) {}

    std::vector<std::uint64_t>& registers() { return regs_; }
    const std::vector<std::uint64_t>& registers() const { return regs_; }

    void load_system(std::uint64_t qubit_label) {
        std::fill(regs_.begin(), regs_.end(), 0);
        for (std::size_t id = 0; id < regs_.size(); ++id) {
            const auto& r = layout_[id];
            if (r.width > 0 && layout_.is_system_register(id))
                regs_[id] = (qubit_label >> r.offset) & bit_mask(r.width);
        }
    }

    std::int64_t value(circuit::RegId id) const { return signed_of(regs_[id], layout_[id].width); }

    void add(circuit::RegId dst, std::uint64_t v) { regs_[dst] = (regs_[dst] + v) & bit_mask(layout_[dst].width); }
    void sub(circuit::RegId dst, std::uint64_t v) { regs_[dst] = (regs_[dst] - v) & bit_mask(layout_[dst].width); }

    std::uint64_t product(circuit::RegId a, circuit::RegId b) const {
        return sign_extend(regs_[a], layout_[a].width) * sign_extend(regs_[b], layout_[b].width);
    }

    // Executes gates [begin, end) of `gates`; `targets` from uncompute_targets.
    void run(const std::vector<circuit::Gate>& gates, const std::vector<long>& targets, std::size_t begin,
             std::size_t end) {
        using namespace circuit;
        const RegId phase = layout_.phase_gradient();
        for (std::size_t i = begin; i < end; ++i) {
            std::visit(
                [&](const auto& g) {
                    using T = std::decay_t<decltype(g)>;
                    if constexpr (std::is_same_v<T, Load>) {
                        xor_load(g);
                    } else if constexpr (std::is_same_v<T, SignedMult>) {
                        add(g.dst, product(g.lhs, g.rhs));
                    } else if constexpr (std::is_same_v<T, MultAddPhase>) {
                        add(phase, product(g.lhs, g.rhs));
                    } else if constexpr (std::is_same_v<T, AddPhase>) {
                        add(phase, sign_extend(regs_[g.src], layout_[g.src].width));
                    } else if constexpr (std::is_same_v<T, Uncompute>) {
                        const auto& orig = gates[static_cast<std::size_t>(targets[i])];
                        if (const auto* l = std::get_if<Load>(&orig))
                            xor_load(*l);
                        else if (const auto* m = std::get_if<SignedMult>(&orig))
                            sub(m->dst, product(m->lhs, m->rhs));
                    } else {
                        throw ValidationError("non-arithmetic gate inside an arithmetic segment");
                    }
                },
                gates[i]);
        }
    }

    // Phase in turns accumulated in the phase register, reduced to [0, 1).
    double phase_turns() const {
        const auto& fp = layout_.fixed_point();
        const auto acc = regs_[layout_.phase_gradient()] & bit_mask(fp.frac_bits);
        return std::ldexp(static_cast<double>(acc), -static_cast<int>(fp.frac_bits));
    }

    // True when every register except the system and phase registers is 0.
    bool ancillas_clean() const {
        for (std::size_t id = 0; id < regs_.size(); ++id)
            if (!layout_.is_system_register(id) && id != layout_.phase_gradient() && regs_[id] != 0) return false;
        return true;
    }

  private:
    void xor_load(const circuit::Load& g) {
        const std::size_t sel = g.selector ? static_cast<std::size_t>(regs_[*g.selector]) : 0;
        regs_[g.target] ^= static_cast<std::uint64_t>(g.table.at(sel)) & bit_mask(layout_[g.target].width);
    }

    const circuit::RegisterLayout& layout_;
    std::vector<std::uint64_t> regs_;
};

namespace detail {

inline void apply_hadamard(StateVector& s, unsigned bit) {
    const std::size_t m = std::size_t{1} << bit;
    const double h = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i & m) continue;
        const cplx a = s[i], b = s[i | m];
        s[i] = h * (a + b);
        s[i | m] = h * (a - b);
    }
}

inline void apply_cnot(StateVector& s, unsigned control, unsigned target) {
    const std::size_t c = std::size_t{1} << control, t = std::size_t{1} << target;
    for (std::size_t i = 0; i < s.size(); ++i)
        if ((i & c) && !(i & t)) std::swap(s[i], s[i | t]);
}

inline void apply_x(StateVector& s, unsigned bit) {
    const std::size_t t = std::size_t{1} << bit;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!(i & t)) std::swap(s[i], s[i | t]);
}

}  // namespace detail

// Executes a circuit on a system-only state. Arithmetic runs are evaluated
// per basis state with exact integer arithmetic; each must leave its
// ancillas at zero, and the accumulated phase-register value c multiplies
// the amplitude by exp(2 pi i c / 2^frac).
inline void apply_semantic(StateVector& s, const circuit::Circuit& c) {
    using namespace circuit;
    const auto& L = c.layout;
    check_layout_matches(L, s.shape);
    const auto targets = detail::uncompute_targets(c.gates);
    std::vector<std::uint64_t> labels(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) labels[i] = qubit_label_of_index(L, i);

    std::size_t i = 0;
    while (i < c.gates.size()) {
        if (is_arithmetic(c.gates[i])) {
            std::size_t j = i;
            while (j < c.gates.size() && is_arithmetic(c.gates[j])) ++j;
            parallel_chunks(
                s.size(),
                [&](std::size_t b, std::size_t e) {
                    RegisterMachine rm(L);
                    for (std::size_t idx = b; idx < e; ++idx) {
                        rm.load_system(labels[idx]);
                        rm.run(c.gates, targets, i, j);
                        if (!rm.ancillas_clean()) {
                            throw ValidationError("ancilla registers not returned to zero after gate " +
                                                  std::to_string(j - 1));
                        }
                        const double turns = rm.phase_turns();
                        if (turns != 0.0) s[idx] *= std::polar(1.0, 2.0 * std::numbers::pi * turns);
                    }
                },
                1024);
            i = j;
            continue;
        }
        std::visit(
            [&](const auto& g) {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Hadamard>) {
                    detail::apply_hadamard(s, flat_bit_of_qubit(L, g.qubit));
                } else if constexpr (std::is_same_v<T, Cnot>) {
                    detail::apply_cnot(s, flat_bit_of_qubit(L, g.control), flat_bit_of_qubit(L, g.target));
                } else if constexpr (std::is_same_v<T, PauliX>) {
                    detail::apply_x(s, flat_bit_of_qubit(L, g.qubit));
                } else if constexpr (std::is_same_v<T, Qft>) {
                    const auto& reg = L[g.reg];
                    for (std::size_t r = 0; r < L.n_modes(); ++r) {
                        if (L.mode(r) == g.reg) {
                            apply_mode_qft(s, r, g.inverse);
                            return;
                        }
                    }
                    throw ValidationError("QFT on non-mode register " + reg.name);
                }
            },
            c.gates[i]);
        ++i;
    }
}

// Dense matrix of a circuit on the system space, column by column.
inline Eigen::MatrixXcd semantic_unitary(const circuit::Circuit& c, const SystemShape& shape) {
    const auto dim = shape.dim();
    if (dim > dense_dimension_cap) throw SizeCapError("semantic unitary exceeds dense cap");
    Eigen::MatrixXcd U(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t col = 0; col < dim; ++col) {
        auto s = StateVector::basis(shape, col);
        apply_semantic(s, c);
        U.col(static_cast<Eigen::Index>(col)) = s.as_eigen();
    }
    return U;
}

}  // namespace vibronic::sim
