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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "vibronic/error.hpp"

namespace vibronic::circuit {

using RegId = std::size_t;

struct Register {
    std::string name;
    unsigned offset = 0;
    unsigned width = 0;

    unsigned qubit(unsigned bit) const { return offset + bit; }
};

// Two's-complement fixed-point format for coefficient constants, measured in
// turns (phase / 2 pi). `frac_bits` also sets the period 2^frac_bits of the
// phase-gradient register.
struct FixedPoint {
    unsigned total_bits = 28;
    unsigned frac_bits = 24;

    unsigned int_bits() const noexcept { return total_bits - frac_bits; }
    double resolution() const noexcept { return 1.0 / static_cast<double>(std::uint64_t{1} << frac_bits); }

    bool operator==(const FixedPoint&) const = default;
};

// Fixed number of unary-iteration ancillas for coefficient selects; enough
// for selects over up to 16 electronic states, growing as n - 1 beyond.
inline unsigned iterator_qubits(unsigned electronic_qubits) {
    return std::max(3u, electronic_qubits > 0 ? electronic_qubits - 1 : 0u);
}

// Register file of a compiled circuit. Qubits are numbered contiguously in
// the order: electronic, mode 0..M-1, coefficient, caches (degree 2..D),
// phase gradient, iterator.
class RegisterLayout {
  public:
    RegisterLayout() = default;

    RegisterLayout(unsigned electronic_qubits, std::size_t n_modes, unsigned grid_bits, FixedPoint fp,
                   unsigned max_degree)
        : grid_bits_(grid_bits), fixed_point_(fp) {
        electronic_ = add("el", electronic_qubits);
        for (std::size_t r = 0; r < n_modes; ++r) modes_.push_back(add("x" + std::to_string(r), grid_bits));
        system_qubits_ = next_;
        coefficient_ = add("coeff", fp.total_bits);
        const unsigned top = std::max(2u, max_degree);
        for (unsigned l = 2; l <= top; ++l) caches_.push_back(add("prod" + std::to_string(l), l * grid_bits));
        phase_gradient_ = add("phase", fp.total_bits);
        iterator_ = add("iter", iterator_qubits(electronic_qubits));
    }

    RegId electronic() const noexcept { return electronic_; }
    RegId mode(std::size_t r) const { return modes_.at(r); }
    RegId coefficient() const noexcept { return coefficient_; }
    RegId phase_gradient() const noexcept { return phase_gradient_; }
    RegId iterator() const noexcept { return iterator_; }
    // Product register holding a degree-`degree` monomial (degree >= 2).
    RegId cache(unsigned degree) const {
        if (degree < 2 || degree - 2 >= caches_.size()) {
            throw ValidationError("no product register for degree " + std::to_string(degree));
        }
        return caches_[degree - 2];
    }
    unsigned max_cached_degree() const noexcept { return static_cast<unsigned>(caches_.size()) + 1; }

    std::size_t n_modes() const noexcept { return modes_.size(); }
    unsigned grid_bits() const noexcept { return grid_bits_; }
    const FixedPoint& fixed_point() const noexcept { return fixed_point_; }

    const Register& operator[](RegId id) const { return registers_.at(id); }
    const std::vector<Register>& registers() const noexcept { return registers_; }

    unsigned system_qubits() const noexcept { return system_qubits_; }
    unsigned total_qubits() const noexcept { return next_; }
    unsigned ancilla_qubits() const noexcept { return next_ - system_qubits_; }

    bool is_system_register(RegId id) const { return registers_.at(id).offset < system_qubits_; }

    std::string summary() const {
        std::ostringstream os;
        os << "qubits: system " << system_qubits_ << ", ancilla " << ancilla_qubits() << ", total " << next_
           << "\nfixed point: " << fixed_point_.total_bits << " bits (" << fixed_point_.frac_bits << " fractional)\n";
        for (const auto& r : registers_) {
            if (r.width == 0) continue;
            os << "  " << r.name << ": qubits [" << r.offset << ", " << r.offset + r.width << ")\n";
        }
        return os.str();
    }

  private:
    RegId add(std::string name, unsigned width) {
        registers_.push_back({std::move(name), next_, width});
        next_ += width;
        return registers_.size() - 1;
    }

    unsigned grid_bits_ = 0;
    FixedPoint fixed_point_;
    std::vector<Register> registers_;
    RegId electronic_ = 0, coefficient_ = 0, phase_gradient_ = 0, iterator_ = 0;
    std::vector<RegId> modes_;
    std::vector<RegId> caches_;
    unsigned system_qubits_ = 0;
    unsigned next_ = 0;
};

// ---- gates ----------------------------------------------------------------

struct Hadamard {
    unsigned qubit;
};
struct Cnot {
    unsigned control;
    unsigned target;
};
struct PauliX {
    unsigned qubit;
};
// Quantum Fourier transform on one mode register; `inverse` selects F^dag.
struct Qft {
    RegId reg;
    bool inverse = false;
};
// target ^= table[selector]. Without a selector the table has one entry.
struct Load {
    unsigned tag;
    std::optional<RegId> selector;
    RegId target;
    std::vector<std::int64_t> table;
};
// dst += lhs * rhs (signed); dst starts clean.
struct SignedMult {
    unsigned tag;
    RegId lhs;
    RegId rhs;
    RegId dst;
};
// phase_gradient += lhs * rhs, i.e. phase exp(2 pi i lhs rhs / 2^frac).
struct MultAddPhase {
    RegId lhs;
    RegId rhs;
};
// phase_gradient += src.
struct AddPhase {
    RegId src;
};
// Reverses the Load or SignedMult carrying `tag`.
struct Uncompute {
    unsigned tag;
};

using Gate = std::variant<Hadamard, Cnot, PauliX, Qft, Load, SignedMult, MultAddPhase, AddPhase, Uncompute>;

inline bool is_arithmetic(const Gate& g) {
    return std::holds_alternative<Load>(g) || std::holds_alternative<SignedMult>(g) ||
           std::holds_alternative<MultAddPhase>(g) || std::holds_alternative<AddPhase>(g) ||
           std::holds_alternative<Uncompute>(g);
}

struct Circuit {
    RegisterLayout layout;
    std::vector<Gate> gates;

    const FixedPoint& fixed_point() const noexcept { return layout.fixed_point(); }
};

// Checks operand bounds and the stack discipline of compute/uncompute tags.
inline void validate_circuit(const Circuit& c) {
    const auto& L = c.layout;
    const auto n_regs = L.registers().size();
    auto check_reg = [&](RegId id) {
        if (id >= n_regs) throw ValidationError("gate references unknown register " + std::to_string(id));
    };
    auto check_qubit = [&](unsigned q) {
        if (q >= L.total_qubits())
            throw ValidationError("gate references qubit " + std::to_string(q) + " outside layout");
    };
    std::vector<unsigned> stack;
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        std::visit(
            [&](const auto& g) {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Hadamard> || std::is_same_v<T, PauliX>) {
                    check_qubit(g.qubit);
                } else if constexpr (std::is_same_v<T, Cnot>) {
                    check_qubit(g.control);
                    check_qubit(g.target);
                    if (g.control == g.target) throw ValidationError("CNOT control equals target");
                } else if constexpr (std::is_same_v<T, Qft>) {
                    check_reg(g.reg);
                } else if constexpr (std::is_same_v<T, Load>) {
                    check_reg(g.target);
                    std::size_t expected = 1;
                    if (g.selector) {
                        check_reg(*g.selector);
                        expected = std::size_t{1} << L[*g.selector].width;
                    }
                    if (g.table.size() != expected) throw ValidationError("load table size mismatch");
                    stack.push_back(g.tag);
                } else if constexpr (std::is_same_v<T, SignedMult>) {
                    check_reg(g.lhs);
                    check_reg(g.rhs);
                    check_reg(g.dst);
                    if (L[g.dst].width < L[g.lhs].width + L[g.rhs].width) {
                        throw ValidationError("product register too narrow");
                    }
                    stack.push_back(g.tag);
                } else if constexpr (std::is_same_v<T, MultAddPhase>) {
                    check_reg(g.lhs);
                    check_reg(g.rhs);
                } else if constexpr (std::is_same_v<T, AddPhase>) {
                    check_reg(g.src);
                } else if constexpr (std::is_same_v<T, Uncompute>) {
                    if (stack.empty() || stack.back() != g.tag) {
                        throw ValidationError("unmatched uncompute of tag " + std::to_string(g.tag) + " at gate " +
                                              std::to_string(i));
                    }
                    stack.pop_back();
                }
            },
            c.gates[i]);
    }
    if (!stack.empty())
        throw ValidationError("circuit ends with " + std::to_string(stack.size()) + " live computations");
}

// ---- text export ----------------------------------------------------------

namespace detail {

inline void qubits_of(std::ostream& os, const Register& r) {
    for (unsigned b = 0; b < r.width; ++b) os << ' ' << r.qubit(b);
}

}  // namespace detail

// One gate per line: `GATE <op> <qubits...> # key=value ...`. Register
// operands list their qubits least-significant first, in operand order.
inline void write_gate_list(std::ostream& os, const Circuit& c) {
    const auto& L = c.layout;
    os << "# vibronic gate list v1\n";
    os << "# qubits " << L.total_qubits() << " system " << L.system_qubits() << "\n";
    os << "# fixed_point total=" << c.fixed_point().total_bits << " frac=" << c.fixed_point().frac_bits << "\n";
    for (const auto& r : L.registers())
        os << "# register " << r.name << " offset=" << r.offset << " width=" << r.width << "\n";

    // tag -> description of the gate it reverses
    std::vector<std::pair<unsigned, std::string>> live;
    for (const auto& gate : c.gates) {
        std::visit(
            [&](const auto& g) {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Hadamard>) {
                    os << "GATE H " << g.qubit << "\n";
                } else if constexpr (std::is_same_v<T, PauliX>) {
                    os << "GATE X " << g.qubit << "\n";
                } else if constexpr (std::is_same_v<T, Cnot>) {
                    os << "GATE CNOT " << g.control << ' ' << g.target << "\n";
                } else if constexpr (std::is_same_v<T, Qft>) {
                    os << "GATE " << (g.inverse ? "QFT_DAG" : "QFT");
                    detail::qubits_of(os, L[g.reg]);
                    os << " # reg=" << L[g.reg].name << "\n";
                } else if constexpr (std::is_same_v<T, Load>) {
                    std::ostringstream line;
                    if (g.selector) detail::qubits_of(line, L[*g.selector]);
                    detail::qubits_of(line, L[g.target]);
                    line << " # tag=" << g.tag << " selector=" << (g.selector ? L[*g.selector].name : "-")
                         << " target=" << L[g.target].name << " table=";
                    for (std::size_t i = 0; i < g.table.size(); ++i) line << (i ? "," : "") << g.table[i];
                    os << "GATE LOAD" << line.str() << "\n";
                    live.emplace_back(g.tag, "LOAD" + line.str());
                } else if constexpr (std::is_same_v<T, SignedMult>) {
                    std::ostringstream line;
                    detail::qubits_of(line, L[g.lhs]);
                    detail::qubits_of(line, L[g.rhs]);
                    detail::qubits_of(line, L[g.dst]);
                    line << " # tag=" << g.tag << " lhs=" << L[g.lhs].name << " rhs=" << L[g.rhs].name
                         << " dst=" << L[g.dst].name;
                    os << "GATE MULT" << line.str() << "\n";
                    live.emplace_back(g.tag, "MULT" + line.str());
                } else if constexpr (std::is_same_v<T, MultAddPhase>) {
                    os << "GATE MULT_ADD_PHASE";
                    detail::qubits_of(os, L[g.lhs]);
                    detail::qubits_of(os, L[g.rhs]);
                    detail::qubits_of(os, L[L.phase_gradient()]);
                    os << " # lhs=" << L[g.lhs].name << " rhs=" << L[g.rhs].name << "\n";
                } else if constexpr (std::is_same_v<T, AddPhase>) {
                    os << "GATE ADD_PHASE";
                    detail::qubits_of(os, L[g.src]);
                    detail::qubits_of(os, L[L.phase_gradient()]);
                    os << " # src=" << L[g.src].name << "\n";
                } else if constexpr (std::is_same_v<T, Uncompute>) {
                    auto it = std::find_if(live.rbegin(), live.rend(), [&](const auto& e) { return e.first == g.tag; });
                    os << "GATE UNCOMPUTE_" << (it != live.rend() ? it->second : std::string(" # tag=?")) << "\n";
                    if (it != live.rend()) live.erase(std::next(it).base());
                }
            },
            gate);
    }
}

inline std::string to_gate_list(const Circuit& c) {
    std::ostringstream os;
    write_gate_list(os, c);
    return os.str();
}

}  // namespace vibronic::circuit
