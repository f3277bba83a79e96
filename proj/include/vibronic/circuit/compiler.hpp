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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vibronic/circuit/ir.hpp"
#include "vibronic/circuit/schedule.hpp"
#include "vibronic/circuit/trotter.hpp"
#include "vibronic/error.hpp"
#include "vibronic/fragmentation.hpp"
#include "vibronic/grid.hpp"
#include "vibronic/model.hpp"

namespace vibronic::circuit {

// Widest coefficient register the simulators handle with 64-bit labels.
inline constexpr unsigned max_fixed_point_bits = 60;

struct CompileOptions {
    unsigned frac_bits = 24;
    unsigned total_bits = 0;  // 0: frac_bits plus the integer bits the constants need
    bool caching = true;
    bool include_v0 = true;
};

// One monomial of a diagonalized fragment with its per-state coefficient
// (Hartree, Z sign of the diagonalizer included, no grid factor).
struct DiagonalTerm {
    MultiIndex monomial;
    std::vector<double> coefficients;  // indexed by electronic state j'
    std::vector<CouplingKey> sources;  // coupling feeding each j', for diagnostics
};

// Monomials with a nonzero coefficient in some block of fragment `f`.
inline std::set<MultiIndex> fragment_monomials(const Fragment& f, const VibronicModel& model, bool include_v0) {
    std::set<MultiIndex> out;
    for (const auto& [key, c] : model.couplings)
        if ((key.bra ^ key.ket) == f.m && c != 0.0) out.insert(key.monomial);
    if (f.m == 0 && include_v0)
        for (std::size_t r = 0; r < model.n_modes(); ++r) out.insert(MultiIndex::single(r, 2));
    return out;
}

inline std::vector<DiagonalTerm> diagonal_terms(const Fragment& f, const VibronicModel& model, bool include_v0) {
    std::vector<DiagonalTerm> out;
    const auto N = model.n_states;
    for (const auto& alpha : fragment_monomials(f, model, include_v0)) {
        DiagonalTerm term{alpha, std::vector<double>(N, 0.0), std::vector<CouplingKey>(N)};
        bool nonzero = false;
        for (std::size_t jp = 0; jp < N; ++jp) {
            const auto [a, sign] = f.diagonal_block(jp);
            double c = model.coupling(a, a ^ f.m, alpha);
            if (f.m == 0 && include_v0 && alpha.degree() == 2 && alpha.powers().size() == 1) {
                c += 0.5 * model.frequencies[alpha.powers()[0].first];
            }
            term.coefficients[jp] = sign * c;
            term.sources[jp] = CouplingKey{a, a ^ f.m, alpha};
            nonzero = nonzero || c != 0.0;
        }
        if (nonzero) out.push_back(std::move(term));
    }
    return out;
}

// Fragments with at least one nonzero block, in ascending order.
inline std::vector<std::size_t> active_fragments(const VibronicModel& model, bool include_v0) {
    std::vector<std::size_t> out;
    for (const auto& f : fragments(model))
        if (!fragment_monomials(f, model, include_v0).empty()) out.push_back(f.m);
    return out;
}

inline TrotterPlan plan_for(const VibronicModel& model, unsigned order, double step_angle, std::size_t n_steps,
                            bool include_v0) {
    return make_trotter_plan(active_fragments(model, include_v0), model.n_modes() > 0, order, step_angle, n_steps);
}

// Phase (in turns) of one coefficient constant: angle * Delta^L * c / 2 pi.
inline double coefficient_turns(double angle, double spacing, unsigned degree, double c) {
    return angle * std::pow(spacing, static_cast<double>(degree)) * c / (2.0 * std::numbers::pi);
}

namespace detail {

struct Extreme {
    double turns = 0.0;
    std::string what;
};

inline unsigned int_bits_for(double max_turns, unsigned frac_bits) {
    // smallest I with round(|t| 2^f) <= 2^{f+I-1} - 1
    for (unsigned I = 1; I + frac_bits <= 127; ++I) {
        const long double scaled =
            std::round(static_cast<long double>(max_turns) * std::ldexp(1.0L, static_cast<int>(frac_bits)));
        if (scaled <= std::ldexp(1.0L, static_cast<int>(frac_bits + I - 1)) - 1.0L) return I;
    }
    return 128;
}

}  // namespace detail

// Chooses the fixed-point format for a set of exponentials. Coefficients are
// phases in turns; the phase-gradient addition wraps modulo one turn, so only
// the constants themselves need integer headroom, never their products with
// grid values.
inline FixedPoint choose_fixed_point(const VibronicModel& model, const GridConfig& grid,
                                     const std::vector<PlanEntry>& sequence, double step_angle,
                                     const CompileOptions& opt) {
    detail::Extreme worst;
    const double delta = grid.spacing();
    auto consider = [&](double turns, const auto& describe) {
        if (std::abs(turns) > std::abs(worst.turns) || !std::isfinite(turns)) worst = {std::abs(turns), describe()};
    };
    const auto frags = fragments(model);
    std::map<std::size_t, double> max_weight;
    double kinetic_weight = 0.0;
    for (const auto& e : sequence) {
        if (e.kind == PlanEntry::Kind::kinetic)
            kinetic_weight = std::max(kinetic_weight, std::abs(e.weight));
        else
            max_weight[e.fragment] = std::max(max_weight[e.fragment], std::abs(e.weight));
    }
    for (const auto& [m, weight] : max_weight) {
        for (const auto& term : diagonal_terms(frags[m], model, opt.include_v0)) {
            for (std::size_t jp = 0; jp < term.coefficients.size(); ++jp) {
                const double t =
                    coefficient_turns(weight * step_angle, delta, term.monomial.degree(), term.coefficients[jp]);
                consider(t, [&] { return "term " + term.sources[jp].to_string(); });
            }
        }
    }
    if (kinetic_weight > 0.0) {
        for (std::size_t r = 0; r < model.n_modes(); ++r) {
            const double t = coefficient_turns(kinetic_weight * step_angle, delta, 2, 0.5 * model.frequencies[r]);
            consider(t, [&] { return "kinetic term of mode " + std::to_string(r); });
        }
    }
    if (!std::isfinite(worst.turns))
        throw NumericalError("fixed-point overflow: non-finite coefficient in " + worst.what);

    FixedPoint fp;
    if (opt.total_bits == 0) {
        if (opt.frac_bits < 1) throw ValidationError("fractional bits must be >= 1");
        const unsigned I = detail::int_bits_for(worst.turns, opt.frac_bits);
        if (I + opt.frac_bits > max_fixed_point_bits) {
            throw NumericalError("fixed-point overflow: " + worst.what + " needs " + std::to_string(I) +
                                 " integer bits, exceeding the " + std::to_string(max_fixed_point_bits) + "-bit limit");
        }
        fp = {I + opt.frac_bits, opt.frac_bits};
    } else {
        if (opt.total_bits < 2 || opt.total_bits > max_fixed_point_bits) {
            throw ValidationError("fixed-point width must be in [2, " + std::to_string(max_fixed_point_bits) + "]");
        }
        std::optional<FixedPoint> found;
        for (unsigned I = 1; I < opt.total_bits && !found; ++I)
            if (detail::int_bits_for(worst.turns, opt.total_bits - I) <= I)
                found = FixedPoint{opt.total_bits, opt.total_bits - I};
        if (!found) {
            throw NumericalError("fixed-point overflow: " + worst.what + " does not fit in " +
                                 std::to_string(opt.total_bits) + " bits");
        }
        fp = *found;
    }
    return fp;
}

// Emits gate lists for fragment and kinetic exponentials onto one layout.
class CircuitBuilder {
  public:
    CircuitBuilder(const VibronicModel& model, const GridConfig& grid, FixedPoint fp, CompileOptions opt = {})
        : model_(model),
          grid_(grid),
          opt_(opt),
          circuit_{RegisterLayout(model.electronic_qubits(), model.n_modes(), grid.bits(), fp,
                                  std::max(model.max_degree, opt.include_v0 ? 2u : 0u)),
                   {}} {}

    const RegisterLayout& layout() const noexcept { return circuit_.layout; }

    // exp(i angle H_m) for a fragment: diagonalizer, phase body, diagonalizer^dag.
    void append_fragment(const Fragment& f, const std::vector<DiagonalTerm>& terms, double angle) {
        const auto& L = circuit_.layout;
        const auto& el = L[L.electronic()];
        if (f.clifford) {
            for (const auto& [c, t] : f.clifford->cnots) emit(Cnot{el.qubit(c), el.qubit(t)});
            emit(Hadamard{el.qubit(f.clifford->hadamard_on)});
        }
        std::map<std::vector<std::size_t>, const DiagonalTerm*> by_factors;
        std::set<MultiIndex> monomials;
        for (const auto& t : terms) {
            by_factors[t.monomial.factors()] = &t;
            monomials.insert(t.monomial);
        }
        for (const auto& step : schedule_monomials(monomials, opt_.caching)) {
            switch (step.kind) {
                case ScheduleStep::Kind::compute:
                    emit_product(step.factors);
                    break;
                case ScheduleStep::Kind::release:
                    emit(Uncompute{product_tags_.at(step.factors)});
                    break;
                case ScheduleStep::Kind::phase: {
                    const auto& term = *by_factors.at(step.factors);
                    std::vector<std::int64_t> table(term.coefficients.size());
                    for (std::size_t jp = 0; jp < table.size(); ++jp) {
                        table[jp] = encode(
                            coefficient_turns(angle, grid_.spacing(), term.monomial.degree(), term.coefficients[jp]),
                            term.sources[jp].to_string());
                    }
                    emit_phase(step.factors, std::move(table));
                    break;
                }
            }
        }
        if (f.clifford) {
            emit(Hadamard{el.qubit(f.clifford->hadamard_on)});
            for (auto it = f.clifford->cnots.rbegin(); it != f.clifford->cnots.rend(); ++it)
                emit(Cnot{el.qubit(it->first), el.qubit(it->second)});
        }
    }

    // exp(i angle sum_r omega_r P_r^2 / 2): per mode, QFT, squared-phase
    // block, inverse QFT.
    void append_kinetic(double angle) {
        const auto& L = circuit_.layout;
        for (std::size_t r = 0; r < model_.n_modes(); ++r) {
            const auto coeff = encode(coefficient_turns(angle, grid_.spacing(), 2, 0.5 * model_.frequencies[r]),
                                      "kinetic term of mode " + std::to_string(r));
            emit(Qft{L.mode(r), false});
            const unsigned load_tag = next_tag_++;
            emit(Load{load_tag, std::nullopt, L.coefficient(), {coeff}});
            const unsigned sq_tag = next_tag_++;
            emit(SignedMult{sq_tag, L.mode(r), L.mode(r), L.cache(2)});
            emit(MultAddPhase{L.coefficient(), L.cache(2)});
            emit(Uncompute{sq_tag});
            emit(Uncompute{load_tag});
            emit(Qft{L.mode(r), true});
        }
    }

    void append(const PlanEntry& e, double step_angle, const std::vector<Fragment>& frags) {
        const double angle = e.weight * step_angle;
        if (e.kind == PlanEntry::Kind::kinetic) {
            append_kinetic(angle);
        } else {
            auto it = terms_cache_.find(e.fragment);
            if (it == terms_cache_.end()) {
                it = terms_cache_.emplace(e.fragment, diagonal_terms(frags.at(e.fragment), model_, opt_.include_v0))
                         .first;
            }
            append_fragment(frags.at(e.fragment), it->second, angle);
        }
    }

    Circuit finish() && { return std::move(circuit_); }

  private:
    void emit(Gate g) { circuit_.gates.push_back(std::move(g)); }

    std::int64_t encode(double turns, const std::string& what) const {
        const auto& fp = circuit_.layout.fixed_point();
        const long double scaled =
            std::round(static_cast<long double>(turns) * std::ldexp(1.0L, static_cast<int>(fp.frac_bits)));
        const long double limit = std::ldexp(1.0L, static_cast<int>(fp.total_bits - 1)) - 1.0L;
        if (!(std::abs(scaled) <= limit)) {
            throw NumericalError("fixed-point overflow: " + what + " does not fit in " + std::to_string(fp.total_bits) +
                                 " bits");
        }
        return static_cast<std::int64_t>(scaled);
    }

    RegId product_register(const std::vector<std::size_t>& factors) const {
        const auto& L = circuit_.layout;
        return factors.size() == 1 ? L.mode(factors[0]) : L.cache(static_cast<unsigned>(factors.size()));
    }

    void emit_product(const std::vector<std::size_t>& factors) {
        const std::vector<std::size_t> parent(factors.begin(), factors.end() - 1);
        const unsigned tag = next_tag_++;
        product_tags_[factors] = tag;
        emit(SignedMult{tag, product_register(parent), circuit_.layout.mode(factors.back()),
                        circuit_.layout.cache(static_cast<unsigned>(factors.size()))});
    }

    void emit_phase(const std::vector<std::size_t>& factors, std::vector<std::int64_t> table) {
        const auto& L = circuit_.layout;
        const unsigned tag = next_tag_++;
        std::optional<RegId> selector;
        if (L[L.electronic()].width > 0) selector = L.electronic();
        if (!selector) table.resize(1);
        emit(Load{tag, selector, L.coefficient(), std::move(table)});
        if (factors.empty())
            emit(AddPhase{L.coefficient()});
        else
            emit(MultAddPhase{L.coefficient(), product_register(factors)});
        emit(Uncompute{tag});
    }

    const VibronicModel& model_;
    GridConfig grid_;
    CompileOptions opt_;
    Circuit circuit_;
    unsigned next_tag_ = 0;
    std::map<std::vector<std::size_t>, unsigned> product_tags_;
    std::map<std::size_t, std::vector<DiagonalTerm>> terms_cache_;
};

// exp(i theta H_m) for a single fragment on its own layout.
inline Circuit compile_diagonal_fragment(const Fragment& f, const VibronicModel& model, const GridConfig& grid,
                                         double theta, const CompileOptions& opt = {}) {
    const std::vector<PlanEntry> seq{{PlanEntry::Kind::fragment, f.m, 1.0}};
    CircuitBuilder b(model, grid, choose_fixed_point(model, grid, seq, theta, opt), opt);
    b.append_fragment(f, diagonal_terms(f, model, opt.include_v0), theta);
    return std::move(b).finish();
}

inline Circuit compile_kinetic(const VibronicModel& model, const GridConfig& grid, double theta,
                               const CompileOptions& opt = {}) {
    const std::vector<PlanEntry> seq{{PlanEntry::Kind::kinetic, 0, 1.0}};
    CircuitBuilder b(model, grid, choose_fixed_point(model, grid, seq, theta, opt), opt);
    b.append_kinetic(theta);
    return std::move(b).finish();
}

inline Circuit compile_sequence(const VibronicModel& model, const GridConfig& grid,
                                const std::vector<PlanEntry>& sequence, double step_angle,
                                const CompileOptions& opt = {}) {
    CircuitBuilder b(model, grid, choose_fixed_point(model, grid, sequence, step_angle, opt), opt);
    const auto frags = fragments(model);
    for (const auto& e : sequence) b.append(e, step_angle, frags);
    return std::move(b).finish();
}

// One product-formula step approximating exp(i theta H).
inline Circuit build_trotter_step(const VibronicModel& model, const GridConfig& grid, double theta, unsigned order,
                                  const CompileOptions& opt = {}) {
    const auto plan = plan_for(model, order, theta, 1, opt.include_v0);
    return compile_sequence(model, grid, plan.step, theta, opt);
}

// n_steps steps with theta = time / n_steps, seams merged.
inline Circuit build_evolution(const VibronicModel& model, const GridConfig& grid, double time, std::size_t n_steps,
                               unsigned order, const CompileOptions& opt = {}) {
    const auto plan = plan_for(model, order, time / static_cast<double>(n_steps), n_steps, opt.include_v0);
    return compile_sequence(model, grid, fused_sequence(plan), plan.step_angle, opt);
}

}  // namespace vibronic::circuit
