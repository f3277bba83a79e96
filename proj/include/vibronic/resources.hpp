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
#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "vibronic/circuit/compiler.hpp"
#include "vibronic/circuit/ir.hpp"
#include "vibronic/circuit/schedule.hpp"
#include "vibronic/circuit/trotter.hpp"
#include "vibronic/fragmentation.hpp"
#include "vibronic/grid.hpp"
#include "vibronic/model.hpp"
#include "vibronic/units.hpp"

namespace vibronic {

// Toffoli cost of each arithmetic primitive. Every field may be replaced.
struct CostModel {
    // select over `entries` table rows
    std::function<std::uint64_t(std::size_t entries)> load = [](std::size_t n) {
        return n > 1 ? static_cast<std::uint64_t>(n - 1) : 0;
    };
    // schoolbook signed multiplier, a-bit by b-bit
    std::function<std::uint64_t(unsigned a, unsigned b)> mult = [](unsigned a, unsigned b) { return 2ull * a * b - a; };
    // w-bit coefficient times p-bit product, accumulated into the phase register
    std::function<std::uint64_t(unsigned w, unsigned p)> mult_add_phase = [](unsigned w, unsigned p) {
        return 2ull * w * p - w;
    };
    // w-bit addition into the phase register
    std::function<std::uint64_t(unsigned w)> adder = [](unsigned w) { return w > 0 ? w - 1ull : 0ull; };
    // Fourier transform on a k-qubit mode register
    std::function<std::uint64_t(unsigned k)> qft = [](unsigned) { return 0ull; };

    // Counts each QFT as its k(k-1)/2 controlled rotations.
    static CostModel with_qft_rotations() {
        CostModel c;
        c.qft = [](unsigned k) { return static_cast<std::uint64_t>(k) * (k - 1) / 2; };
        return c;
    }
};

struct ToffoliBreakdown {
    std::uint64_t load = 0;
    std::uint64_t multiply = 0;
    std::uint64_t phase = 0;
    std::uint64_t qft = 0;
    std::uint64_t uncompute = 0;
    std::map<std::string, std::uint64_t> by_exponential;  // "H_m" or "T"
    std::map<std::string, std::uint64_t> by_class;        // "degree L" or "kinetic"

    std::uint64_t total() const noexcept { return load + multiply + phase + qft + uncompute; }

    ToffoliBreakdown& add(const ToffoliBreakdown& o, std::uint64_t times = 1) {
        load += o.load * times;
        multiply += o.multiply * times;
        phase += o.phase * times;
        qft += o.qft * times;
        uncompute += o.uncompute * times;
        for (const auto& [k, v] : o.by_exponential) by_exponential[k] += v * times;
        for (const auto& [k, v] : o.by_class) by_class[k] += v * times;
        return *this;
    }

    // Removes `times` copies of `o`; used for merged step seams.
    ToffoliBreakdown& subtract(const ToffoliBreakdown& o, std::uint64_t times = 1) {
        load -= o.load * times;
        multiply -= o.multiply * times;
        phase -= o.phase * times;
        qft -= o.qft * times;
        uncompute -= o.uncompute * times;
        for (const auto& [k, v] : o.by_exponential) by_exponential[k] -= v * times;
        for (const auto& [k, v] : o.by_class) by_class[k] -= v * times;
        return *this;
    }
};

// Per-gate Toffoli sum of a compiled circuit. Uncompute costs the same as
// the gate it reverses.
inline std::uint64_t toffoli_count(const circuit::Circuit& c, const CostModel& cost = {}) {
    using namespace circuit;
    const auto& L = c.layout;
    const unsigned w = L.fixed_point().total_bits;
    std::vector<std::pair<unsigned, std::uint64_t>> live;
    std::uint64_t total = 0;
    for (const auto& gate : c.gates) {
        std::visit(
            [&](const auto& g) {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Qft>) {
                    total += cost.qft(L[g.reg].width);
                } else if constexpr (std::is_same_v<T, Load>) {
                    const auto t = cost.load(g.table.size());
                    live.emplace_back(g.tag, t);
                    total += t;
                } else if constexpr (std::is_same_v<T, SignedMult>) {
                    const auto t = cost.mult(L[g.lhs].width, L[g.rhs].width);
                    live.emplace_back(g.tag, t);
                    total += t;
                } else if constexpr (std::is_same_v<T, MultAddPhase>) {
                    total += cost.mult_add_phase(L[g.lhs].width, L[g.rhs].width);
                } else if constexpr (std::is_same_v<T, AddPhase>) {
                    total += cost.adder(w);
                } else if constexpr (std::is_same_v<T, Uncompute>) {
                    if (live.empty() || live.back().first != g.tag) throw ValidationError("unmatched uncompute tag");
                    total += live.back().second;
                    live.pop_back();
                }
            },
            gate);
    }
    return total;
}

struct QubitCount {
    unsigned system = 0;
    unsigned ancilla = 0;
    unsigned total = 0;
};

inline QubitCount qubit_count(const VibronicModel& m, const GridConfig& g, circuit::FixedPoint fp,
                              unsigned max_degree) {
    const circuit::RegisterLayout L(m.electronic_qubits(), m.n_modes(), g.bits(), fp, max_degree);
    return {L.system_qubits(), L.ancilla_qubits(), L.total_qubits()};
}

// Highest product degree the compiler needs registers for.
inline unsigned product_degree(const VibronicModel& m, bool include_v0) {
    return std::max(m.max_degree, include_v0 ? 2u : 0u);
}

namespace detail {

inline std::string class_of(unsigned degree) { return "degree " + std::to_string(degree); }

// Cost of one fragment exponential, mirroring the compiler's emission.
inline ToffoliBreakdown fragment_cost(const Fragment& f, const VibronicModel& m, const GridConfig& g, unsigned w,
                                      const circuit::CompileOptions& opt, const CostModel& cost) {
    ToffoliBreakdown b;
    const unsigned k = g.bits();
    const std::size_t entries = m.electronic_qubits() > 0 ? m.n_states : 1;
    std::set<MultiIndex> monomials;
    for (const auto& t : circuit::diagonal_terms(f, m, opt.include_v0)) monomials.insert(t.monomial);
    std::uint64_t total = 0;
    for (const auto& step : circuit::schedule_monomials(monomials, opt.caching)) {
        const unsigned L = step.degree();
        const auto cls = class_of(L);
        std::uint64_t c = 0;
        switch (step.kind) {
            case circuit::ScheduleStep::Kind::compute:
                c = cost.mult((L - 1) * k, k);
                b.multiply += c;
                break;
            case circuit::ScheduleStep::Kind::release:
                c = cost.mult((L - 1) * k, k);
                b.uncompute += c;
                break;
            case circuit::ScheduleStep::Kind::phase: {
                const auto ld = cost.load(entries);
                const auto ph = L == 0 ? cost.adder(w) : cost.mult_add_phase(w, L * k);
                b.load += ld;
                b.uncompute += ld;
                b.phase += ph;
                c = 2 * ld + ph;
                break;
            }
        }
        b.by_class[cls] += c;
        total += c;
    }
    b.by_exponential["H_" + std::to_string(f.m)] = total;
    return b;
}

inline ToffoliBreakdown kinetic_cost(const VibronicModel& m, const GridConfig& g, unsigned w, const CostModel& cost) {
    ToffoliBreakdown b;
    const unsigned k = g.bits();
    for (std::size_t r = 0; r < m.n_modes(); ++r) {
        b.qft += 2 * cost.qft(k);
        const auto ld = cost.load(1);
        const auto sq = cost.mult(k, k);
        b.load += ld;
        b.multiply += sq;
        b.phase += cost.mult_add_phase(w, 2 * k);
        b.uncompute += ld + sq;
    }
    b.by_exponential["T"] = b.total();
    b.by_class["kinetic"] = b.total();
    return b;
}

// Step entries plus the merged seam exponential, which together carry every
// weight that appears in the fused sequence.
inline std::vector<circuit::PlanEntry> weight_carriers(const circuit::TrotterPlan& plan) {
    auto out = plan.step;
    if (plan.n_steps > 1 && plan.step.size() > 1 && plan.step.front().same_exponential(plan.step.back())) {
        auto seam = plan.step.back();
        seam.weight += plan.step.front().weight;
        out.push_back(seam);
    }
    return out;
}

}  // namespace detail

// Streaming cost of one exponential sequence at a fixed width.
class StepEstimator {
  public:
    StepEstimator(const VibronicModel& m, const GridConfig& g, unsigned w, circuit::CompileOptions opt = {},
                  CostModel cost = {})
        : model_(m), grid_(g), w_(w), opt_(opt), cost_(std::move(cost)), frags_(fragments(m)) {}

    const ToffoliBreakdown& cost_of(const circuit::PlanEntry& e) {
        const long key = e.kind == circuit::PlanEntry::Kind::kinetic ? -1 : static_cast<long>(e.fragment);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            auto b = key < 0 ? detail::kinetic_cost(model_, grid_, w_, cost_)
                             : detail::fragment_cost(frags_.at(e.fragment), model_, grid_, w_, opt_, cost_);
            it = cache_.emplace(key, std::move(b)).first;
        }
        return it->second;
    }

    ToffoliBreakdown sequence_cost(const std::vector<circuit::PlanEntry>& seq) {
        ToffoliBreakdown b;
        for (const auto& e : seq) b.add(cost_of(e));
        return b;
    }

  private:
    const VibronicModel& model_;
    GridConfig grid_;
    unsigned w_;
    circuit::CompileOptions opt_;
    CostModel cost_;
    std::vector<Fragment> frags_;
    std::map<long, ToffoliBreakdown> cache_;
};

struct StepEstimate {
    circuit::FixedPoint fixed_point;
    ToffoliBreakdown breakdown;
    std::uint64_t toffoli() const noexcept { return breakdown.total(); }
};

// Toffolis of one Trotter step with step angle theta; equals toffoli_count
// of build_trotter_step with the same arguments.
inline StepEstimate estimate_step(const VibronicModel& m, const GridConfig& g, double theta, unsigned order,
                                  const circuit::CompileOptions& opt = {}, const CostModel& cost = {}) {
    const auto plan = circuit::plan_for(m, order, theta, 1, opt.include_v0);
    const auto fp = circuit::choose_fixed_point(m, g, plan.step, theta, opt);
    StepEstimator est(m, g, fp.total_bits, opt, cost);
    return {fp, est.sequence_cost(plan.step)};
}

struct ResourceReport {
    std::string system;
    std::size_t n_states = 0;
    std::size_t n_modes = 0;
    unsigned grid_bits = 0;
    unsigned order = 1;
    double time_fs = 0.0;
    std::optional<double> epsilon;
    QubitCount qubits;
    circuit::FixedPoint fixed_point;
    std::size_t n_steps = 1;
    std::string step_method = "user-supplied";
    std::uint64_t toffoli_per_step = 0;
    std::uint64_t total_toffoli = 0;
    ToffoliBreakdown breakdown;  // whole evolution
};

// Whole-evolution report for r steps of size t / r (t in atomic units).
// Merged seams between consecutive steps are charged once.
inline ResourceReport estimate_total(const VibronicModel& m, const GridConfig& g, double time_au, std::size_t n_steps,
                                     unsigned order, const circuit::CompileOptions& opt = {},
                                     const CostModel& cost = {}) {
    const double theta = time_au / static_cast<double>(n_steps);
    const auto plan = circuit::plan_for(m, order, theta, n_steps, opt.include_v0);
    const auto fp = circuit::choose_fixed_point(m, g, detail::weight_carriers(plan), theta, opt);
    StepEstimator est(m, g, fp.total_bits, opt, cost);

    ResourceReport rep;
    rep.n_states = m.n_states_logical;
    rep.n_modes = m.n_modes();
    rep.grid_bits = g.bits();
    rep.order = order;
    rep.time_fs = units::au_to_fs(time_au);
    rep.qubits = qubit_count(m, g, fp, product_degree(m, opt.include_v0));
    rep.fixed_point = fp;
    rep.n_steps = n_steps;

    const auto step = est.sequence_cost(plan.step);
    rep.toffoli_per_step = step.total();
    rep.breakdown.add(step, n_steps);
    if (n_steps > 1 && plan.step.size() > 1 && plan.step.front().same_exponential(plan.step.back()))
        rep.breakdown.subtract(est.cost_of(plan.step.front()), n_steps - 1);
    rep.total_toffoli = rep.breakdown.total();
    return rep;
}

inline nlohmann::json to_json(const ToffoliBreakdown& b) {
    return {{"load", b.load},        {"multiply", b.multiply},   {"phase", b.phase},
            {"qft", b.qft},          {"uncompute", b.uncompute}, {"by_exponential", b.by_exponential},
            {"by_class", b.by_class}};
}

inline nlohmann::json to_json(const ResourceReport& r) {
    nlohmann::json j{
        {"system", r.system},
        {"n_states", r.n_states},
        {"n_modes", r.n_modes},
        {"grid_bits", r.grid_bits},
        {"order", r.order},
        {"time_fs", r.time_fs},
        {"qubits", {{"system", r.qubits.system}, {"ancilla", r.qubits.ancilla}, {"total", r.qubits.total}}},
        {"fixed_point", {{"total_bits", r.fixed_point.total_bits}, {"frac_bits", r.fixed_point.frac_bits}}},
        {"n_steps", r.n_steps},
        {"step_method", r.step_method},
        {"toffoli_per_step", r.toffoli_per_step},
        {"total_toffoli", r.total_toffoli},
        {"breakdown", to_json(r.breakdown)}};
    j["epsilon"] = r.epsilon ? nlohmann::json(*r.epsilon) : nlohmann::json(nullptr);
    return j;
}

inline std::string scientific(double v, int digits = 2) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(digits) << v;
    return os.str();
}

// System | # Qubits | # Toffoli Gates | Parameters
inline std::string resource_table(const std::vector<ResourceReport>& rows) {
    std::ostringstream os;
    os << std::left << std::setw(28) << "System" << std::setw(10) << "# Qubits" << std::setw(18) << "# Toffoli Gates"
       << "Parameters\n";
    for (const auto& r : rows) {
        std::ostringstream params;
        params << "N=" << r.n_states << ", M=" << r.n_modes << ", t=" << r.time_fs << " fs";
        if (r.epsilon) params << ", eps=" << *r.epsilon * 100.0 << "%";
        params << ", r=" << r.n_steps << " (" << r.step_method << ")";
        os << std::left << std::setw(28) << (r.system.empty() ? "-" : r.system) << std::setw(10) << r.qubits.total
           << std::setw(18) << scientific(static_cast<double>(r.total_toffoli)) << params.str() << "\n";
    }
    return os.str();
}

}  // namespace vibronic
