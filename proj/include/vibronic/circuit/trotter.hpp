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
#include <vector>

#include "vibronic/error.hpp"

namespace vibronic::circuit {

// One exponential exp(i * weight * theta * H_x) of a product formula, where
// H_x is a potential fragment or the kinetic term.
struct PlanEntry {
    enum class Kind { fragment, kinetic };

    Kind kind = Kind::fragment;
    std::size_t fragment = 0;
    double weight = 1.0;

    bool same_exponential(const PlanEntry& o) const {
        return kind == o.kind && (kind == Kind::kinetic || fragment == o.fragment);
    }
    bool operator==(const PlanEntry&) const = default;
};

struct TrotterPlan {
    unsigned order = 1;
    double step_angle = 0.0;
    std::size_t n_steps = 1;
    std::vector<PlanEntry> step;  // one step, adjacent repeats merged
};

namespace detail {

inline void append_fused(std::vector<PlanEntry>& seq, const PlanEntry& e) {
    if (!seq.empty() && seq.back().same_exponential(e)) {
        seq.back().weight += e.weight;
    } else {
        seq.push_back(e);
    }
}

inline std::vector<PlanEntry> first_order(const std::vector<std::size_t>& frags, bool kinetic, double scale) {
    std::vector<PlanEntry> seq;
    for (auto m : frags) seq.push_back({PlanEntry::Kind::fragment, m, scale});
    if (kinetic) seq.push_back({PlanEntry::Kind::kinetic, 0, scale});
    return seq;
}

// Symmetric second-order step: half weights forward, then the mirror image;
// the two copies of the middle exponential merge into one.
inline std::vector<PlanEntry> second_order(const std::vector<std::size_t>& frags, bool kinetic, double scale) {
    const auto half = first_order(frags, kinetic, 0.5 * scale);
    std::vector<PlanEntry> seq;
    for (const auto& e : half) append_fused(seq, e);
    for (auto it = half.rbegin(); it != half.rend(); ++it) append_fused(seq, *it);
    return seq;
}

}  // namespace detail

// Suzuki's fourth-order weight u_2 = 1 / (4 - 4^{1/3}).
inline double suzuki_weight() { return 1.0 / (4.0 - std::cbrt(4.0)); }

// Fragments run in ascending order with the kinetic term last (first
// order), its symmetric version (second order), or Suzuki's five-stage
// recursion of the second-order step (fourth order).
inline TrotterPlan make_trotter_plan(const std::vector<std::size_t>& fragments, bool kinetic, unsigned order,
                                     double step_angle, std::size_t n_steps) {
    if (order != 1 && order != 2 && order != 4) throw ValidationError("Trotter order must be 1, 2 or 4");
    if (n_steps < 1) throw ValidationError("step count must be >= 1");
    TrotterPlan plan{order, step_angle, n_steps, {}};
    if (order == 1) {
        plan.step = detail::first_order(fragments, kinetic, 1.0);
    } else if (order == 2) {
        plan.step = detail::second_order(fragments, kinetic, 1.0);
    } else {
        const double u = suzuki_weight();
        for (double w : {u, u, 1.0 - 4.0 * u, u, u})
            for (const auto& e : detail::second_order(fragments, kinetic, w)) detail::append_fused(plan.step, e);
    }
    return plan;
}

// The whole evolution: n_steps copies of the step with adjacent identical
// exponentials across step seams merged.
inline std::vector<PlanEntry> fused_sequence(const TrotterPlan& plan) {
    std::vector<PlanEntry> seq;
    for (std::size_t s = 0; s < plan.n_steps; ++s)
        for (const auto& e : plan.step) detail::append_fused(seq, e);
    return seq;
}

}  // namespace vibronic::circuit
