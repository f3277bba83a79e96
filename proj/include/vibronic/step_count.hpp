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
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "vibronic/error.hpp"
#include "vibronic/grid.hpp"
#include "vibronic/model.hpp"
#include "vibronic/observables.hpp"
#include "vibronic/sim/oracle.hpp"
#include "vibronic/sim/product_formula.hpp"
#include "vibronic/sim/state.hpp"

namespace vibronic {

struct StepCountOptions {
    std::size_t probe_budget = 10;  // largest probe is 2^(budget-1) steps
    std::size_t proxy_dimension_cap = std::size_t{1} << 14;
    std::optional<std::size_t> initial_state;  // default: highest diagonal constant
    bool include_v0 = true;
};

struct StepProbe {
    std::size_t n_steps = 0;
    double error = 0.0;
};

struct StepSelection {
    std::size_t n_steps = 1;
    unsigned order = 1;
    double prefactor = 0.0;  // a in error(r) = a r^{-p}
    std::vector<StepProbe> probes;
    std::vector<std::size_t> proxy_modes;
    std::string reference;  // "exact" or "order-4 reference"
};

// Weight of each mode in the couplings, sum over |c| * Delta^|alpha|.
inline std::vector<double> mode_weights(const VibronicModel& m, const GridConfig& g) {
    std::vector<double> w(m.n_modes(), 0.0);
    for (const auto& [key, c] : m.couplings)
        for (const auto& [mode, e] : key.monomial.powers())
            w[mode] += std::abs(c) * std::pow(g.spacing(), static_cast<double>(key.monomial.degree()));
    return w;
}

// Restriction of `m` to the given modes (renumbered in the order given).
// Couplings touching any other mode are dropped; constants are kept.
inline VibronicModel restrict_modes(const VibronicModel& m, const std::vector<std::size_t>& modes) {
    std::map<std::size_t, std::size_t> remap;
    std::vector<double> freqs;
    for (auto r : modes) {
        remap[r] = freqs.size();
        freqs.push_back(m.frequencies.at(r));
    }
    VibronicModel out = make_model(m.n_states_logical, freqs, 0);
    out.dipole = m.dipole;
    for (const auto& [key, c] : m.couplings) {
        std::vector<MultiIndex::Power> powers;
        bool keep = true;
        for (const auto& [mode, e] : key.monomial.powers()) {
            auto it = remap.find(mode);
            if (it == remap.end()) {
                keep = false;
                break;
            }
            powers.emplace_back(it->second, e);
        }
        if (!keep) continue;
        const auto alpha = MultiIndex::from_powers(std::move(powers));
        out.couplings[{key.bra, key.ket, alpha}] = c;
        out.max_degree = std::max(out.max_degree, alpha.degree());
    }
    return out;
}

// Modes with the largest coupling weight, as many as fit under the cap.
inline std::vector<std::size_t> proxy_modes(const VibronicModel& m, const GridConfig& g, std::size_t cap) {
    std::size_t count = 0;
    std::size_t dim = m.n_states;
    while (count < m.n_modes() && dim * g.points() <= cap) {
        dim *= g.points();
        ++count;
    }
    const auto w = mode_weights(m, g);
    std::vector<std::size_t> order(m.n_modes());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return w[a] > w[b]; });
    order.resize(count);
    std::sort(order.begin(), order.end());
    return order;
}

inline std::size_t brightest_state(const VibronicModel& m) {
    std::size_t best = 0;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m.n_states_logical; ++j) {
        const double e = m.coupling(j, j, MultiIndex{});
        if (e > top) {
            top = e;
            best = j;
        }
    }
    return best;
}

// Empirical step count: Trotter errors of a small proxy of the model are
// measured at r = 1, 2, 4, ...; once successive ratios approach 2^p the
// power law a r^{-p} is fitted to the last two probes and solved for eps.
inline StepSelection select_step_count(const VibronicModel& m, const GridConfig& g, double time, double epsilon,
                                       unsigned order, const StepCountOptions& opt = {}) {
    if (!(epsilon > 0.0)) throw ValidationError("error target must be positive");
    if (order != 1 && order != 2 && order != 4) throw ValidationError("Trotter order must be 1, 2 or 4");
    if (opt.probe_budget < 2) throw ValidationError("probe budget must be at least 2");

    StepSelection sel;
    sel.order = order;
    sel.proxy_modes = proxy_modes(m, g, opt.proxy_dimension_cap);
    const auto proxy = restrict_modes(m, sel.proxy_modes);
    const std::size_t j0 = opt.initial_state.value_or(brightest_state(m));
    const auto psi0 = prepare_vertical_excitation(proxy, g, j0);
    const sim::ProductFormula pf(proxy, g, opt.include_v0);

    StateVector reference;
    if (SystemShape(proxy, g).dim() <= dense_dimension_cap) {
        reference = sim::ExactPropagator(proxy, g, opt.include_v0).evolve(psi0, time);
        sel.reference = "exact";
    } else {
        const std::size_t r_ref = std::size_t{1} << (opt.probe_budget + 1);
        reference = pf.evolve(psi0, time, r_ref, 4);
        sel.reference = "order-4 reference";
    }

    const double p = static_cast<double>(order);
    bool asymptotic = false;
    std::size_t r = 1;
    for (std::size_t i = 0; i < opt.probe_budget; ++i, r *= 2) {
        const double err = trace_distance(reference, pf.evolve(psi0, time, r, order));
        sel.probes.push_back({r, err});
        if (i == 0 && err <= epsilon) {
            sel.n_steps = 1;
            sel.prefactor = err;
            return sel;
        }
        if (err < 1e-11) break;
        if (i == 0) continue;
        const double prev = sel.probes[i - 1].error;
        if (prev <= 0.5 && err >= prev) {
            throw NumericalError("step-count fit rejected: probe errors not decreasing (" + std::to_string(prev) +
                                 " at r=" + std::to_string(r / 2) + ", " + std::to_string(err) +
                                 " at r=" + std::to_string(r) + ")");
        }
        const double slope = std::log2(prev / err);
        if (err <= 0.5 && std::abs(slope - p) <= 0.25 * p) {
            asymptotic = true;
            break;
        }
    }
    const auto& last = sel.probes.back();
    const auto& before = sel.probes[sel.probes.size() - 2];
    if (!asymptotic && (last.error >= before.error || last.error > 0.5)) {
        throw NumericalError("step-count fit rejected: probes did not reach the asymptotic regime within the budget");
    }
    // least squares in log space with the slope fixed at -p
    const double log_a = 0.5 * (std::log(last.error) + p * std::log(static_cast<double>(last.n_steps)) +
                                std::log(before.error) + p * std::log(static_cast<double>(before.n_steps)));
    sel.prefactor = std::exp(log_a);
    sel.n_steps = static_cast<std::size_t>(std::max(1.0, std::ceil(std::pow(sel.prefactor / epsilon, 1.0 / p))));
    return sel;
}

}  // namespace vibronic
