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
#include <complex>
#include <cstddef>
#include <vector>

#include "vibronic/circuit/compiler.hpp"
#include "vibronic/circuit/trotter.hpp"
#include "vibronic/grid.hpp"
#include "vibronic/model.hpp"
#include "vibronic/parallel.hpp"
#include "vibronic/sim/state.hpp"

namespace vibronic::sim {

// Product formulas with every factor exponentiated exactly: fragment
// exponentials as 2x2 rotations between paired states (diagonal phases for
// m = 0), the kinetic term as a diagonal phase in the Fourier basis.
// Compiled circuits reproduce this up to fixed-point rounding.
class ProductFormula {
  public:
    ProductFormula(const VibronicModel& m, const GridConfig& g, bool include_v0 = true)
        : model_(m), grid_(g), include_v0_(include_v0), table_(m, g, include_v0) {}

    const SystemShape& shape() const noexcept { return table_.shape(); }

    void apply_fragment(StateVector& s, std::size_t m, double angle) const {
        const auto& shape = table_.shape();
        const auto vib = shape.vib_dim();
        for (std::size_t a = 0; a < shape.n_states; ++a) {
            const auto b = a ^ m;
            if (b < a) continue;
            const auto block = table_.block(a, b);
            if (block.empty()) continue;
            cplx* pa = &s[shape.index(a, 0)];
            if (m == 0) {
                parallel_chunks(vib, [&](std::size_t lo, std::size_t hi) {
                    for (std::size_t v = lo; v < hi; ++v) pa[v] *= std::polar(1.0, angle * block[v]);
                });
                continue;
            }
            cplx* pb = &s[shape.index(b, 0)];
            parallel_chunks(vib, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t v = lo; v < hi; ++v) {
                    const double c = std::cos(angle * block[v]), sn = std::sin(angle * block[v]);
                    const cplx xa = pa[v], xb = pb[v];
                    pa[v] = c * xa + cplx(0.0, sn) * xb;
                    pb[v] = cplx(0.0, sn) * xa + c * xb;
                }
            });
        }
    }

    void apply_kinetic(StateVector& s, double angle) const {
        const auto& shape = table_.shape();
        const double delta = grid_.spacing();
        std::vector<cplx> phase(shape.points);
        for (std::size_t r = 0; r < shape.n_modes; ++r) {
            for (std::size_t y = 0; y < shape.points; ++y) {
                const double p = delta * static_cast<double>(grid_.signed_label(y));
                phase[y] = std::polar(1.0, angle * 0.5 * model_.frequencies[r] * p * p);
            }
            apply_mode_qft(s, r, false);
            const auto stride = shape.stride(r);
            parallel_chunks(s.size(), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) s[i] *= phase[(i / stride) % shape.points];
            });
            apply_mode_qft(s, r, true);
        }
    }

    void apply(StateVector& s, const std::vector<circuit::PlanEntry>& seq, double step_angle) const {
        for (const auto& e : seq) {
            if (e.kind == circuit::PlanEntry::Kind::kinetic)
                apply_kinetic(s, e.weight * step_angle);
            else
                apply_fragment(s, e.fragment, e.weight * step_angle);
        }
    }

    // r steps of order p approximating exp(i t H).
    StateVector evolve(const StateVector& s, double t, std::size_t r, unsigned order) const {
        const auto plan = circuit::plan_for(model_, order, t / static_cast<double>(r), r, include_v0_);
        StateVector out = s;
        apply(out, circuit::fused_sequence(plan), plan.step_angle);
        return out;
    }

  private:
    VibronicModel model_;
    GridConfig grid_;
    bool include_v0_;
    PotentialTable table_;
};

}  // namespace vibronic::sim
