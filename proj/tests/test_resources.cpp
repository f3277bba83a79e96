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

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

namespace vibronic {
namespace {

// N states, M modes, every monomial of degree <= 2 on every state pair.
VibronicModel full_qvc(std::size_t n_states, std::size_t n_modes) {
    auto m = make_model(n_states, std::vector<double>(n_modes, 0.01), 2);
    for (std::size_t j = 0; j < n_states; ++j)
        for (std::size_t i = j; i < n_states; ++i) {
            m.set_coupling(j, i, MultiIndex{}, 0.01);
            for (std::size_t r = 0; r < n_modes; ++r) {
                m.set_coupling(j, i, MultiIndex::single(r), 0.001);
                for (std::size_t s = r; s < n_modes; ++s) m.set_coupling(j, i, MultiIndex::from_factors({r, s}), 1e-4);
            }
        }
    return m;
}

circuit::CompileOptions width(unsigned w) {
    circuit::CompileOptions o;
    o.total_bits = w;
    return o;
}

TEST(QubitCount, ReproducesTableRowsAtCalibratedWidth) {
    const GridConfig g(4);
    const circuit::FixedPoint fp{28, 24};
    struct Row {
        std::size_t n, m;
        unsigned total;
    };
    for (const auto& r : {Row{5, 19, 146}, Row{6, 21, 154}, Row{4, 11, 113}, Row{4, 246, 1053}}) {
        const auto model = make_model(r.n, std::vector<double>(r.m, 1.0), 2);
        const auto q = qubit_count(model, g, fp, 2);
        EXPECT_EQ(q.total, r.total) << "N=" << r.n << " M=" << r.m;
        EXPECT_EQ(q.ancilla, 67u);
        EXPECT_EQ(q.system, r.m * 4 + model.electronic_qubits());
    }
}

TEST(QubitCount, ShippedModelsAtDefaultWidth) {
    const GridConfig g(4);
    for (const auto& [name, total] : std::vector<std::pair<std::string, unsigned>>{
             {"no4_anth", 146}, {"no4_anth_dimer", 154}, {"anth_c60_m11", 113}, {"anth_c60_m246", 1053}}) {
        const auto m = testing::shipped_model(name);
        const auto rep = estimate_total(m, g, units::fs_to_au(100.0), 1, 2, width(28));
        EXPECT_EQ(rep.qubits.total, total) << name;
    }
}

TEST(CostModel, DefaultFormulas) {
    const CostModel c;
    EXPECT_EQ(c.load(1), 0u);
    EXPECT_EQ(c.load(8), 7u);
    EXPECT_EQ(c.mult(4, 4), 28u);
    EXPECT_EQ(c.mult_add_phase(28, 8), 2u * 28u * 8u - 28u);
    EXPECT_EQ(c.adder(28), 27u);
    EXPECT_EQ(c.qft(4), 0u);
    EXPECT_EQ(CostModel::with_qft_rotations().qft(4), 6u);
}

TEST(ToffoliCount, HandComputedExponentials) {
    // N=2, M=1, k=3, w=10.
    auto m = make_model(2, {1.0}, 1);
    m.set_coupling(0, 1, MultiIndex::single(0), 0.1);
    m.set_coupling(0, 0, MultiIndex{}, 0.2);
    const GridConfig g(3);
    const auto frags = fragments(m);
    const auto opt = width(10);
    // load over 2 entries (1) + coefficient x Q0 into the phase (2*10*3-10) + unload (1)
    EXPECT_EQ(toffoli_count(circuit::compile_diagonal_fragment(frags[1], m, g, 0.1, opt)), 52u);
    // constant: load (1) + adder (9) + unload (1); Q0^2: load (1) + square (15) + phase (2*10*6-10) + 15 + 1
    EXPECT_EQ(toffoli_count(circuit::compile_diagonal_fragment(frags[0], m, g, 0.1, opt)), 11u + 142u);
    // kinetic: constant load (0) + square (15) + phase (110) + unsquare (15)
    EXPECT_EQ(toffoli_count(circuit::compile_kinetic(m, g, 0.1, opt)), 140u);
    EXPECT_EQ(toffoli_count(circuit::compile_kinetic(m, g, 0.1, opt), CostModel::with_qft_rotations()), 146u);
}

TEST(StepEstimator, EqualsCompiledCountExactly) {
    std::mt19937_64 rng(99);
    const GridConfig g(2);
    for (int trial = 0; trial < 6; ++trial) {
        const auto m = testing::random_model(rng, trial < 3 ? 4 : 3, 2, trial % 2 ? 3 : 2, 0.5);
        for (unsigned order : {1u, 2u, 4u})
            for (bool caching : {true, false}) {
                circuit::CompileOptions opt;
                opt.caching = caching;
                const auto est = estimate_step(m, g, 0.05, order, opt);
                const auto compiled = circuit::build_trotter_step(m, g, 0.05, order, opt);
                EXPECT_EQ(est.toffoli(), toffoli_count(compiled)) << "trial " << trial << " order " << order;
                EXPECT_EQ(est.fixed_point, compiled.fixed_point());
            }
    }
}

TEST(StepEstimator, WholeEvolutionChargesSeamsOnce) {
    const auto m = testing::shipped_model("three_state");
    const GridConfig g(3);
    for (unsigned order : {1u, 2u, 4u})
        for (std::size_t r : {1u, 2u, 5u}) {
            const auto rep = estimate_total(m, g, 200.0, r, order, width(20));
            const auto compiled = circuit::build_evolution(m, g, 200.0, r, order, width(20));
            EXPECT_EQ(rep.total_toffoli, toffoli_count(compiled)) << "order " << order << " r " << r;
            if (order == 1) {
                EXPECT_EQ(rep.total_toffoli, r * rep.toffoli_per_step);
            } else if (r > 1) {
                EXPECT_LT(rep.total_toffoli, r * rep.toffoli_per_step);
            }
        }
}

TEST(StepEstimator, BreakdownSumsToTotal) {
    const auto m = testing::shipped_model("toy_2state");
    const auto est = estimate_step(m, GridConfig(3), 0.1, 2, width(16));
    const auto& b = est.breakdown;
    EXPECT_EQ(b.load + b.multiply + b.phase + b.qft + b.uncompute, est.toffoli());
    std::uint64_t by_exp = 0, by_class = 0;
    for (const auto& [k, v] : b.by_exponential) by_exp += v;
    for (const auto& [k, v] : b.by_class) by_class += v;
    EXPECT_EQ(by_exp, est.toffoli());
    EXPECT_EQ(by_class, est.toffoli());
    EXPECT_TRUE(b.by_exponential.count("T"));
    EXPECT_TRUE(b.by_class.count("kinetic"));
}

TEST(StepEstimator, CachingSavesOneMultiplyAndItsUncompute) {
    auto m = make_model(2, {1.0, 1.0, 1.0}, 3);
    m.set_coupling(0, 1, MultiIndex::from_factors({0, 1}), 0.1);
    m.set_coupling(0, 1, MultiIndex::from_factors({0, 1, 2}), 0.05);
    const GridConfig g(3);
    auto on = width(12), off = width(12);
    off.caching = false;
    const auto saved = estimate_step(m, g, 0.1, 1, off).toffoli() - estimate_step(m, g, 0.1, 1, on).toffoli();
    EXPECT_EQ(saved, 2u * CostModel{}.mult(3, 3));
}

TEST(StepEstimator, AddingATermNeverLowersCost) {
    std::mt19937_64 rng(8);
    const GridConfig g(3);
    auto m = testing::random_model(rng, 4, 3, 2, 0.2);
    std::uniform_int_distribution<std::size_t> state(0, 3), mode(0, 2);
    auto prev = estimate_step(m, g, 0.1, 2, width(20)).toffoli();
    for (int i = 0; i < 20; ++i) {
        const auto r = mode(rng), s = mode(rng);
        m.set_coupling(state(rng), state(rng), i % 2 ? MultiIndex::single(r) : MultiIndex::from_factors({r, s}), 0.01);
        const auto next = estimate_step(m, g, 0.1, 2, width(20)).toffoli();
        EXPECT_GE(next, prev);
        prev = next;
    }
}

TEST(StepEstimator, LoadCostLinearInStates) {
    // Same diagonal terms on every state: only fragment 0, one select per monomial.
    std::vector<std::uint64_t> loads;
    for (std::size_t N : {2u, 4u, 8u, 16u}) {
        auto m = make_model(N, {1.0, 1.0}, 2);
        for (std::size_t j = 0; j < N; ++j) {
            m.set_coupling(j, j, MultiIndex::single(0), 0.01 * static_cast<double>(j + 1));
            m.set_coupling(j, j, MultiIndex::from_factors({0, 1}), 0.02);
        }
        loads.push_back(estimate_step(m, GridConfig(3), 0.1, 1, width(20)).breakdown.load);
    }
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const std::uint64_t N = std::uint64_t{2} << i;
        EXPECT_EQ(loads[i], loads[0] * (N - 1));
    }
}

TEST(StepEstimator, QuadraticScalingInModes) {
    // Full quadratic models; the O(M) linear and kinetic parts fade by M=16.
    std::vector<double> ms, costs;
    for (std::size_t M : {16u, 32u, 64u}) {
        const auto m = full_qvc(2, M);
        ms.push_back(static_cast<double>(M));
        costs.push_back(static_cast<double>(estimate_step(m, GridConfig(4), 1.0, 1, width(28)).toffoli()));
    }
    EXPECT_NEAR(testing::log_log_slope(ms, costs), 2.0, 0.15);
}

TEST(ResourceReport, TableAndJson) {
    auto rep =
        estimate_total(testing::shipped_model("no4_anth"), GridConfig(4), units::fs_to_au(100.0), 3, 2, width(28));
    rep.system = "(NO)4-Anth";
    rep.epsilon = 0.01;
    const auto table = resource_table({rep});
    EXPECT_NE(table.find("# Qubits"), std::string::npos);
    EXPECT_NE(table.find("146"), std::string::npos);
    const auto js = to_json(rep);
    EXPECT_EQ(js.at("qubits").at("total"), 146);
    EXPECT_EQ(js.at("n_steps"), 3);
    EXPECT_EQ(js.at("total_toffoli").get<std::uint64_t>(), rep.total_toffoli);
    EXPECT_EQ(scientific(2.66e7), "2.66e+07");
}

}  // namespace
}  // namespace vibronic
