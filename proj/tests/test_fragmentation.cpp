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

TEST(Diagonalizer, ControlIsLowestSetBit) {
    const auto r = diagonalizer_for(0b110, 3);
    EXPECT_EQ(r.control_qubit, 1u);
    EXPECT_EQ(r.hadamard_on, 1u);
    ASSERT_EQ(r.cnots.size(), 1u);
    EXPECT_EQ(r.cnots[0], (std::pair<unsigned, unsigned>{1, 2}));
    EXPECT_EQ(r.apply_cnots(0b010), 0b110u);
    EXPECT_EQ(r.apply_cnots(0b001), 0b001u);
    EXPECT_THROW(diagonalizer_for(0, 3), ValidationError);
    EXPECT_THROW(diagonalizer_for(8, 3), ValidationError);
}

TEST(Fragments, PairStatesByXorOffset) {
    const auto frags = fragments(make_model(8, {1.0}));
    ASSERT_EQ(frags.size(), 8u);
    EXPECT_FALSE(frags[0].clifford.has_value());
    EXPECT_EQ(frags[0].pairs.size(), 8u);
    for (std::size_t m = 1; m < 8; ++m) {
        EXPECT_EQ(frags[m].pairs.size(), 4u);
        for (const auto& [j, i] : frags[m].pairs) EXPECT_EQ(j ^ i, m);
    }
    EXPECT_THROW(fragments(VibronicModel{3, 3, {}, 0, {}, {}}), ValidationError);
}

TEST(Fragments, ElectronicCliffordIsOrthogonal) {
    for (std::size_t m = 1; m < 8; ++m) {
        const auto U = electronic_clifford(diagonalizer_for(m, 3), 8);
        EXPECT_LT((U * U.transpose() - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-15) << m;
    }
}

TEST(Fragments, SumReconstructsPotentialAndEachDiagonalizes) {
    std::mt19937_64 rng(11);
    const GridConfig g(2);
    for (std::size_t N : {2u, 4u, 8u}) {
        const auto m = testing::random_model(rng, N, 2, 2);
        const PotentialTable table(m, g);
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(table.shape().dim()),
                                                    static_cast<Eigen::Index>(table.shape().dim()));
        for (const auto& f : fragments(m)) {
            sum += dense_fragment(f, table);
            EXPECT_LT(verify_block_diagonal(f, m, g), 1e-12) << "N=" << N << " m=" << f.m;
        }
        EXPECT_LT((sum - build_potential_matrix(m, g)).cwiseAbs().maxCoeff(), 1e-13) << "N=" << N;
    }
}

TEST(Fragments, DiagonalBlockLocatesConjugatedEntries) {
    std::mt19937_64 rng(5);
    const auto m = testing::random_model(rng, 4, 1, 1);
    const GridConfig g(2);
    const PotentialTable table(m, g);
    const auto& shape = table.shape();
    for (const auto& f : fragments(m)) {
        const auto C = conjugated_fragment(f, table);
        for (std::size_t jp = 0; jp < 4; ++jp) {
            const auto [a, sign] = f.diagonal_block(jp);
            for (std::size_t v = 0; v < shape.vib_dim(); ++v) {
                const auto idx = static_cast<Eigen::Index>(shape.index(jp, v));
                EXPECT_NEAR(C(idx, idx), sign * table.value(a, a ^ f.m, v), 1e-14);
            }
        }
    }
}

TEST(Fragments, PaddedStatesLeaveFragmentsEmpty) {
    auto m = make_model(3, {1.0}, 1);
    m.set_coupling(0, 1, MultiIndex::single(0), 0.1);
    m.set_coupling(2, 2, MultiIndex{}, 0.3);
    const PotentialTable table(m, GridConfig(2), false);
    const auto frags = fragments(m);
    EXPECT_FALSE(fragment_is_empty(frags[0], table));
    EXPECT_FALSE(fragment_is_empty(frags[1], table));
    EXPECT_TRUE(fragment_is_empty(frags[2], table));
    EXPECT_TRUE(fragment_is_empty(frags[3], table));
    EXPECT_EQ(circuit::active_fragments(m, false), (std::vector<std::size_t>{0, 1}));
}

}  // namespace
}  // namespace vibronic
