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

#include <bit>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "vibronic/error.hpp"
#include "vibronic/grid.hpp"
#include "vibronic/model.hpp"

namespace vibronic {

// Clifford U = Had_{hadamard_on} * prod CNOT(control, target) that maps the
// XOR-pair structure of a fragment onto Z on one qubit. CNOTs are applied
// first; they share a control so their order is irrelevant.
struct DiagonalizerRecipe {
    unsigned control_qubit = 0;
    std::vector<std::pair<unsigned, unsigned>> cnots;  // (control, target)
    unsigned hadamard_on = 0;

    std::size_t apply_cnots(std::size_t j) const {
        for (const auto& [c, t] : cnots)
            if ((j >> c) & 1u) j ^= std::size_t{1} << t;
        return j;
    }

    // For a computational state j' after conjugation, the original pair
    // (a, a ^ m) whose block sits there, and the Z sign it carries.
    std::pair<std::size_t, int> block_for(std::size_t j_prime) const {
        const std::size_t cleared = j_prime & ~(std::size_t{1} << hadamard_on);
        const int sign = ((j_prime >> hadamard_on) & 1u) ? -1 : 1;
        return {apply_cnots(cleared), sign};
    }

    bool operator==(const DiagonalizerRecipe&) const = default;
};

struct Fragment {
    std::size_t m = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::optional<DiagonalizerRecipe> clifford;  // empty for m == 0

    // Block (a, a ^ m) and sign landing on electronic state j' once the
    // fragment is diagonalized.
    std::pair<std::size_t, int> diagonal_block(std::size_t j_prime) const {
        return clifford ? clifford->block_for(j_prime) : std::pair<std::size_t, int>{j_prime, 1};
    }
};

// Control is the lowest set bit of m.
inline DiagonalizerRecipe diagonalizer_for(std::size_t m, unsigned n_qubits) {
    if (m == 0) throw ValidationError("fragment 0 is already diagonal");
    if (n_qubits >= 64 || m >= (std::size_t{1} << n_qubits)) {
        throw ValidationError("fragment offset " + std::to_string(m) + " out of range for " + std::to_string(n_qubits) +
                              " qubits");
    }
    DiagonalizerRecipe r;
    r.control_qubit = static_cast<unsigned>(std::countr_zero(m));
    r.hadamard_on = r.control_qubit;
    for (unsigned q = r.control_qubit + 1; q < n_qubits; ++q)
        if ((m >> q) & 1u) r.cnots.emplace_back(r.control_qubit, q);
    return r;
}

inline std::vector<Fragment> fragments(const VibronicModel& model) {
    const auto N = model.n_states;
    if (!std::has_single_bit(N)) throw ValidationError("fragmentation needs a power-of-two state count");
    const auto n = model.electronic_qubits();
    std::vector<Fragment> out(N);
    for (std::size_t m = 0; m < N; ++m) {
        auto& f = out[m];
        f.m = m;
        for (std::size_t j = 0; j < N; ++j) {
            const auto partner = j ^ m;
            if (j <= partner) f.pairs.emplace_back(j, partner);
        }
        if (m != 0) f.clifford = diagonalizer_for(m, n);
    }
    return out;
}

// True when every block V_{j, j^m} is identically zero.
inline bool fragment_is_empty(const Fragment& f, const PotentialTable& table) {
    for (const auto& [j, i] : f.pairs)
        if (table.has_block(j, i) || table.has_block(i, j)) return false;
    return true;
}

// Dense H_m = sum_j |j><m^j| (x) V_{j, m^j}.
inline Eigen::MatrixXd dense_fragment(const Fragment& f, const PotentialTable& table) {
    const auto& shape = table.shape();
    const auto dim = shape.dim();
    if (dim > dense_dimension_cap) throw SizeCapError("dense fragment exceeds cap");
    const auto vib = shape.vib_dim();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < shape.n_states; ++j) {
        const auto i = j ^ f.m;
        auto block = table.block(j, i);
        if (block.empty()) continue;
        for (std::size_t v = 0; v < vib; ++v)
            H(static_cast<Eigen::Index>(shape.index(j, v)), static_cast<Eigen::Index>(shape.index(i, v))) = block[v];
    }
    return H;
}

// 2^n x 2^n matrix of the recipe's Clifford.
inline Eigen::MatrixXd electronic_clifford(const DiagonalizerRecipe& r, std::size_t n_states) {
    const auto N = static_cast<Eigen::Index>(n_states);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N, N);
    for (std::size_t j = 0; j < n_states; ++j)
        C(static_cast<Eigen::Index>(r.apply_cnots(j)), static_cast<Eigen::Index>(j)) = 1.0;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
    const double s = 1.0 / std::sqrt(2.0);
    const std::size_t bit = std::size_t{1} << r.hadamard_on;
    for (std::size_t j = 0; j < n_states; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        H(jj, jj) = (j & bit) ? -s : s;
        H(static_cast<Eigen::Index>(j ^ bit), jj) = s;
    }
    return H * C;
}

// U H_m U^dag on the full space, U acting on the electronic factor only.
inline Eigen::MatrixXd conjugated_fragment(const Fragment& f, const PotentialTable& table) {
    Eigen::MatrixXd H = dense_fragment(f, table);
    if (!f.clifford) return H;
    const auto vib = static_cast<Eigen::Index>(table.shape().vib_dim());
    const Eigen::MatrixXd U = electronic_clifford(*f.clifford, table.n_states());
    const Eigen::MatrixXd Ufull = Eigen::kroneckerProduct(U, Eigen::MatrixXd::Identity(vib, vib));
    return Ufull * H * Ufull.transpose();
}

// Largest |entry| of U H_m U^dag that couples two different electronic states.
inline double verify_block_diagonal(const Fragment& f, const VibronicModel& model, const GridConfig& grid,
                                    bool include_v0 = true) {
    checked_dimension(model, grid, dense_dimension_cap, "verify_block_diagonal");
    PotentialTable table(model, grid, include_v0);
    const Eigen::MatrixXd C = conjugated_fragment(f, table);
    const auto& shape = table.shape();
    double worst = 0.0;
    for (Eigen::Index r = 0; r < C.rows(); ++r)
        for (Eigen::Index c = 0; c < C.cols(); ++c)
            if (shape.electronic(static_cast<std::size_t>(r)) != shape.electronic(static_cast<std::size_t>(c)))
                worst = std::max(worst, std::abs(C(r, c)));
    return worst;
}

}  // namespace vibronic
