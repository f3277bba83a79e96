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
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vibronic/error.hpp"
#include "vibronic/model.hpp"

namespace vibronic {

using cplx = std::complex<double>;

// Largest Hilbert-space dimension for which dense matrices are built.
inline constexpr std::size_t dense_dimension_cap = std::size_t{1} << 12;
// Largest amplitude count for statevector work.
inline constexpr std::size_t amplitude_cap = std::size_t{1} << 20;

// K = 2^k grid points per mode with spacing Delta = sqrt(2 pi / K).
class GridConfig {
  public:
    explicit GridConfig(unsigned bits) : bits_(bits) {
        if (bits < 1 || bits > 20) throw ValidationError("grid bits must be in [1, 20]");
    }

    unsigned bits() const noexcept { return bits_; }
    std::size_t points() const noexcept { return std::size_t{1} << bits_; }
    double spacing() const noexcept { return std::sqrt(2.0 * std::numbers::pi / static_cast<double>(points())); }

    void check_label(std::size_t x) const {
        if (x >= points()) throw ValidationError("grid label " + std::to_string(x) + " out of range");
    }

    // Two's-complement reading of a k-bit label.
    std::int64_t signed_label(std::size_t x) const {
        check_label(x);
        const auto half = static_cast<std::int64_t>(points() / 2);
        const auto v = static_cast<std::int64_t>(x);
        return v >= half ? v - static_cast<std::int64_t>(points()) : v;
    }

  private:
    unsigned bits_;
};

// Offset-binary position Delta * (x - K/2).
inline double position_value(const GridConfig& g, std::size_t x) {
    g.check_label(x);
    return g.spacing() * (static_cast<double>(x) - static_cast<double>(g.points() / 2));
}

// Position under the signed-register convention used by the compiler.
inline double signed_value(const GridConfig& g, std::size_t x) {
    return g.spacing() * static_cast<double>(g.signed_label(x));
}

// Unitary DFT F|x> = K^{-1/2} sum_y exp(+2 pi i x y / K)|y>, as a K x K matrix.
inline Eigen::MatrixXcd qft_matrix(std::size_t K) {
    Eigen::MatrixXcd F(K, K);
    const double norm = 1.0 / std::sqrt(static_cast<double>(K));
    for (std::size_t y = 0; y < K; ++y)
        for (std::size_t x = 0; x < K; ++x) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((x * y) % K) / static_cast<double>(K);
            F(y, x) = norm * cplx(std::cos(angle), std::sin(angle));
        }
    return F;
}

// Diagonal position operator in the signed convention.
inline Eigen::MatrixXcd position_matrix(const GridConfig& g) {
    const auto K = g.points();
    Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(K, K);
    for (std::size_t x = 0; x < K; ++x) Q(x, x) = signed_value(g, x);
    return Q;
}

// P = F^dag X_{k-1} Q X_{k-1} F with Q the offset-binary position operator.
inline Eigen::MatrixXcd momentum_matrix(const GridConfig& g) {
    const auto K = g.points();
    if (K > dense_dimension_cap) throw SizeCapError("momentum matrix: K exceeds dense cap");
    Eigen::MatrixXcd Qoff = Eigen::MatrixXcd::Zero(K, K);
    Eigen::MatrixXcd Xmsb = Eigen::MatrixXcd::Zero(K, K);
    for (std::size_t x = 0; x < K; ++x) {
        Qoff(x, x) = position_value(g, x);
        Xmsb(x ^ (K / 2), x) = 1.0;
    }
    const auto F = qft_matrix(K);
    return F.adjoint() * Xmsb * Qoff * Xmsb * F;
}

// Flat index layout of the system register: electronic state most
// significant, then mode 0, ..., mode M-1.
struct SystemShape {
    std::size_t n_states = 1;
    std::size_t points = 2;
    std::size_t n_modes = 0;

    SystemShape() = default;
    SystemShape(const VibronicModel& m, const GridConfig& g)
        : n_states(m.n_states), points(g.points()), n_modes(m.n_modes()) {}

    std::size_t vib_dim() const {
        std::size_t d = 1;
        for (std::size_t r = 0; r < n_modes; ++r) d *= points;
        return d;
    }
    std::size_t dim() const { return n_states * vib_dim(); }
    std::size_t stride(std::size_t mode) const {
        std::size_t s = 1;
        for (std::size_t r = mode + 1; r < n_modes; ++r) s *= points;
        return s;
    }
    std::size_t electronic(std::size_t index) const { return index / vib_dim(); }
    std::size_t label(std::size_t index, std::size_t mode) const { return (index / stride(mode)) % points; }
    std::size_t index(std::size_t j, std::size_t vib) const { return j * vib_dim() + vib; }
};

// Checked product N * K^M; throws SizeCapError above `cap`.
inline std::size_t checked_dimension(const VibronicModel& m, const GridConfig& g, std::size_t cap, const char* what) {
    long double d = static_cast<long double>(m.n_states);
    for (std::size_t r = 0; r < m.n_modes(); ++r) d *= static_cast<long double>(g.points());
    if (d > static_cast<long double>(cap)) {
        throw SizeCapError(std::string(what) + ": dimension N*K^M exceeds cap of " + std::to_string(cap));
    }
    return static_cast<std::size_t>(d);
}

// Values of every nonzero potential block V_{ji} on the vibrational grid.
// The harmonic term sum_r omega_r Q_r^2 / 2 is folded into the diagonal
// blocks when `include_v0` is set. Both the dense oracle and the fragment
// decomposition read from this table, so their entries agree bitwise.
class PotentialTable {
  public:
    PotentialTable(const VibronicModel& m, const GridConfig& g, bool include_v0 = true)
        : shape_(m, g), n_states_(m.n_states), blocks_(m.n_states * m.n_states) {
        checked_dimension(m, g, amplitude_cap, "potential table");
        const auto K = g.points();
        const auto vib = shape_.vib_dim();
        const auto M = m.n_modes();

        std::vector<double> q(K);
        for (std::size_t x = 0; x < K; ++x) q[x] = signed_value(g, x);
        std::vector<std::size_t> strides(M);
        for (std::size_t r = 0; r < M; ++r) strides[r] = shape_.stride(r);

        auto accumulate = [&](std::vector<double>& values, const MultiIndex& alpha, double c) {
            for (std::size_t v = 0; v < vib; ++v) {
                double term = c;
                for (const auto& [mode, exponent] : alpha.powers()) {
                    const double qr = q[(v / strides[mode]) % K];
                    for (unsigned e = 0; e < exponent; ++e) term *= qr;
                }
                values[v] += term;
            }
        };

        if (include_v0 && M > 0) {
            for (std::size_t j = 0; j < n_states_; ++j) {
                auto& values = block_storage(j, j, vib);
                for (std::size_t r = 0; r < M; ++r)
                    accumulate(values, MultiIndex::single(r, 2), 0.5 * m.frequencies[r]);
            }
        }
        for (const auto& [key, c] : m.couplings) {
            if (c == 0.0) continue;
            accumulate(block_storage(key.bra, key.ket, vib), key.monomial, c);
        }
    }

    const SystemShape& shape() const noexcept { return shape_; }
    std::size_t n_states() const noexcept { return n_states_; }

    bool has_block(std::size_t j, std::size_t i) const { return !blocks_[j * n_states_ + i].empty(); }

    // Empty span when the block is identically zero.
    std::span<const double> block(std::size_t j, std::size_t i) const { return blocks_[j * n_states_ + i]; }

    double value(std::size_t j, std::size_t i, std::size_t vib) const {
        const auto& b = blocks_[j * n_states_ + i];
        return b.empty() ? 0.0 : b[vib];
    }

  private:
    std::vector<double>& block_storage(std::size_t j, std::size_t i, std::size_t vib) {
        auto& b = blocks_[j * n_states_ + i];
        if (b.empty()) b.assign(vib, 0.0);
        return b;
    }

    SystemShape shape_;
    std::size_t n_states_;
    std::vector<std::vector<double>> blocks_;
};

inline Eigen::MatrixXd build_potential_matrix(const VibronicModel& m, const GridConfig& g, bool include_v0 = true) {
    const auto dim = checked_dimension(m, g, dense_dimension_cap, "potential matrix");
    PotentialTable table(m, g, include_v0);
    const auto& shape = table.shape();
    const auto vib = shape.vib_dim();
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < m.n_states; ++j)
        for (std::size_t i = 0; i < m.n_states; ++i) {
            auto block = table.block(j, i);
            if (block.empty()) continue;
            for (std::size_t v = 0; v < vib; ++v)
                V(static_cast<Eigen::Index>(shape.index(j, v)), static_cast<Eigen::Index>(shape.index(i, v))) =
                    block[v];
        }
    return V;
}

// T = I_el (x) sum_r omega_r P_r^2 / 2.
inline Eigen::MatrixXcd build_kinetic_matrix(const VibronicModel& m, const GridConfig& g) {
    const auto dim = checked_dimension(m, g, dense_dimension_cap, "kinetic matrix");
    const SystemShape shape(m, g);
    const auto K = g.points();
    const Eigen::MatrixXcd P = momentum_matrix(g);
    const Eigen::MatrixXcd P2 = P * P;
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < m.n_modes(); ++r) {
        const auto stride = shape.stride(r);
        const double half_w = 0.5 * m.frequencies[r];
        for (std::size_t row = 0; row < dim; ++row) {
            const auto xr = (row / stride) % K;
            const auto base = row - xr * stride;
            for (std::size_t xc = 0; xc < K; ++xc) {
                const auto col = base + xc * stride;
                T(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) +=
                    half_w * P2(static_cast<Eigen::Index>(xr), static_cast<Eigen::Index>(xc));
            }
        }
    }
    return T;
}

inline Eigen::MatrixXcd build_hamiltonian(const VibronicModel& m, const GridConfig& g, bool include_v0 = true) {
    return build_kinetic_matrix(m, g) + build_potential_matrix(m, g, include_v0).cast<cplx>();
}

}  // namespace vibronic
