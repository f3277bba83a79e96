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
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/FFT>

#include "vibronic/circuit/ir.hpp"
#include "vibronic/error.hpp"
#include "vibronic/grid.hpp"
#include "vibronic/model.hpp"
#include "vibronic/parallel.hpp"

namespace vibronic {

// Amplitudes over the system register only, in SystemShape order.
struct StateVector {
    SystemShape shape;
    std::vector<cplx> amplitudes;

    StateVector() = default;
    explicit StateVector(const SystemShape& s) : shape(s), amplitudes(s.dim(), cplx{}) {
        if (s.dim() > amplitude_cap)
            throw SizeCapError("state vector exceeds " + std::to_string(amplitude_cap) + " amplitudes");
    }
    StateVector(const VibronicModel& m, const GridConfig& g) : StateVector(SystemShape(m, g)) {}

    static StateVector basis(const SystemShape& s, std::size_t index) {
        StateVector v(s);
        if (index >= v.size()) {
            throw ValidationError("basis index " + std::to_string(index) + " outside dimension " +
                                  std::to_string(v.size()));
        }
        v.amplitudes[index] = 1.0;
        return v;
    }

    std::size_t size() const noexcept { return amplitudes.size(); }
    cplx& operator[](std::size_t i) { return amplitudes[i]; }
    const cplx& operator[](std::size_t i) const { return amplitudes[i]; }

    double norm() const {
        double s = 0.0;
        for (const auto& a : amplitudes) s += std::norm(a);
        return std::sqrt(s);
    }

    void normalize() {
        const double n = norm();
        if (n == 0.0) throw NumericalError("cannot normalize a zero state");
        for (auto& a : amplitudes) a /= n;
    }

    Eigen::Map<Eigen::VectorXcd> as_eigen() {
        return {amplitudes.data(), static_cast<Eigen::Index>(amplitudes.size())};
    }
    Eigen::Map<const Eigen::VectorXcd> as_eigen() const {
        return {amplitudes.data(), static_cast<Eigen::Index>(amplitudes.size())};
    }
};

inline cplx inner(const StateVector& a, const StateVector& b) {
    if (a.size() != b.size()) throw ValidationError("state size mismatch");
    cplx s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner(a, b)); }

// sqrt(1 - |<a|b>|^2) for normalized pure states.
inline double trace_distance(const StateVector& a, const StateVector& b) {
    return std::sqrt(std::max(0.0, 1.0 - fidelity(a, b)));
}

inline double max_abs_diff(const StateVector& a, const StateVector& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

// ---- qubit <-> flat index ------------------------------------------------

// Bit of the flat system index that holds circuit qubit `q`; the layout
// numbers electronic qubits first, then each mode least-significant first.
inline unsigned flat_bit_of_qubit(const circuit::RegisterLayout& L, unsigned q) {
    const unsigned n = L[L.electronic()].width;
    const unsigned k = L.grid_bits();
    const auto M = static_cast<unsigned>(L.n_modes());
    if (q >= L.system_qubits()) throw ValidationError("qubit " + std::to_string(q) + " is not a system qubit");
    if (q < n) return M * k + q;
    const unsigned r = (q - n) / k, b = (q - n) % k;
    return (M - 1 - r) * k + b;
}

// Qubit-ordered label (bit q = qubit q) of a flat system index.
inline std::uint64_t qubit_label_of_index(const circuit::RegisterLayout& L, std::size_t index) {
    std::uint64_t label = 0;
    for (unsigned q = 0; q < L.system_qubits(); ++q)
        if ((index >> flat_bit_of_qubit(L, q)) & 1u) label |= std::uint64_t{1} << q;
    return label;
}

inline std::size_t index_of_qubit_label(const circuit::RegisterLayout& L, std::uint64_t label) {
    std::size_t index = 0;
    for (unsigned q = 0; q < L.system_qubits(); ++q)
        if ((label >> q) & 1u) index |= std::size_t{1} << flat_bit_of_qubit(L, q);
    return index;
}

inline void check_layout_matches(const circuit::RegisterLayout& L, const SystemShape& s) {
    const auto n = L[L.electronic()].width;
    if ((std::size_t{1} << n) != s.n_states || L.n_modes() != s.n_modes ||
        (std::size_t{1} << L.grid_bits()) != s.points) {
        throw ValidationError("circuit layout does not match the state shape");
    }
}

// ---- single-register transforms -----------------------------------------

// Applies F (or F^dag) to mode `r`, F|x> = K^{-1/2} sum_y exp(+2 pi i x y / K)|y>.
inline void apply_mode_qft(StateVector& s, std::size_t r, bool inverse) {
    const auto K = s.shape.points;
    const auto stride = s.shape.stride(r);
    const auto dim = s.size();
    const auto fibers = dim / K;
    const double scale = std::sqrt(static_cast<double>(K));
    parallel_chunks(
        fibers,
        [&](std::size_t b, std::size_t e) {
            Eigen::FFT<double> fft;
            std::vector<cplx> in(K), out(K);
            for (std::size_t f = b; f < e; ++f) {
                // fiber f: index with x_r = 0
                const std::size_t base = (f / stride) * stride * K + f % stride;
                for (std::size_t x = 0; x < K; ++x) in[x] = s[base + x * stride];
                if (inverse) {
                    fft.fwd(out, in);
                    for (auto& v : out) v /= scale;
                } else {
                    fft.inv(out, in);
                    for (auto& v : out) v *= scale;
                }
                for (std::size_t y = 0; y < K; ++y) s[base + y * stride] = out[y];
            }
        },
        64);
}

// ---- snapshot export -----------------------------------------------------

// Writes `<path>` as little-endian interleaved (re, im) doubles and
// `<path>.json` with the layout.
inline void write_snapshot(const StateVector& s, const std::string& path, const nlohmann::json& extra = {}) {
    std::ofstream bin(path, std::ios::binary);
    if (!bin) throw Error("cannot open " + path + " for writing");
    for (const auto& a : s.amplitudes) {
        const double parts[2] = {a.real(), a.imag()};
        unsigned char bytes[16];
        std::memcpy(bytes, parts, 16);
        if constexpr (std::endian::native == std::endian::big) {
            for (int h = 0; h < 2; ++h)
                for (int i = 0; i < 4; ++i) std::swap(bytes[8 * h + i], bytes[8 * h + 7 - i]);
        }
        bin.write(reinterpret_cast<const char*>(bytes), 16);
    }
    nlohmann::json header{{"format", "complex128-le-interleaved"},
                          {"n_states", s.shape.n_states},
                          {"grid_points", s.shape.points},
                          {"n_modes", s.shape.n_modes},
                          {"dimension", s.size()},
                          {"index_order", "electronic most significant, then mode 0 .. mode M-1"},
                          {"data", path}};
    if (!extra.is_null()) header["meta"] = extra;
    std::ofstream js(path + ".json");
    if (!js) throw Error("cannot open " + path + ".json for writing");
    js << header.dump(2) << "\n";
}

inline StateVector read_snapshot(const std::string& path) {
    std::ifstream js(path + ".json");
    if (!js) throw Error("cannot open " + path + ".json");
    const auto header = nlohmann::json::parse(js);
    SystemShape shape;
    shape.n_states = header.at("n_states").get<std::size_t>();
    shape.points = header.at("grid_points").get<std::size_t>();
    shape.n_modes = header.at("n_modes").get<std::size_t>();
    StateVector s(shape);
    std::ifstream bin(path, std::ios::binary);
    if (!bin) throw Error("cannot open " + path);
    for (auto& a : s.amplitudes) {
        unsigned char bytes[16];
        if (!bin.read(reinterpret_cast<char*>(bytes), 16)) throw ValidationError("snapshot " + path + " is truncated");
        if constexpr (std::endian::native == std::endian::big) {
            for (int h = 0; h < 2; ++h)
                for (int i = 0; i < 4; ++i) std::swap(bytes[8 * h + i], bytes[8 * h + 7 - i]);
        }
        double parts[2];
        std::memcpy(parts, bytes, 16);
        a = {parts[0], parts[1]};
    }
    return s;
}

}  // namespace vibronic
