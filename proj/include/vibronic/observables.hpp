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
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/FFT>

#include "vibronic/error.hpp"
#include "vibronic/grid.hpp"
#include "vibronic/model.hpp"
#include "vibronic/sim/oracle.hpp"
#include "vibronic/sim/state.hpp"
#include "vibronic/units.hpp"

namespace vibronic {

// Discretized zeroth Hermite-Gauss function, amplitude exp(-pi s(x)^2 / K)
// with s the signed label (so exp(-q^2 / 2) at q = Delta s), normalized.
inline std::vector<double> ground_wavepacket(const GridConfig& g) {
    const auto K = g.points();
    std::vector<double> chi(K);
    double norm2 = 0.0;
    for (std::size_t x = 0; x < K; ++x) {
        const double s = static_cast<double>(g.signed_label(x));
        chi[x] = std::exp(-std::numbers::pi * s * s / static_cast<double>(K));
        norm2 += chi[x] * chi[x];
    }
    for (auto& c : chi) c /= std::sqrt(norm2);
    return chi;
}

// sum_j c_j |j> (x) |chi_0>^M
inline StateVector product_state(const VibronicModel& m, const GridConfig& g, const std::vector<cplx>& electronic) {
    StateVector s(m, g);
    const auto& shape = s.shape;
    const auto chi = ground_wavepacket(g);
    std::vector<double> vib(shape.vib_dim(), 1.0);
    for (std::size_t v = 0; v < vib.size(); ++v)
        for (std::size_t r = 0; r < shape.n_modes; ++r) vib[v] *= chi[shape.label(v, r)];
    for (std::size_t j = 0; j < electronic.size(); ++j) {
        if (electronic[j] == cplx{}) continue;
        for (std::size_t v = 0; v < vib.size(); ++v) s[shape.index(j, v)] = electronic[j] * vib[v];
    }
    return s;
}

inline StateVector prepare_vertical_excitation(const VibronicModel& m, const GridConfig& g, std::size_t j) {
    if (j >= m.n_states_logical) {
        throw ValidationError("electronic state " + std::to_string(j) + " out of range (model has " +
                              std::to_string(m.n_states_logical) + " states)");
    }
    std::vector<cplx> el(m.n_states, cplx{});
    el[j] = 1.0;
    return product_state(m, g, el);
}

// mu |0>_el (x) |chi_0>, normalized.
inline StateVector prepare_dipole_state(const VibronicModel& m, const GridConfig& g, const DipoleMatrix& mu) {
    if (mu.size != m.n_states_logical) throw ValidationError("dipole size does not match the model");
    std::vector<cplx> el(m.n_states, cplx{});
    double norm2 = 0.0;
    for (std::size_t j = 0; j < mu.size; ++j) {
        el[j] = mu.at(j, 0);
        norm2 += mu.at(j, 0) * mu.at(j, 0);
    }
    if (norm2 == 0.0) throw ValidationError("dipole column of state 0 is zero");
    for (auto& c : el) c /= std::sqrt(norm2);
    return product_state(m, g, el);
}

// mu acting on the electronic factor; padded states are left at zero.
inline StateVector apply_dipole(const StateVector& s, const DipoleMatrix& mu) {
    StateVector out(s.shape);
    const auto vib = s.shape.vib_dim();
    for (std::size_t j = 0; j < mu.size; ++j)
        for (std::size_t i = 0; i < mu.size; ++i) {
            const double d = mu.at(j, i);
            if (d == 0.0) continue;
            for (std::size_t v = 0; v < vib; ++v) out[s.shape.index(j, v)] += d * s[s.shape.index(i, v)];
        }
    return out;
}

// Exact marginal of the electronic register over the first `n_logical` states.
inline std::vector<double> populations(const StateVector& s, std::size_t n_logical) {
    std::vector<double> p(n_logical, 0.0);
    const auto vib = s.shape.vib_dim();
    for (std::size_t j = 0; j < n_logical; ++j)
        for (std::size_t v = 0; v < vib; ++v) p[j] += std::norm(s[s.shape.index(j, v)]);
    return p;
}

// Frequencies from `shots` computational-basis measurements of the
// electronic register.
inline std::vector<double> sample_populations(const StateVector& s, std::size_t n_logical, std::size_t shots,
                                              std::uint64_t seed) {
    if (shots == 0) throw ValidationError("shot count must be positive");
    std::vector<double> all(s.shape.n_states, 0.0);
    const auto vib = s.shape.vib_dim();
    for (std::size_t j = 0; j < s.shape.n_states; ++j)
        for (std::size_t v = 0; v < vib; ++v) all[j] += std::norm(s[s.shape.index(j, v)]);
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> dist(all.begin(), all.end());
    std::vector<double> counts(n_logical, 0.0);
    for (std::size_t n = 0; n < shots; ++n) {
        const auto j = dist(rng);
        if (j < n_logical) counts[j] += 1.0;
    }
    for (auto& c : counts) c /= static_cast<double>(shots);
    return counts;
}

struct PopulationTrace {
    std::vector<double> times_fs;
    std::vector<std::vector<double>> populations;
};

inline void write_csv(std::ostream& os, const PopulationTrace& t) {
    os << "time_fs";
    const std::size_t n = t.populations.empty() ? 0 : t.populations.front().size();
    for (std::size_t j = 0; j < n; ++j) os << ",p_" << j;
    os << "\n";
    os.precision(12);
    for (std::size_t i = 0; i < t.times_fs.size(); ++i) {
        os << t.times_fs[i];
        for (double p : t.populations[i]) os << "," << p;
        os << "\n";
    }
}

inline nlohmann::json to_json(const PopulationTrace& t) {
    return {{"times_fs", t.times_fs}, {"populations", t.populations}};
}

// ---- autocorrelation and spectrum -----------------------------------------

// C(t_n) = <psi| e^{i s H t} mu e^{-i s H t} mu |psi> at t_n = n t_max / (n_samples - 1),
// s = +1 for the e^{+iHt} propagator and -1 for e^{-iHt}.
inline std::vector<cplx> autocorrelation(const sim::ExactPropagator& prop, const StateVector& psi,
                                         const DipoleMatrix& mu, double t_max, std::size_t n_samples,
                                         double sign = 1.0) {
    if (n_samples < 2) throw ValidationError("need at least two autocorrelation samples");
    const auto mu_psi = apply_dipole(psi, mu);
    const Eigen::VectorXcd a0 = prop.to_eigenbasis(mu_psi);
    const Eigen::VectorXcd b0 = prop.to_eigenbasis(psi);
    const auto& E = prop.energies();
    std::vector<cplx> out(n_samples);
    for (std::size_t n = 0; n < n_samples; ++n) {
        const double t = t_max * static_cast<double>(n) / static_cast<double>(n_samples - 1);
        Eigen::VectorXcd a = a0, b = b0;
        for (Eigen::Index i = 0; i < E.size(); ++i) {
            const cplx ph = std::polar(1.0, -sign * t * E[i]);
            a[i] *= ph;
            b[i] *= ph;
        }
        // <b| mu |a> with both states back in the grid basis
        const auto sa = prop.from_eigenbasis(a);
        const auto sb = prop.from_eigenbasis(b);
        out[n] = inner(sb, apply_dipole(sa, mu));
    }
    return out;
}

struct SpectrumPeak {
    double omega = 0.0;  // Hartree
    double intensity = 0.0;
};

struct SpectrumResult {
    std::vector<double> omega;      // Hartree, ascending
    std::vector<double> intensity;  // real part of the transform
    double damping = 0.0;           // 1/time, atomic units
    double bin_width = 0.0;         // Hartree
    double max_imaginary = 0.0;     // size of the discarded imaginary part
    double parseval_residual = 0.0;
    std::vector<SpectrumPeak> peaks;
};

// C(omega) = (1/2 pi) int dt e^{-i omega t} C(t) e^{-eta |t|} over the
// even extension C(-t) = conj C(t) of samples spaced by dt.
inline SpectrumResult spectrum(const std::vector<cplx>& samples, double dt, double eta, double peak_threshold = 1e-2) {
    if (!(eta > 0.0)) throw ValidationError("damping must be positive");
    if (samples.size() < 2 || !(dt > 0.0)) throw ValidationError("spectrum needs at least two samples and dt > 0");
    const std::size_t n = samples.size();
    const std::size_t L = 2 * n - 1;
    std::vector<cplx> x(L);
    for (std::size_t i = 0; i < n; ++i) {
        const double damp = std::exp(-eta * dt * static_cast<double>(i));
        x[i] = samples[i] * damp;
        if (i > 0) x[L - i] = std::conj(samples[i]) * damp;
    }
    Eigen::FFT<double> fft;
    std::vector<cplx> X;
    fft.fwd(X, x);

    SpectrumResult res;
    res.damping = eta;
    res.bin_width = 2.0 * std::numbers::pi / (static_cast<double>(L) * dt);
    double ex = 0.0, eX = 0.0;
    for (const auto& v : x) ex += std::norm(v);
    for (const auto& v : X) eX += std::norm(v);
    res.parseval_residual = std::abs(ex - eX / static_cast<double>(L)) / std::max(ex, 1e-300);

    // reorder bins to ascending frequency, k in [-(L-1)/2, (L-1)/2]
    const auto half = static_cast<long>((L - 1) / 2);
    for (long k = -half; k <= half; ++k) {
        const auto idx = static_cast<std::size_t>((k + static_cast<long>(L)) % static_cast<long>(L));
        res.omega.push_back(res.bin_width * static_cast<double>(k));
        res.intensity.push_back(dt / (2.0 * std::numbers::pi) * X[idx].real());
        res.max_imaginary = std::max(res.max_imaginary, std::abs(dt / (2.0 * std::numbers::pi) * X[idx].imag()));
    }

    const double top = *std::max_element(res.intensity.begin(), res.intensity.end());
    for (std::size_t i = 1; i + 1 < res.intensity.size(); ++i) {
        const double a = res.intensity[i - 1], b = res.intensity[i], c = res.intensity[i + 1];
        if (b <= a || b < c || b < peak_threshold * top) continue;
        const double denom = a - 2.0 * b + c;
        const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
        res.peaks.push_back({res.omega[i] + shift * res.bin_width, b - 0.25 * (a - c) * shift});
    }
    return res;
}

inline void write_csv(std::ostream& os, const SpectrumResult& s) {
    os << "omega_ev,intensity\n";
    os.precision(12);
    for (std::size_t i = 0; i < s.omega.size(); ++i)
        os << units::hartree_to_ev(s.omega[i]) << "," << s.intensity[i] << "\n";
}

inline nlohmann::json to_json(const SpectrumResult& s) {
    nlohmann::json peaks = nlohmann::json::array();
    for (const auto& p : s.peaks)
        peaks.push_back({{"omega_ev", units::hartree_to_ev(p.omega)}, {"intensity", p.intensity}});
    std::vector<double> omega_ev(s.omega.size());
    std::transform(s.omega.begin(), s.omega.end(), omega_ev.begin(), units::hartree_to_ev);
    return {{"omega_ev", omega_ev},
            {"intensity", s.intensity},
            {"damping_per_fs", s.damping * units::fs_in_atomic_time},
            {"bin_width_ev", units::hartree_to_ev(s.bin_width)},
            {"parseval_residual", s.parseval_residual},
            {"peaks", peaks}};
}

}  // namespace vibronic
