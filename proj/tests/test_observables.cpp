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

#include <cmath>
#include <numbers>
#include <random>

#include "test_util.hpp"

namespace vibronic {
namespace {

TEST(GroundWavepacket, MomentsOfTheDiscreteGaussian) {
    const GridConfig g(4);
    const auto chi = ground_wavepacket(g);
    Eigen::VectorXcd v(16);
    for (std::size_t x = 0; x < 16; ++x) v[static_cast<Eigen::Index>(x)] = chi[x];
    const auto Q = position_matrix(g);
    const auto P = momentum_matrix(g);
    EXPECT_NEAR(v.norm(), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(v.dot(Q * v)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(v.dot(P * v)), 0.0, 1e-10);
    const double energy = 0.5 * (v.dot(Q * Q * v) + v.dot(P * P * v)).real();
    EXPECT_NEAR(energy, 0.5, 1e-3);
    // Symmetric under q -> -q: the value at the signed label -s equals that at +s.
    for (std::size_t x = 1; x < 8; ++x) EXPECT_NEAR(chi[x], chi[16 - x], 1e-15);
}

TEST(InitialStates, VerticalAndDipoleStates) {
    const auto m = testing::shipped_model("three_state");
    const GridConfig g(3);
    const auto psi = prepare_vertical_excitation(m, g, 1);
    const auto p = populations(psi, m.n_states);
    EXPECT_NEAR(p[1], 1.0, 1e-14);
    EXPECT_EQ(p[0] + p[2] + p[3], 0.0);
    EXPECT_THROW(prepare_vertical_excitation(m, g, 3), ValidationError);

    DipoleMatrix mu{3, {0.0, 1.0, 2.0, 1.0, 0.0, 0.0, 2.0, 0.0, 0.0}};
    const auto d = prepare_dipole_state(m, g, mu);
    const auto pd = populations(d, 3);
    EXPECT_NEAR(pd[1], 0.2, 1e-14);
    EXPECT_NEAR(pd[2], 0.8, 1e-14);
    EXPECT_THROW(prepare_dipole_state(m, g, DipoleMatrix{3, std::vector<double>(9, 0.0)}), ValidationError);
}

TEST(Populations, RabiOscillation) {
    const auto m = testing::shipped_model("rabi");
    const GridConfig g(3);
    const double lambda = 0.05;
    const auto psi = prepare_vertical_excitation(m, g, 0);
    const sim::ExactPropagator prop(m, g);
    const sim::ProductFormula pf(m, g);
    for (double t : {0.0, 5.0, 10.0, 17.0, 31.4, 60.0}) {
        const auto exact = populations(prop.evolve(psi, t), 2);
        EXPECT_NEAR(exact[1], std::pow(std::sin(lambda * t), 2), 1e-3) << "t=" << t;
        EXPECT_NEAR(exact[0] + exact[1], 1.0, 1e-10);
        const auto trotter = populations(pf.evolve(psi, t, 4, 2), 2);
        EXPECT_NEAR(trotter[1], std::pow(std::sin(lambda * t), 2), 1e-3) << "t=" << t;
    }
}

TEST(Populations, SamplingConvergesToMarginals) {
    const auto m = testing::shipped_model("three_state");
    const GridConfig g(3);
    const auto psi = sim::exact_evolve(m, g, units::fs_to_au(15.0), prepare_vertical_excitation(m, g, 2));
    const auto exact = populations(psi, 3);
    const auto a = sample_populations(psi, 3, 100000, 42);
    EXPECT_EQ(a, sample_populations(psi, 3, 100000, 42));
    // chi-square with 2 degrees of freedom; 13.8 is the 0.999 quantile
    double chi2 = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
        if (exact[j] > 0) chi2 += 100000.0 * std::pow(a[j] - exact[j], 2) / exact[j];
    EXPECT_LT(chi2, 13.8);
    EXPECT_THROW(sample_populations(psi, 3, 0, 1), ValidationError);
}

TEST(PopulationTrace, CsvLayout) {
    PopulationTrace t{{0.0, 1.0}, {{1.0, 0.0}, {0.75, 0.25}}};
    std::ostringstream os;
    write_csv(os, t);
    EXPECT_EQ(os.str(), "time_fs,p_0,p_1\n0,1,0\n1,0.75,0.25\n");
}

TEST(Autocorrelation, InitialValueIsDipoleSquaredExpectation) {
    const auto m = testing::shipped_model("spectrum_2state");
    const GridConfig g(4);
    const sim::ExactPropagator prop(m, g);
    DipoleMatrix mu{2, {0.3, 1.0, 1.0, -0.2}};
    std::vector<cplx> el{cplx(0.6, 0.1), cplx(0.2, -0.5)};
    auto psi = product_state(m, g, el);
    psi.normalize();
    const auto c = autocorrelation(prop, psi, mu, 100.0, 3);
    const auto expected = inner(psi, apply_dipole(apply_dipole(psi, mu), mu));
    EXPECT_NEAR(std::abs(c[0] - expected), 0.0, 1e-13);
    EXPECT_NEAR(c[0].imag(), 0.0, 1e-13);
}

TEST(Spectrum, SyntheticLinesAtTheirFrequencies) {
    const double dt = 0.05, w1 = 1.3, w2 = -2.1;
    std::vector<cplx> c(2001);
    for (std::size_t n = 0; n < c.size(); ++n) {
        const double t = dt * static_cast<double>(n);
        c[n] = 0.7 * std::polar(1.0, w1 * t) + 0.3 * std::polar(1.0, w2 * t);
    }
    const auto s = spectrum(c, dt, 0.1);
    ASSERT_EQ(s.peaks.size(), 2u);
    EXPECT_NEAR(s.peaks[0].omega, w2, s.bin_width);
    EXPECT_NEAR(s.peaks[1].omega, w1, s.bin_width);
    EXPECT_GT(s.peaks[1].intensity, s.peaks[0].intensity);
    EXPECT_LT(s.max_imaginary, 1e-10);
    EXPECT_LT(s.parseval_residual, 1e-12);
    EXPECT_TRUE(std::is_sorted(s.omega.begin(), s.omega.end()));
    EXPECT_THROW(spectrum(c, dt, 0.0), ValidationError);
}

TEST(Spectrum, HarmonicStateWithUnitDipoleIsOnePeakAtZero) {
    const auto m = make_model(1, {1.0});
    const GridConfig g(4);
    const sim::ExactPropagator prop(m, g);
    const auto psi = prepare_vertical_excitation(m, g, 0);
    const auto c = autocorrelation(prop, psi, DipoleMatrix::identity(1), 50.0, 501);
    for (const auto& v : c) EXPECT_NEAR(std::abs(v - c[0]), 0.0, 1e-12);
    const auto s = spectrum(c, 0.1, 0.1);
    ASSERT_EQ(s.peaks.size(), 1u);
    EXPECT_NEAR(s.peaks[0].omega, 0.0, s.bin_width);
}

TEST(Spectrum, DisplacedOscillatorProgression) {
    // Ground surface harmonic, excited surface displaced and raised by 5;
    // the lines sit at E_0 - E_n and are spaced by omega.
    auto m = make_model(2, {1.0}, 1);
    m.set_coupling(1, 1, MultiIndex{}, 5.0);
    m.set_coupling(1, 1, MultiIndex::single(0), 0.9);
    m.dipole = DipoleMatrix{2, {0.0, 1.0, 1.0, 0.0}};
    const GridConfig g(4);
    const sim::ExactPropagator prop(m, g);
    const auto psi = prepare_vertical_excitation(m, g, 0);
    const double t_max = 200.0;
    const std::size_t n = 2001;
    const auto s = spectrum(autocorrelation(prop, psi, *m.dipole, t_max, n), t_max / (n - 1), 5.0 / t_max, 0.05);
    ASSERT_GE(s.peaks.size(), 3u);
    for (std::size_t i = 1; i < s.peaks.size(); ++i)
        EXPECT_NEAR(s.peaks[i].omega - s.peaks[i - 1].omega, 1.0, 2.0 * s.bin_width);
    // 0-0 line: E_0 - (5 + 1/2 - 0.9^2/2)
    EXPECT_NEAR(s.peaks.back().omega, 0.5 - (5.5 - 0.405), 2.0 * s.bin_width);
}

TEST(Spectrum, PropagatorSignsGiveMirrorImages) {
    const auto m = testing::shipped_model("spectrum_2state");
    const GridConfig g(3);
    const sim::ExactPropagator prop(m, g);
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(prop.energies().size());
    e0[0] = 1.0;
    const auto psi = prop.from_eigenbasis(e0);
    const double t_max = 2000.0;
    const std::size_t n = 401;
    const double dt = t_max / static_cast<double>(n - 1);
    const auto plus = spectrum(autocorrelation(prop, psi, *m.dipole, t_max, n, 1.0), dt, 5.0 / t_max);
    const auto minus = spectrum(autocorrelation(prop, psi, *m.dipole, t_max, n, -1.0), dt, 5.0 / t_max);
    const std::size_t L = plus.intensity.size();
    for (std::size_t i = 0; i < L; ++i) EXPECT_NEAR(plus.intensity[i], minus.intensity[L - 1 - i], 1e-10);
    ASSERT_FALSE(plus.peaks.empty());
    EXPECT_LT(plus.peaks.back().omega, 0.0);
    EXPECT_GT(minus.peaks.front().omega, 0.0);
}

TEST(Spectrum, JsonReportsElectronVolts) {
    std::vector<cplx> c(101, cplx(1.0, 0.0));
    const auto s = spectrum(c, 1.0, 0.1);
    const auto js = to_json(s);
    EXPECT_EQ(js.at("omega_ev").size(), s.omega.size());
    EXPECT_NEAR(js.at("bin_width_ev").get<double>(), units::hartree_to_ev(s.bin_width), 1e-12);
}

}  // namespace
}  // namespace vibronic
