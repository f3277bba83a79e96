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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"

namespace {

using namespace vibronic;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

struct CommandResult {
    int status = -1;
    std::string output;
};

CommandResult run(const std::string& cmd) {
    CommandResult r;
    FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
    r.status = pclose(pipe);
    return r;
}

std::string cli() { return VIBRONIC_CLI; }

// ---- 1: qubit counts --------------------------------------------------------

Outcome qubit_counts() {
    Outcome o;
    const std::vector<std::pair<std::string, unsigned>> rows{
        {"no4_anth", 146}, {"no4_anth_dimer", 154}, {"anth_c60_m11", 113}, {"anth_c60_m246", 1053}};
    for (const auto& [name, expected] : rows) {
        const auto t0 = Clock::now();
        const auto r = run(cli() + " estimate --steps 1 --grid-bits 4 --model " + testing::model_path(name));
        const double dt = seconds_since(t0);
        std::smatch mt;
        const bool found = std::regex_search(r.output, mt, std::regex("total (\\d+)\\n"));
        const unsigned total = found ? static_cast<unsigned>(std::stoul(mt[1])) : 0;
        o.detail << " " << name << "=" << total << " (" << std::fixed << std::setprecision(2) << dt << " s)";
        o.require(r.status == 0 && total == expected, name + " expected " + std::to_string(expected));
        o.require(dt < 1.0, name + " runtime");
    }
    return o;
}

// ---- 2: Toffoli counts within a factor of two -------------------------------

Outcome toffoli_counts() {
    Outcome o;
    struct Row {
        std::string model;
        double time_fs, epsilon, published;
    };
    const std::vector<Row> rows{{"no4_anth", 100, 0.10, 5.47e6},       {"no4_anth", 100, 0.01, 1.73e7},
                                {"no4_anth_dimer", 100, 0.01, 2.76e6}, {"no4_anth_dimer", 500, 0.01, 3.54e7},
                                {"anth_c60_m11", 100, 0.01, 6.62e5},   {"anth_c60_m246", 100, 0.01, 2.66e7}};
    for (const auto& row : rows) {
        std::ostringstream cmd;
        cmd << cli() << " estimate --grid-bits 4 --order 2 --time-fs " << row.time_fs << " --epsilon " << row.epsilon
            << " --model " << testing::model_path(row.model);
        const auto r = run(cmd.str());
        std::smatch mt;
        const bool found = std::regex_search(r.output, mt, std::regex("steps: (\\d+), total: (\\d+)"));
        const double total = found ? std::stod(mt[2]) : 0.0;
        const double ratio = total / row.published;
        o.detail << std::defaultfloat << " " << row.model << "@" << row.time_fs << "fs/" << row.epsilon * 100
                 << "%: r=" << (found ? mt[1].str() : "?") << " " << scientific(total) << " (x" << std::setprecision(2)
                 << std::fixed << ratio << ")";
        o.require(r.status == 0 && ratio >= 0.5 && ratio <= 2.0, row.model + " outside factor of two");
    }
    return o;
}

// ---- 3: Trotter order ---------------------------------------------------------

Outcome trotter_order() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto m = testing::shipped_model("toy_2state");
    const GridConfig g(3);
    const double t = 1.0;
    const Eigen::MatrixXcd exact = sim::ExactPropagator(m, g).unitary(t);
    circuit::CompileOptions opt;
    opt.frac_bits = 44;
    struct Case {
        unsigned order;
        std::vector<std::size_t> steps;
        double tol;
    };
    for (const auto& c : {Case{1, {4, 8, 16, 32}, 0.2}, Case{2, {4, 8, 16, 32}, 0.2}, Case{4, {2, 4, 8}, 0.4}}) {
        std::vector<double> rs, errs;
        for (auto r : c.steps) {
            const auto circ = circuit::build_evolution(m, g, t, r, c.order, opt);
            const auto U = sim::semantic_unitary(circ, SystemShape(m, g));
            rs.push_back(static_cast<double>(r));
            errs.push_back(testing::operator_norm(U - exact));
        }
        const double slope = testing::log_log_slope(rs, errs);
        o.detail << " p=" << c.order << " slope " << std::fixed << std::setprecision(3) << slope;
        o.require(std::abs(slope + c.order) <= c.tol, "order " + std::to_string(c.order) + " slope");
    }
    const double dt = seconds_since(t0);
    o.detail << " (" << std::setprecision(1) << dt << " s)";
    o.require(dt < 60.0, "runtime");
    return o;
}

// ---- 4: fragment exactness ----------------------------------------------------

Outcome fragment_exactness() {
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> pick_n(0, 2), pick_m(1, 2), pick_d(0, 3), pick_k(2, 3);
    double worst_sum = 0.0, worst_block = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t N = std::size_t{2} << pick_n(rng);
        const auto M = static_cast<std::size_t>(pick_m(rng));
        const auto d = static_cast<unsigned>(pick_d(rng));
        const GridConfig g(static_cast<unsigned>(pick_k(rng)));
        const auto m = testing::random_model(rng, N, M, d);
        const PotentialTable table(m, g);
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(table.shape().dim()),
                                                    static_cast<Eigen::Index>(table.shape().dim()));
        for (const auto& f : fragments(m)) {
            sum += dense_fragment(f, table);
            worst_block = std::max(worst_block, verify_block_diagonal(f, m, g));
        }
        worst_sum = std::max(worst_sum, (sum - build_potential_matrix(m, g)).cwiseAbs().maxCoeff());
    }
    const double dt = seconds_since(t0);
    o.detail << " max |sum H_m - V| = " << std::scientific << std::setprecision(2) << worst_sum
             << ", max off-block = " << worst_block << " (" << std::fixed << std::setprecision(1) << dt << " s)";
    o.require(worst_sum < 1e-13, "reconstruction");
    o.require(worst_block < 1e-12, "block diagonal");
    o.require(dt < 30.0, "runtime");
    return o;
}

// ---- 5: caching ---------------------------------------------------------------

Outcome cache_equivalence() {
    Outcome o;
    auto m = make_model(2, {1.0, 0.8, 1.2}, 3);
    m.set_coupling(0, 1, MultiIndex::single(0), 0.11);
    m.set_coupling(0, 1, MultiIndex::single(1), -0.07);
    m.set_coupling(0, 1, MultiIndex::from_factors({0, 1}), 0.05);
    m.set_coupling(0, 1, MultiIndex::from_factors({0, 1, 2}), 0.02);
    m.set_coupling(0, 1, MultiIndex::single(0, 2), -0.03);
    const GridConfig g(3);
    circuit::CompileOptions on, off;
    on.total_bits = off.total_bits = 40;
    off.caching = false;
    const double theta = 0.4;
    const auto c_on = circuit::build_trotter_step(m, g, theta, 2, on);
    const auto c_off = circuit::build_trotter_step(m, g, theta, 2, off);
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto psi = testing::random_state(SystemShape(m, g), rng);
        auto a = psi, b = psi;
        sim::apply_semantic(a, c_on);
        sim::apply_semantic(b, c_off);
        worst = std::max(worst, 1.0 - fidelity(a, b));
    }
    const auto n_on = toffoli_count(c_on), n_off = toffoli_count(c_off);
    const auto e_on = estimate_step(m, g, theta, 2, on).toffoli(), e_off = estimate_step(m, g, theta, 2, off).toffoli();
    o.detail << " 1-F max " << std::scientific << std::setprecision(2) << worst << ", Toffoli " << n_on << " vs "
             << n_off << ", saving " << n_off - n_on << " (estimated " << e_off - e_on << ")";
    o.require(worst <= 1e-10, "fidelity");
    o.require(n_on < n_off, "cached count lower");
    o.require(n_off - n_on == e_off - e_on, "saving equals estimate");
    return o;
}

// ---- 6: gate-level faithfulness ------------------------------------------------

Outcome arithmetic_faithfulness() {
    Outcome o;
    auto m = make_model(2, {0.9}, 2);
    m.set_coupling(0, 0, MultiIndex{}, 0.3);
    m.set_coupling(1, 1, MultiIndex::single(0), -0.2);
    m.set_coupling(0, 0, MultiIndex::single(0, 2), 0.1);
    m.set_coupling(0, 1, MultiIndex{}, 0.25);
    m.set_coupling(0, 1, MultiIndex::single(0), 0.12);
    m.set_coupling(0, 1, MultiIndex::single(0, 2), -0.04);
    const GridConfig g(3);
    circuit::CompileOptions opt;
    opt.total_bits = 10;
    const auto c = circuit::build_trotter_step(m, g, 0.6, 2, opt);
    const SystemShape shape(m, g);
    const double resolution = 2.0 * std::numbers::pi * c.fixed_point().resolution();
    double worst_phase = 0.0, worst_amp = 0.0, min_overlap = 1.0;
    for (std::size_t i = 0; i < shape.dim(); ++i) {
        auto semantic = StateVector::basis(shape, i);
        sim::apply_semantic(semantic, c);
        const auto faithful = sim::apply_faithful(StateVector::basis(shape, i), c);
        min_overlap = std::min(min_overlap, faithful.ancilla_overlap);
        for (std::size_t j = 0; j < shape.dim(); ++j) {
            worst_amp = std::max(worst_amp, std::abs(faithful.state[j] - semantic[j]));
            if (std::abs(semantic[j]) > 1e-6)
                worst_phase = std::max(worst_phase, std::abs(std::arg(faithful.state[j] / semantic[j])));
        }
    }
    o.detail << " w=" << c.fixed_point().total_bits << " frac=" << c.fixed_point().frac_bits << ", "
             << c.layout.total_qubits() << " qubits, max phase diff " << std::scientific << std::setprecision(2)
             << worst_phase << " (bound " << resolution << "), max amp diff " << worst_amp << ", min ancilla overlap "
             << std::fixed << std::setprecision(12) << min_overlap;
    o.require(worst_phase <= resolution && worst_amp <= resolution, "phase agreement");
    o.require(min_overlap >= 1.0 - 1e-10, "ancilla overlap");
    return o;
}

// ---- 7: observables -------------------------------------------------------------

Outcome observables() {
    Outcome o;
    const auto m = testing::shipped_model("rabi");
    const GridConfig g(3);
    const double lambda = 0.05;
    const auto psi = prepare_vertical_excitation(m, g, 0);
    double worst_rabi = 0.0, worst_sum = 0.0;
    circuit::CompileOptions opt;
    opt.frac_bits = 40;
    for (int n = 0; n <= 20; ++n) {
        const double t = 3.0 * n;
        auto s = psi;
        sim::apply_semantic(s, circuit::build_evolution(m, g, t == 0.0 ? 1e-9 : t, 2, 2, opt));
        const auto p = populations(s, 2);
        worst_rabi = std::max(worst_rabi, std::abs(p[1] - std::pow(std::sin(lambda * t), 2)));
        worst_sum = std::max(worst_sum, std::abs(p[0] + p[1] - 1.0));
    }
    const GridConfig g4(4);
    const auto chi = ground_wavepacket(g4);
    Eigen::VectorXcd v(16);
    for (std::size_t x = 0; x < 16; ++x) v[static_cast<Eigen::Index>(x)] = chi[x];
    const auto Q = position_matrix(g4), P = momentum_matrix(g4);
    const double mean_q = v.dot(Q * v).real();
    const double energy = 0.5 * (v.dot(Q * Q * v) + v.dot(P * P * v)).real();
    o.detail << " Rabi max dev " << std::scientific << std::setprecision(2) << worst_rabi << ", sum dev " << worst_sum
             << ", <Q> " << mean_q << ", <(Q^2+P^2)/2> " << std::fixed << std::setprecision(6) << energy;
    o.require(worst_rabi <= 1e-3, "Rabi trace");
    o.require(worst_sum <= 1e-10, "population sum");
    o.require(std::abs(mean_q) <= 1e-10, "<Q>");
    o.require(std::abs(energy - 0.5) <= 1e-3, "oscillator energy");
    return o;
}

// ---- 8: spectrum -------------------------------------------------------------------

Outcome spectrum_peaks() {
    Outcome o;
    const auto m = testing::shipped_model("spectrum_2state");
    const GridConfig g(4);
    const sim::ExactPropagator prop(m, g);
    const auto& mu = *m.dipole;
    // reference state: ground eigenstate
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(prop.energies().size());
    e0[0] = 1.0;
    const auto psi = prop.from_eigenbasis(e0);
    const double t_max = 20000.0;
    const std::size_t n = 2001;
    const auto samples = autocorrelation(prop, psi, mu, t_max, n);
    const auto s = spectrum(samples, t_max / static_cast<double>(n - 1), 5.0 / t_max);

    // lines at E_0 - E_n weighted by |<n|mu|0>|^2
    const Eigen::VectorXcd mu0 = prop.to_eigenbasis(apply_dipole(psi, mu));
    const auto& E = prop.energies();
    double top = 0.0;
    for (Eigen::Index k = 0; k < E.size(); ++k) top = std::max(top, std::norm(mu0[k]));
    std::size_t matched = 0, strong = 0, strong_found = 0;
    for (const auto& p : s.peaks) {
        bool ok = false;
        for (Eigen::Index k = 0; k < E.size() && !ok; ++k)
            ok = std::norm(mu0[k]) >= 1e-4 * top && std::abs(p.omega - (E[0] - E[k])) <= 2.0 * s.bin_width;
        matched += ok;
    }
    for (Eigen::Index k = 0; k < E.size(); ++k) {
        if (std::norm(mu0[k]) < 0.05 * top) continue;
        ++strong;
        for (const auto& p : s.peaks)
            if (std::abs(p.omega - (E[0] - E[k])) <= 2.0 * s.bin_width) {
                ++strong_found;
                break;
            }
    }
    const cplx expected_c0 = inner(psi, apply_dipole(apply_dipole(psi, mu), mu));
    const double c0_err = std::abs(samples[0] - expected_c0);
    o.detail << " " << s.peaks.size() << " peaks, " << matched << " on dipole-weighted gaps, " << strong_found << "/"
             << strong << " strong lines found, bin " << std::scientific << std::setprecision(2)
             << units::hartree_to_ev(s.bin_width) << " eV, |C(0) - <mu^2>| = " << c0_err;
    o.require(!s.peaks.empty() && matched == s.peaks.size(), "peaks on gaps");
    o.require(strong_found == strong, "strong lines present");
    o.require(c0_err <= 1e-12, "C(0)");
    return o;
}

// ---- 9: step-count selector -----------------------------------------------------------

Outcome step_selector() {
    Outcome o;
    struct Toy {
        std::string name;
        double time_au;
    };
    const std::vector<Toy> toys{
        {"toy_2state", 5.0}, {"three_state", units::fs_to_au(30.0)}, {"spectrum_2state", units::fs_to_au(30.0)}};
    const GridConfig g(3);
    const unsigned order = 2;
    for (const auto& toy : toys) {
        const auto m = testing::shipped_model(toy.name);
        const double eps = 1e-3;
        const auto sel = select_step_count(m, g, toy.time_au, eps, order);
        const auto half = select_step_count(m, g, toy.time_au, eps / 2.0, order);
        const auto psi = prepare_vertical_excitation(m, g, brightest_state(m));
        const auto exact = sim::exact_evolve(m, g, toy.time_au, psi);
        const double err =
            trace_distance(exact, sim::ProductFormula(m, g).evolve(psi, toy.time_au, sel.n_steps, order));
        const double ratio = static_cast<double>(half.n_steps) / static_cast<double>(sel.n_steps);
        const double target = std::sqrt(2.0);
        o.detail << " " << toy.name << ": r=" << sel.n_steps << " err " << std::scientific << std::setprecision(2)
                 << err << ", r(eps/2)/r = " << std::fixed << std::setprecision(3) << ratio << ";";
        o.require(err <= 1.5 * eps, toy.name + " closed loop");
        o.require(std::abs(ratio - target) <= 0.25 * target, toy.name + " halving");
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 qubit counts", qubit_counts},
        {"2 Toffoli counts within x2", toffoli_counts},
        {"3 Trotter order", trotter_order},
        {"4 fragment exactness", fragment_exactness},
        {"5 cache equivalence", cache_equivalence},
        {"6 arithmetic faithfulness", arithmetic_faithfulness},
        {"7 observables", observables},
        {"8 spectrum", spectrum_peaks},
        {"9 step-count selector", step_selector},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ":" << o.detail.str() << std::endl;
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
