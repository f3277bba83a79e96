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

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vibronic/vibronic.hpp"

namespace {

using namespace vibronic;

struct RunConfig {
    std::string model_path;
    unsigned grid_bits = 4;
    unsigned order = 2;
    double time_fs = 100.0;
    double epsilon = 0.01;
    std::optional<std::size_t> steps;
    unsigned fixed_point_bits = 28;  // 0: size from the coefficients
    unsigned frac_bits = 24;
    std::string backend = "oracle";
    bool include_v0 = true;
    std::string sign = "plus";
    std::uint64_t seed = 0;
    std::string out;
    bool no_cache = false;
    std::size_t time_points = 21;
    std::size_t shots = 0;
    std::optional<std::size_t> initial_state;
    std::optional<double> damping_per_fs;
    std::string snapshot;
};

struct LoadedModel {
    VibronicModel model;
    std::string name;
};

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    LoadedModel lm{parse_model(text), {}};
    const auto doc = nlohmann::json::parse(text);
    lm.name = doc.value("name", std::string{});
    return lm;
}

circuit::CompileOptions compile_options(const RunConfig& c) {
    circuit::CompileOptions o;
    o.total_bits = c.fixed_point_bits;
    o.frac_bits = c.frac_bits;
    o.caching = !c.no_cache;
    o.include_v0 = c.include_v0;
    return o;
}

double sign_of(const RunConfig& c) { return c.sign == "minus" ? -1.0 : 1.0; }

// Writes to --out when given, otherwise to stdout.
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    fn(os);
}

std::size_t step_count_for(const RunConfig& c, const VibronicModel& m, const GridConfig& g, std::string* method) {
    if (c.steps) {
        if (*c.steps < 1) throw ValidationError("--steps must be >= 1");
        if (method) *method = "user-supplied";
        return *c.steps;
    }
    StepCountOptions opt;
    opt.include_v0 = c.include_v0;
    opt.initial_state = c.initial_state;
    const auto sel = select_step_count(m, g, units::fs_to_au(c.time_fs), c.epsilon, c.order, opt);
    if (method) {
        std::ostringstream os;
        os << "empirical fit, " << sel.proxy_modes.size() << "-mode proxy, " << sel.reference;
        *method = os.str();
    }
    return sel.n_steps;
}

int cmd_compile(const RunConfig& c) {
    const auto lm = load_model(c.model_path);
    const GridConfig g(c.grid_bits);
    const auto r = step_count_for(c, lm.model, g, nullptr);
    const auto circ =
        circuit::build_evolution(lm.model, g, sign_of(c) * units::fs_to_au(c.time_fs), r, c.order, compile_options(c));
    circuit::validate_circuit(circ);
    emit(c.out, [&](std::ostream& os) {
        os << "# steps " << r << " order " << c.order << "\n";
        circuit::write_gate_list(os, circ);
    });
    std::cerr << circ.layout.summary() << "gates: " << circ.gates.size() << "\ntoffoli: " << toffoli_count(circ)
              << "\n";
    return 0;
}

int cmd_estimate(const RunConfig& c) {
    const auto lm = load_model(c.model_path);
    const GridConfig g(c.grid_bits);
    std::string method;
    const auto r = step_count_for(c, lm.model, g, &method);
    auto rep = estimate_total(lm.model, g, units::fs_to_au(c.time_fs), r, c.order, compile_options(c));
    rep.system = lm.name;
    rep.step_method = method;
    if (!c.steps) rep.epsilon = c.epsilon;
    std::cout << resource_table({rep});
    std::cout << "qubits: system " << rep.qubits.system << ", ancilla " << rep.qubits.ancilla << ", total "
              << rep.qubits.total << "\n";
    std::cout << "toffoli per step: " << rep.toffoli_per_step << ", steps: " << rep.n_steps
              << ", total: " << rep.total_toffoli << "\n";
    if (!c.out.empty()) emit(c.out, [&](std::ostream& os) { os << to_json(rep).dump(2) << "\n"; });
    return 0;
}

std::size_t initial_state_for(const RunConfig& c, const VibronicModel& m) {
    return c.initial_state.value_or(brightest_state(m));
}

int cmd_simulate(const RunConfig& c) {
    const auto lm = load_model(c.model_path);
    const auto& m = lm.model;
    const GridConfig g(c.grid_bits);
    if (c.time_points < 2) throw ValidationError("--time-points must be >= 2");
    const double t_total = sign_of(c) * units::fs_to_au(c.time_fs);
    const auto psi0 = prepare_vertical_excitation(m, g, initial_state_for(c, m));
    const std::size_t intervals = c.time_points - 1;

    PopulationTrace trace;
    auto record = [&](std::size_t i, const StateVector& s) {
        trace.times_fs.push_back(c.time_fs * static_cast<double>(i) / static_cast<double>(intervals));
        trace.populations.push_back(c.shots > 0 ? sample_populations(s, m.n_states_logical, c.shots, c.seed + i)
                                                : populations(s, m.n_states_logical));
    };

    StateVector final_state;
    if (c.backend == "oracle") {
        const sim::ExactPropagator prop(m, g, c.include_v0);
        for (std::size_t i = 0; i <= intervals; ++i) {
            auto s = prop.evolve(psi0, t_total * static_cast<double>(i) / static_cast<double>(intervals));
            record(i, s);
            if (i == intervals) final_state = std::move(s);
        }
    } else {
        // r steps in total, rounded up to a multiple of the sample intervals
        std::size_t r = step_count_for(c, m, g, nullptr);
        const std::size_t per = (r + intervals - 1) / intervals;
        r = per * intervals;
        const auto step =
            circuit::build_trotter_step(m, g, t_total / static_cast<double>(r), c.order, compile_options(c));
        auto s = psi0;
        record(0, s);
        for (std::size_t i = 1; i <= intervals; ++i) {
            for (std::size_t k = 0; k < per; ++k) {
                if (c.backend == "semantic") {
                    sim::apply_semantic(s, step);
                } else {
                    auto res = sim::apply_faithful(s, step);
                    if (res.ancilla_overlap < 1.0 - 1e-10) {
                        throw NumericalError("ancillas not restored (overlap " + std::to_string(res.ancilla_overlap) +
                                             ")");
                    }
                    s = std::move(res.state);
                }
            }
            record(i, s);
        }
        final_state = std::move(s);
    }
    emit(c.out, [&](std::ostream& os) { write_csv(os, trace); });
    if (!c.out.empty() && c.out != "-") {
        std::ofstream js(c.out + ".json");
        js << to_json(trace).dump(2) << "\n";
    }
    if (!c.snapshot.empty()) {
        write_snapshot(final_state, c.snapshot, {{"time_fs", c.time_fs}, {"backend", c.backend}});
    }
    return 0;
}

int cmd_spectrum(const RunConfig& c) {
    const auto lm = load_model(c.model_path);
    const auto& m = lm.model;
    const GridConfig g(c.grid_bits);
    if (c.backend != "oracle") throw ValidationError("spectrum supports the oracle backend only");
    if (c.time_points < 2) throw ValidationError("--time-points must be >= 2");
    const auto mu = m.dipole.value_or(DipoleMatrix::identity(m.n_states_logical));
    const auto psi =
        c.initial_state ? prepare_vertical_excitation(m, g, *c.initial_state) : prepare_dipole_state(m, g, mu);
    const double t_max = units::fs_to_au(c.time_fs);
    const sim::ExactPropagator prop(m, g, c.include_v0);
    const auto samples = autocorrelation(prop, psi, mu, t_max, c.time_points, sign_of(c));
    const double eta = c.damping_per_fs ? *c.damping_per_fs / units::fs_in_atomic_time : 5.0 / t_max;
    const auto result = spectrum(samples, t_max / static_cast<double>(c.time_points - 1), eta);
    emit(c.out, [&](std::ostream& os) { write_csv(os, result); });
    if (!c.out.empty() && c.out != "-") {
        std::ofstream js(c.out + ".json");
        js << to_json(result).dump(2) << "\n";
    }
    for (const auto& p : result.peaks)
        std::cerr << "peak " << units::hartree_to_ev(p.omega) << " eV, intensity " << p.intensity << "\n";
    return 0;
}

void add_common(CLI::App* sub, RunConfig& c) {
    sub->add_option("--model", c.model_path, "Model file (JSON)")->required();
    sub->add_option("--grid-bits", c.grid_bits, "Qubits per mode, K = 2^k grid points")->check(CLI::Range(1, 20));
    sub->add_option("--order", c.order, "Product-formula order")->check(CLI::IsMember({1, 2, 4}));
    sub->add_option("--time-fs", c.time_fs, "Evolution time in fs")->check(CLI::NonNegativeNumber);
    sub->add_option("--epsilon", c.epsilon, "Target Trotter error for step selection")->check(CLI::PositiveNumber);
    sub->add_option("--steps", c.steps, "Trotter steps (skips empirical selection)");
    sub->add_option("--fixed-point-bits", c.fixed_point_bits, "Coefficient register width w; 0 sizes it automatically");
    sub->add_option("--frac-bits", c.frac_bits, "Fractional bits when w is sized automatically");
    sub->add_option("--backend", c.backend, "Simulation backend")
        ->check(CLI::IsMember({"faithful", "semantic", "oracle"}));
    sub->add_flag("--oracle{oracle},--compiled{semantic}", c.backend, "Shorthands for --backend");
    sub->add_flag("--include-v0,!--no-include-v0", c.include_v0, "Include the harmonic term in fragment 0");
    sub->add_option("--sign", c.sign, "Propagator sign: plus = exp(+iHt), minus = exp(-iHt)")
        ->check(CLI::IsMember({"plus", "minus"}));
    sub->add_option("--seed", c.seed, "Seed for sampled populations (--shots)");
    sub->add_option("--out", c.out, "Output path");
    sub->add_flag("--no-cache", c.no_cache, "Compile without prefix caching");
    sub->add_option("--initial-state", c.initial_state, "Initially excited electronic state");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vibronic dynamics: circuit compilation, resource estimation and simulation"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* compile = app.add_subcommand("compile", "Write the gate list of the evolution");
    add_common(compile, cfg);
    auto* estimate = app.add_subcommand("estimate", "Qubit and Toffoli counts");
    add_common(estimate, cfg);
    auto* simulate = app.add_subcommand("simulate", "Diabatic population trace (CSV)");
    add_common(simulate, cfg);
    simulate->add_option("--time-points", cfg.time_points, "Number of sampled times including t = 0");
    simulate->add_option("--shots", cfg.shots, "Sample populations from this many measurements (0: exact)");
    simulate->add_option("--snapshot", cfg.snapshot, "Write the final state to this path");
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Absorption spectrum from the dipole autocorrelation (CSV)");
    add_common(spectrum_cmd, cfg);
    spectrum_cmd->add_option("--time-points", cfg.time_points, "Autocorrelation samples");
    spectrum_cmd->add_option("--damping", cfg.damping_per_fs, "Damping rate in 1/fs (default 5 / t_max)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*compile) return cmd_compile(cfg);
        if (*estimate) return cmd_estimate(cfg);
        if (*simulate) return cmd_simulate(cfg);
        if (*spectrum_cmd) return cmd_spectrum(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
