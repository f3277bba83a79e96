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
#include <compare>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vibronic/error.hpp"
#include "vibronic/units.hpp"

namespace vibronic {

// Monomial Q_{r0}^{a0} Q_{r1}^{a1} ... over normal-mode coordinates. The
// empty list is the constant monomial.
class MultiIndex {
  public:
    using Power = std::pair<std::size_t, unsigned>;  // (mode, exponent)

    MultiIndex() = default;

    // Accepts powers in any order; repeated modes are merged (Q0 Q0 == Q0^2).
    static MultiIndex from_powers(std::vector<Power> powers) {
        std::sort(powers.begin(), powers.end());
        MultiIndex out;
        for (const auto& [mode, exponent] : powers) {
            if (exponent == 0) {
                throw ValidationError("zero exponent for mode " + std::to_string(mode));
            }
            if (!out.powers_.empty() && out.powers_.back().first == mode) {
                out.powers_.back().second += exponent;
            } else {
                out.powers_.emplace_back(mode, exponent);
            }
        }
        return out;
    }

    // Builds a monomial from a multiset of mode factors, e.g. {0, 0, 1}.
    static MultiIndex from_factors(const std::vector<std::size_t>& factors) {
        std::vector<Power> powers;
        powers.reserve(factors.size());
        for (auto f : factors) powers.emplace_back(f, 1u);
        return from_powers(std::move(powers));
    }

    static MultiIndex single(std::size_t mode, unsigned exponent = 1) { return from_powers({{mode, exponent}}); }

    const std::vector<Power>& powers() const noexcept { return powers_; }
    bool is_constant() const noexcept { return powers_.empty(); }

    unsigned degree() const noexcept {
        unsigned d = 0;
        for (const auto& p : powers_) d += p.second;
        return d;
    }

    // Mode factors in nondecreasing order; Q0^2 Q1 -> {0, 0, 1}.
    std::vector<std::size_t> factors() const {
        std::vector<std::size_t> out;
        for (const auto& [mode, exponent] : powers_) out.insert(out.end(), exponent, mode);
        return out;
    }

    std::size_t max_mode() const noexcept { return powers_.empty() ? 0 : powers_.back().first; }

    std::string to_string() const {
        if (powers_.empty()) return "1";
        std::ostringstream os;
        for (std::size_t i = 0; i < powers_.size(); ++i) {
            if (i) os << ' ';
            os << 'Q' << powers_[i].first;
            if (powers_[i].second > 1) os << '^' << powers_[i].second;
        }
        return os.str();
    }

    auto operator<=>(const MultiIndex&) const = default;

  private:
    std::vector<Power> powers_;
};

struct CouplingKey {
    std::size_t bra = 0;
    std::size_t ket = 0;
    MultiIndex monomial;

    auto operator<=>(const CouplingKey&) const = default;

    std::string to_string() const {
        return "(" + std::to_string(bra) + "," + std::to_string(ket) + "," + monomial.to_string() + ")";
    }
};

// Transition dipole matrix on the unpadded electronic states.
struct DipoleMatrix {
    std::size_t size = 0;
    std::vector<double> entries;  // row-major size x size

    double at(std::size_t j, std::size_t i) const { return entries.at(j * size + i); }

    static DipoleMatrix identity(std::size_t n) {
        DipoleMatrix d{n, std::vector<double>(n * n, 0.0)};
        for (std::size_t j = 0; j < n; ++j) d.entries[j * n + j] = 1.0;
        return d;
    }

    bool operator==(const DipoleMatrix&) const = default;
};

inline std::size_t next_power_of_two(std::size_t n) { return n <= 1 ? 1 : std::bit_ceil(n); }

// Polynomial vibronic Hamiltonian. Energies are in Hartree; couplings are
// stored as given, without the grid factor Delta^|alpha|.
struct VibronicModel {
    std::size_t n_states_logical = 1;
    std::size_t n_states = 1;
    std::vector<double> frequencies;
    unsigned max_degree = 0;
    std::map<CouplingKey, double> couplings;
    std::optional<DipoleMatrix> dipole;

    std::size_t n_modes() const noexcept { return frequencies.size(); }

    unsigned electronic_qubits() const noexcept { return static_cast<unsigned>(std::countr_zero(n_states)); }

    double coupling(std::size_t bra, std::size_t ket, const MultiIndex& alpha) const {
        auto it = couplings.find(CouplingKey{bra, ket, alpha});
        return it == couplings.end() ? 0.0 : it->second;
    }

    // Sets (bra, ket, alpha) and its mirror.
    void set_coupling(std::size_t bra, std::size_t ket, const MultiIndex& alpha, double value) {
        couplings[CouplingKey{bra, ket, alpha}] = value;
        couplings[CouplingKey{ket, bra, alpha}] = value;
        max_degree = std::max(max_degree, alpha.degree());
    }

    bool operator==(const VibronicModel&) const = default;
};

// Builds an empty model with `n_states` logical states, padded to a power of two.
inline VibronicModel make_model(std::size_t n_states, std::vector<double> frequencies, unsigned max_degree = 0) {
    VibronicModel m;
    m.n_states_logical = n_states;
    m.n_states = next_power_of_two(n_states);
    m.frequencies = std::move(frequencies);
    m.max_degree = max_degree;
    return m;
}

struct Diagnostic {
    std::string invariant;
    std::string message;
};

inline std::vector<Diagnostic> validate_model(const VibronicModel& m) {
    std::vector<Diagnostic> out;
    auto add = [&](std::string inv, std::string msg) { out.push_back({std::move(inv), std::move(msg)}); };

    if (m.n_states == 0 || !std::has_single_bit(m.n_states)) {
        add("padded-power-of-two", "padded state count " + std::to_string(m.n_states) + " is not a power of two");
    }
    if (m.n_states_logical == 0 || m.n_states_logical > m.n_states) {
        add("logical-states", "logical state count " + std::to_string(m.n_states_logical) + " not in [1, " +
                                  std::to_string(m.n_states) + "]");
    }
    for (std::size_t r = 0; r < m.frequencies.size(); ++r) {
        const double w = m.frequencies[r];
        if (!(w > 0.0) || !std::isfinite(w))
            add("frequency-positive", "frequency nonpositive, mode " + std::to_string(r));
    }
    for (const auto& [key, value] : m.couplings) {
        const auto name = key.to_string();
        if (key.bra >= m.n_states || key.ket >= m.n_states) {
            add("state-range", "state index out of range " + name);
        } else if (key.bra >= m.n_states_logical || key.ket >= m.n_states_logical) {
            add("padded-empty", "padded state carries coupling " + name);
        }
        const auto& powers = key.monomial.powers();
        for (std::size_t i = 0; i < powers.size(); ++i) {
            if (powers[i].second == 0) add("multi-index", "zero exponent in " + name);
            if (i > 0 && powers[i].first <= powers[i - 1].first) add("multi-index", "mode order in " + name);
            if (powers[i].first >= m.n_modes()) add("mode-range", "mode index out of range " + name);
        }
        if (key.monomial.degree() > m.max_degree) {
            add("max-degree", "degree " + std::to_string(key.monomial.degree()) + " exceeds max_degree in " + name);
        }
        if (!std::isfinite(value)) add("finite", "non-finite coefficient " + name);
        if (key.bra != key.ket) {
            const double mirror = m.coupling(key.ket, key.bra, key.monomial);
            if (std::abs(mirror - value) > 1e-12 * std::max(1.0, std::abs(value))) {
                add("symmetry", "asymmetric coupling " + name);
            }
        }
    }
    if (m.dipole) {
        const auto& d = *m.dipole;
        if (d.size != m.n_states_logical || d.entries.size() != d.size * d.size) {
            add("dipole-shape", "dipole matrix must be " + std::to_string(m.n_states_logical) + "x" +
                                    std::to_string(m.n_states_logical));
        } else {
            for (std::size_t j = 0; j < d.size; ++j)
                for (std::size_t i = 0; i < j; ++i)
                    if (std::abs(d.at(j, i) - d.at(i, j)) > 1e-12)
                        add("dipole-symmetry",
                            "asymmetric dipole (" + std::to_string(j) + "," + std::to_string(i) + ")");
        }
    }
    return out;
}

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

template <class T>
T field(const nlohmann::json& doc, const char* name) {
    if (!doc.contains(name)) throw ValidationError(std::string("missing field '") + name + "'");
    try {
        return doc.at(name).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("field '") + name + "': " + e.what());
    }
}

}  // namespace detail

// Parses the JSON model format. Missing mirror couplings are filled in; a
// mirror given explicitly must carry the same value.
inline VibronicModel parse_model(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        auto [line, column] = detail::line_column(text, e.byte);
        throw ParseError(e.what(), line, column);
    }
    if (!doc.is_object()) throw ParseError("model document must be a JSON object", 1, 1);

    const auto states = detail::field<long long>(doc, "states");
    if (states < 1) throw ValidationError("'states' must be >= 1");
    const auto unit = units::parse_energy_unit(doc.value("unit", std::string("au")));
    const auto max_degree = detail::field<long long>(doc, "max_degree");
    if (max_degree < 0) throw ValidationError("'max_degree' must be >= 0");

    std::vector<double> freqs;
    for (double w : detail::field<std::vector<double>>(doc, "modes")) {
        if (!(w > 0.0)) throw ValidationError("frequency nonpositive, mode " + std::to_string(freqs.size()));
        freqs.push_back(units::to_hartree(w, unit));
    }

    auto model = make_model(static_cast<std::size_t>(states), std::move(freqs), static_cast<unsigned>(max_degree));

    std::map<CouplingKey, double> given;
    const auto records = doc.contains("couplings") ? doc.at("couplings") : nlohmann::json::array();
    if (!records.is_array()) throw ValidationError("'couplings' must be an array");
    for (std::size_t n = 0; n < records.size(); ++n) {
        const auto& rec = records[n];
        const auto where = "coupling #" + std::to_string(n);
        if (!rec.is_object()) throw ValidationError(where + " is not an object");
        const auto bra = detail::field<long long>(rec, "bra");
        const auto ket = detail::field<long long>(rec, "ket");
        if (bra < 0 || ket < 0 || bra >= states || ket >= states) {
            throw ValidationError(where + ": state index out of range (" + std::to_string(bra) + "," +
                                  std::to_string(ket) + ")");
        }
        std::vector<MultiIndex::Power> powers;
        for (const auto& p : detail::field<std::vector<std::vector<long long>>>(rec, "powers")) {
            if (p.size() != 2) throw ValidationError(where + ": each power must be [mode, exponent]");
            if (p[0] < 0 || static_cast<std::size_t>(p[0]) >= model.n_modes()) {
                throw ValidationError(where + ": mode index out of range " + std::to_string(p[0]));
            }
            if (p[1] < 1) throw ValidationError(where + ": exponent must be >= 1");
            powers.emplace_back(static_cast<std::size_t>(p[0]), static_cast<unsigned>(p[1]));
        }
        CouplingKey key{static_cast<std::size_t>(bra), static_cast<std::size_t>(ket),
                        MultiIndex::from_powers(std::move(powers))};
        if (key.monomial.degree() > model.max_degree) {
            throw ValidationError(where + ": degree exceeds max_degree " + key.to_string());
        }
        const double value = units::to_hartree(detail::field<double>(rec, "value"), unit);
        if (!given.emplace(key, value).second) throw ValidationError("duplicate coupling " + key.to_string());
    }
    for (const auto& [key, value] : given) {
        CouplingKey mirror{key.ket, key.bra, key.monomial};
        auto it = given.find(mirror);
        if (it != given.end() && std::abs(it->second - value) > 1e-12 * std::max(1.0, std::abs(value))) {
            throw ValidationError("asymmetric coupling " + key.to_string());
        }
        model.couplings[key] = value;
        model.couplings[mirror] = value;
    }

    if (doc.contains("dipole")) {
        const auto rows = detail::field<std::vector<std::vector<double>>>(doc, "dipole");
        DipoleMatrix d{model.n_states_logical, {}};
        if (rows.size() != d.size) throw ValidationError("dipole must have one row per state");
        for (const auto& row : rows) {
            if (row.size() != d.size) throw ValidationError("dipole rows must have one entry per state");
            d.entries.insert(d.entries.end(), row.begin(), row.end());
        }
        model.dipole = std::move(d);
    }

    const auto diags = validate_model(model);
    if (!diags.empty()) {
        std::string msg = diags.front().message;
        for (std::size_t i = 1; i < diags.size(); ++i) msg += "; " + diags[i].message;
        throw ValidationError(msg);
    }
    return model;
}

inline VibronicModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

// Writes the model in Hartree units. Each symmetric pair is emitted once.
inline std::string serialize_model(const VibronicModel& m) {
    nlohmann::json doc;
    doc["states"] = m.n_states_logical;
    doc["unit"] = "au";
    doc["modes"] = m.frequencies;
    doc["max_degree"] = m.max_degree;
    auto records = nlohmann::json::array();
    for (const auto& [key, value] : m.couplings) {
        if (key.bra > key.ket) continue;
        auto powers = nlohmann::json::array();
        for (const auto& [mode, exponent] : key.monomial.powers()) powers.push_back({mode, exponent});
        records.push_back({{"bra", key.bra}, {"ket", key.ket}, {"powers", powers}, {"value", value}});
    }
    doc["couplings"] = records;
    if (m.dipole) {
        auto rows = nlohmann::json::array();
        for (std::size_t j = 0; j < m.dipole->size; ++j) {
            std::vector<double> row(m.dipole->entries.begin() + static_cast<std::ptrdiff_t>(j * m.dipole->size),
                                    m.dipole->entries.begin() + static_cast<std::ptrdiff_t>((j + 1) * m.dipole->size));
            rows.push_back(row);
        }
        doc["dipole"] = rows;
    }
    // max_digits10 is what nlohmann emits for doubles, so values round-trip.
    return doc.dump(2);
}

}  // namespace vibronic
