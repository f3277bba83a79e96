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

#include <string>
#include <string_view>

#include "vibronic/error.hpp"

// Everything inside the library is in Hartree atomic units. Conversion
// constants are CODATA 2018.
namespace vibronic::units {

inline constexpr double hartree_in_ev = 27.211386245988;
inline constexpr double hartree_in_inverse_cm = 219474.6313632;
// One atomic unit of time is 2.4188843265857e-17 s.
inline constexpr double fs_in_atomic_time = 41.341373335182;

enum class EnergyUnit { hartree, ev, inverse_cm };

inline EnergyUnit parse_energy_unit(std::string_view name) {
    if (name == "au" || name == "hartree") return EnergyUnit::hartree;
    if (name == "eV" || name == "ev") return EnergyUnit::ev;
    if (name == "cm-1") return EnergyUnit::inverse_cm;
    throw ValidationError("unknown energy unit '" + std::string(name) + "' (expected eV, cm-1 or au)");
}

inline double to_hartree(double value, EnergyUnit unit) {
    switch (unit) {
        case EnergyUnit::hartree:
            return value;
        case EnergyUnit::ev:
            return value / hartree_in_ev;
        case EnergyUnit::inverse_cm:
            return value / hartree_in_inverse_cm;
    }
    return value;
}

inline double ev_to_hartree(double ev) { return ev / hartree_in_ev; }
inline double hartree_to_ev(double ha) { return ha * hartree_in_ev; }
inline double fs_to_au(double fs) { return fs * fs_in_atomic_time; }
inline double au_to_fs(double t) { return t / fs_in_atomic_time; }

}  // namespace vibronic::units
