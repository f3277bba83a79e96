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

#include "vibronic/circuit/compiler.hpp"
#include "vibronic/circuit/ir.hpp"
#include "vibronic/circuit/schedule.hpp"
#include "vibronic/circuit/trotter.hpp"
#include "vibronic/error.hpp"
#include "vibronic/fragmentation.hpp"
#include "vibronic/grid.hpp"
#include "vibronic/model.hpp"
#include "vibronic/observables.hpp"
#include "vibronic/parallel.hpp"
#include "vibronic/resources.hpp"
#include "vibronic/sim/faithful.hpp"
#include "vibronic/sim/oracle.hpp"
#include "vibronic/sim/product_formula.hpp"
#include "vibronic/sim/semantic.hpp"
#include "vibronic/sim/state.hpp"
#include "vibronic/step_count.hpp"
#include "vibronic/units.hpp"
