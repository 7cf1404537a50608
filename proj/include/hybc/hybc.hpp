// Copyright 2026 The hybc Authors
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

#include "hybc/circuit.hpp"
#include "hybc/demos.hpp"
#include "hybc/errors.hpp"
#include "hybc/fock_sim.hpp"
#include "hybc/gates.hpp"
#include "hybc/jaqal.hpp"
#include "hybc/json_io.hpp"
#include "hybc/measurements.hpp"
#include "hybc/qasm.hpp"
#include "hybc/rewrite.hpp"
#include "hybc/tape.hpp"
#include "hybc/wire_types.hpp"
