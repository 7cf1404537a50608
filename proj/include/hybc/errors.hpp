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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hybc {

/// Base class of every error raised by the toolkit. Anything derived from
/// this is a user/circuit error (CLI exit code 1); anything else is internal.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed instruction or tape.
struct ConstructionError : Error {
    using Error::Error;
};

struct UnknownGateError : Error {
    using Error::Error;
};

/// A gate whose wire types can be determined neither from a declared
/// signature nor from a decomposition.
struct SignatureError : Error {
    using Error::Error;
};

struct UnsupportedError : Error {
    using Error::Error;
};

struct SimulationError : Error {
    using Error::Error;
};

struct MeasurementError : Error {
    using Error::Error;
};

/// Rewrite engine found no rule sequence into the target gate set.
struct NoRouteError : Error {
    using Error::Error;
};

struct DepthExceededError : Error {
    using Error::Error;
};

/// Virtual qumode allocation could not satisfy the device constraints.
struct UnsatisfiableError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string &msg, std::size_t line_, std::size_t column_)
        : Error("line " + std::to_string(line_) + ":" + std::to_string(column_) + ": " + msg),
          line(line_),
          column(column_) {
    }
    std::size_t line;
    std::size_t column;
};

}  // namespace hybc
