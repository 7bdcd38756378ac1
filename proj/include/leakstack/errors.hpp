// Copyright 2026 The leakstack Authors
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

#include <stdexcept>
#include <string>

namespace leakstack {

/// Malformed or missing configuration input (unreadable file, parse error,
/// missing field).
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A domain invariant was violated by otherwise well-formed input.
class InvariantError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Integrator or fitter failed to produce a trustworthy result.
class NumericalError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace leakstack
