// Copyright 2026 the dflx authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace dflx {

// Base for all library errors. CLI maps ConfigError -> exit 3 and
// RuntimeFailure -> exit 2; everything else is a programming error.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid user-facing input: bad config keys, parameter domains, schedules.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct ParamDomain : ConfigError {
  explicit ParamDomain(const std::string& msg) : ConfigError(msg) {}
};

// A run started from valid inputs failed while advancing.
struct RuntimeFailure : Error {
  explicit RuntimeFailure(const std::string& msg) : Error(msg) {}
};

struct VacuumEncountered : RuntimeFailure {
  explicit VacuumEncountered(const std::string& msg) : RuntimeFailure(msg) {}
};

struct NonFinite : RuntimeFailure {
  explicit NonFinite(const std::string& msg) : RuntimeFailure(msg) {}
};

struct MeanNotZero : Error {
  explicit MeanNotZero(const std::string& msg) : Error(msg) {}
};

struct DeltaOutOfRange : ParamDomain {
  explicit DeltaOutOfRange(const std::string& msg) : ParamDomain(msg) {}
};

struct HTooLarge : ParamDomain {
  explicit HTooLarge(const std::string& msg) : ParamDomain(msg) {}
};

struct SplitNotFound : RuntimeFailure {
  explicit SplitNotFound(const std::string& msg) : RuntimeFailure(msg) {}
};

// Artifact files that cannot be written, read, or parsed.
struct IoFailure : RuntimeFailure {
  explicit IoFailure(const std::string& msg) : RuntimeFailure(msg) {}
};

struct QuadratureNoConvergence : RuntimeFailure {
  explicit QuadratureNoConvergence(const std::string& msg) : RuntimeFailure(msg) {}
};

struct InconsistentData : ConfigError {
  explicit InconsistentData(const std::string& msg) : ConfigError(msg) {}
};

struct ExponentNonpositive : ConfigError {
  explicit ExponentNonpositive(const std::string& msg) : ConfigError(msg) {}
};

}  // namespace dflx
