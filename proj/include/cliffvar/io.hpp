// Copyright 2026 The cliffvar Authors
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

#include <nlohmann/json.hpp>

#include "cliffvar/angle_distribution.hpp"
#include "cliffvar/channel.hpp"
#include "cliffvar/circuit.hpp"
#include "cliffvar/estimator.hpp"

namespace cliffvar {

/// Malformed or inconsistent configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {"dist": "uniform" | "gaussian" | "dirac" | "tabulated", ..., "center": angle?}
AngleDistribution distribution_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AngleDistribution& dist);

/// {"kind": "CZ", "q": [control, target]} or {"kind": "H", "q": [0]} / "q": 0.
CliffordGate gate_from_json(const nlohmann::json& j, std::size_t n);
nlohmann::json to_json(const CliffordGate& gate);

/// {"type": "zero_projector", "support": [..]?} or
/// {"type": "pauli_sum", "terms": [{"coeff": c, "pauli": "XZI"}]}.
Observable observable_from_json(const nlohmann::json& j, std::size_t n);
nlohmann::json to_json(const Observable& observable);

struct Problem {
  ParamCircuit circuit;
  Observable observable;
};

/// {n, distributions?, layers: [{fixed?, rotation | rotations}], final?, observable}.
/// Parameters are numbered in order of appearance.
Problem problem_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ParamCircuit& circuit);

nlohmann::json to_json(const CliffordMixture& mixture);
nlohmann::json to_json(const EstimateReport& report);

/// Throws ConfigError with the file name on I/O or parse failure.
nlohmann::json read_json_file(const std::string& path);

}  // namespace cliffvar
