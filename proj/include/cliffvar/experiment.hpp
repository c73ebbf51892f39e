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

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cliffvar/angle_distribution.hpp"
#include "cliffvar/circuit.hpp"
#include "cliffvar/estimator.hpp"
#include "cliffvar/io.hpp"

namespace cliffvar {

enum class ExperimentKind : std::uint8_t {
  VarianceVsN,
  BiasVsK,
  VarVsK,
  ArchitectureScan,
  SingleEstimate
};
std::string_view experiment_name(ExperimentKind kind);

/// CZ pattern placed after every rotation layer. Brick alternates between
/// pairs (0,1)(2,3)... on even layers and (1,2)(3,4)... on odd ones.
enum class Entangler : std::uint8_t { Brick, Ladder, None };

struct TemplateSpec {
  std::size_t layers = 1;
  Entangler entangler = Entangler::Brick;
  /// nullopt draws X, Y or Z independently per site.
  std::optional<PauliAxis> axis;
  /// Each layer keeps m ~ Uniform{0..n} rotations on distinct random qubits.
  bool thin_layers = false;
};

/// What is estimated per architecture. GradientVariance is E[(dC)^2] - E[dC]^2.
enum class Target : std::uint8_t { Cost, Gradient, CostSquared, SquaredGradient, GradientVariance };
std::string_view target_name(Target target);

enum class TruthMethod : std::uint8_t { Quadrature, DenseMonteCarlo, Enumerate };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::VarianceVsN;
  std::uint64_t seed = 0;
  TemplateSpec templ;
  std::vector<std::size_t> n_values;
  AngleDistribution distribution = AngleDistribution::uniform();
  /// {"type": "zero_projector" | "random_pauli_sum" | "pauli_sum", ...}.
  nlohmann::json observable = {{"type", "zero_projector"}};
  Target target = Target::SquaredGradient;
  std::uint32_t param = 0;
  /// Either samples or (epsilon, delta) is set.
  std::size_t samples = 0;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::size_t architectures = 1;
  /// Dense Monte Carlo reference draws (0 = none); only for n within the dense cap.
  std::size_t dense_draws = 0;

  // bias_vs_K / var_vs_K
  std::vector<std::size_t> k_values;
  std::size_t bootstrap = 100;
  /// Estimators resample from a fixed pool of this many approximant samples; 0 draws fresh ones.
  std::size_t pool = 0;
  TruthMethod truth = TruthMethod::Quadrature;
  std::size_t truth_draws = 4000;

  // single_estimate
  std::optional<Problem> problem;

  std::string output;
  nlohmann::json source;
};

/// Parses and validates; throws ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

struct RunOptions {
  std::string out_dir;
  std::size_t threads = 1;
  std::optional<std::uint64_t> seed;
};

struct RunSummary {
  std::vector<std::string> files;
  nlohmann::json summary;
  bool interrupted = false;
};

/// Dispatches on config.kind and writes CSV tables plus summary.json into out_dir.
RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Asks running experiments to stop after the current row (safe from a signal handler).
void request_stop();
bool stop_requested();
void clear_stop();

/// Seed of architecture `index` at size n; rows carry it so an architecture
/// can be rebuilt in isolation.
std::uint64_t architecture_seed(std::uint64_t master, std::size_t n, std::size_t index);

struct Architecture {
  ParamCircuit circuit;
  Observable observable;
};

/// Instance of the template on n qubits; all randomness comes from `rng`.
Architecture generate_architecture(const TemplateSpec& templ, std::size_t n,
                                   const AngleDistribution& dist,
                                   const nlohmann::json& observable, std::mt19937_64& rng);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};
/// Least squares y ~ intercept + slope x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// %.17g, so values round-trip.
std::string format_double(double v);

}  // namespace cliffvar
