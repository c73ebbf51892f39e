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
#include <string>
#include <vector>

#include "cliffvar/channel.hpp"
#include "cliffvar/circuit.hpp"
#include "cliffvar/tableau.hpp"

namespace cliffvar {

enum class EstimatorMode : std::uint8_t { Convex, Quasiprobability };

std::string_view mode_name(EstimatorMode mode);

struct SamplePlan {
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t num_params = 0;
  double norm_bound = 1.0;
  double gamma_total = 1.0;
  std::size_t samples = 0;
  EstimatorMode mode = EstimatorMode::Convex;
};

/// K = ceil((2/eps^2) ln(2/delta) gamma M ||O||^2).
SamplePlan plan_samples(double epsilon, double delta, std::size_t num_params, double norm_bound,
                        double gamma_total = 1.0);

struct Approximant {
  std::vector<CliffordGate> gates;
  double sign = 1.0;
};

/// Replaces every rotation of a Z-only circuit (doubled when order == 2)
/// by a term of its parameter's mixture. Mixtures are indexed by parameter.
class ApproximantSampler {
 public:
  ApproximantSampler(ParamCircuit circuit, std::vector<CliffordMixture> mixtures);

  /// Mixtures built from the circuit's laws: one_fold for plain circuits,
  /// two_fold for doubled ones. Laws must already be recentred.
  static ApproximantSampler for_circuit(const ParamCircuit& circuit);

  int order() const { return order_; }
  const ParamCircuit& circuit() const { return circuit_; }
  const std::vector<CliffordMixture>& mixtures() const { return mixtures_; }
  double gamma_total() const { return gamma_total_; }
  EstimatorMode mode() const { return mode_; }

  /// One term index per parameter.
  std::vector<std::size_t> draw_choices(std::mt19937_64& rng) const;
  void draw_choices(std::mt19937_64& rng, std::vector<std::size_t>& out) const;
  /// Product of the signs of the chosen weights.
  double sign(const std::vector<std::size_t>& choices) const;
  /// Product of the chosen weights (signed).
  double weight(const std::vector<std::size_t>& choices) const;

  /// Resets `tableau` and runs the approximant selected by `choices`.
  void run(const std::vector<std::size_t>& choices, StabilizerTableau& tableau) const;
  std::vector<CliffordGate> gates(const std::vector<std::size_t>& choices) const;

 private:
  struct Step {
    // Either a fixed gate (slot < 0) or the replacement slot of a parameter.
    CliffordGate gate;
    std::int64_t param = -1;
    std::uint32_t qubits[2] = {0, 0};
  };

  template <typename F>
  void for_each_gate(const std::vector<std::size_t>& choices, F&& f) const;

  ParamCircuit circuit_;
  std::vector<CliffordMixture> mixtures_;
  int order_;
  double gamma_total_ = 1.0;
  EstimatorMode mode_ = EstimatorMode::Convex;
  std::vector<Step> program_;
};

/// One approximant of `circuit`, a Z-only circuit that is doubled when order == 2.
Approximant draw_approximant(const ParamCircuit& circuit, int order,
                             const std::vector<CliffordMixture>& mixtures, std::mt19937_64& rng);

/// <O> on a stabilizer state: Pauli sums term by term, projectors by rank.
double observable_expectation(const StabilizerTableau& tableau, const Observable& observable);

struct EstimatorOptions {
  std::uint64_t seed = 0;
  /// Separates independent estimates that share a seed.
  std::uint64_t stream = 0;
  std::size_t threads = 1;
  std::size_t batches = 100;
};

struct EstimateReport {
  std::string quantity;
  double estimate = 0.0;
  /// Batch-means standard error.
  double standard_error = 0.0;
  std::size_t samples = 0;
  double gamma_total = 1.0;
  EstimatorMode mode = EstimatorMode::Convex;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double wall_seconds = 0.0;
};

/// Generator for one seed stream of batch `batch`; the estimators draw every
/// sample of a batch from it.
std::mt19937_64 batch_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t batch);

/// Single-sample estimator of a quantity: each call draws one approximant and
/// returns gamma * sign * (shift-rule combination of its expectations).
/// Its mean is the quantity; the batch estimators average it.
class QuantitySampler {
 public:
  QuantitySampler(const ParamCircuit& circuit, const Observable& observable,
                  const Quantity& quantity);
  /// E[C(shift_a)] (order 1) or E[C(shift_a) C(shift_b)] (order 2).
  QuantitySampler(const ParamCircuit& circuit, const Observable& observable,
                  std::optional<ParamShift> shift_a, std::optional<ParamShift> shift_b,
                  int order);

  double gamma_total() const { return variants_.front().sampler.gamma_total(); }
  EstimatorMode mode() const { return variants_.front().sampler.mode(); }
  int order() const { return variants_.front().sampler.order(); }
  /// Observable measured on the sampled states (O (x) O at order 2).
  const Observable& observable() const { return observable_; }
  StabilizerTableau make_tableau() const { return StabilizerTableau(observable_.num_qubits()); }

  double sample(std::mt19937_64& rng, StabilizerTableau& tableau,
                std::vector<std::size_t>& choices) const;

 private:
  struct Variant {
    ApproximantSampler sampler;
    double coeff;
  };
  std::vector<Variant> variants_;
  Observable observable_;
};

/// E[C] or, with a shift, E[C(theta +/- pi/2 e_k)].
EstimateReport estimate_first_order(const ParamCircuit& circuit, const Observable& observable,
                                    std::optional<ParamShift> shift, std::size_t samples,
                                    const EstimatorOptions& options);

/// E[C(theta + a1 e_k) C(theta + a2 e_k)], or E[C^2] without shifts.
EstimateReport estimate_second_order(const ParamCircuit& circuit, const Observable& observable,
                                     std::optional<ParamShift> shift_a,
                                     std::optional<ParamShift> shift_b, std::size_t samples,
                                     const EstimatorOptions& options);

/// E[d_k C] = (E[C_+] - E[C_-]) / 2 with common random numbers.
EstimateReport estimate_gradient(const ParamCircuit& circuit, const Observable& observable,
                                 std::uint32_t param, std::size_t samples,
                                 const EstimatorOptions& options);

/// E[(d_k C)^2] = (E[C_+C_+] - 2 E[C_+C_-] + E[C_-C_-]) / 4 with common random numbers.
EstimateReport estimate_squared_gradient(const ParamCircuit& circuit, const Observable& observable,
                                         std::uint32_t param, std::size_t samples,
                                         const EstimatorOptions& options);

/// E[(d_k C)^2] - E[d_k C]^2, unclamped; the two parts use independent streams.
EstimateReport estimate_gradient_variance(const ParamCircuit& circuit,
                                          const Observable& observable, std::uint32_t param,
                                          std::size_t samples, const EstimatorOptions& options);

EstimateReport estimate_quantity(const ParamCircuit& circuit, const Observable& observable,
                                 const Quantity& quantity, std::size_t samples,
                                 const EstimatorOptions& options);

/// Weighted sum over every approximant. Throws std::length_error beyond 2^20 of them.
double enumerate_exact(const ParamCircuit& circuit, const Observable& observable, int order,
                       std::optional<ParamShift> shift_a = std::nullopt,
                       std::optional<ParamShift> shift_b = std::nullopt);

double exact_quantity(const ParamCircuit& circuit, const Observable& observable,
                      const Quantity& quantity);

/// gamma_total and mode of the sampler the estimators would build.
std::pair<double, EstimatorMode> sampling_gamma(const ParamCircuit& circuit, int order);

}  // namespace cliffvar
