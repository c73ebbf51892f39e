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

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cliffvar/circuit.hpp"
#include "cliffvar/gates.hpp"

namespace cliffvar {

inline constexpr std::size_t kDenseQubitCap = 14;

/// Statevector with qubit q stored as bit q of the amplitude index.
class DenseState {
 public:
  explicit DenseState(std::size_t n, std::size_t cap = kDenseQubitCap);

  std::size_t num_qubits() const { return n_; }
  const std::vector<std::complex<double>>& amplitudes() const { return amps_; }

  void apply(const CliffordGate& gate);
  /// exp(-i theta P / 2) on qubit q.
  void rotate(std::uint32_t q, PauliAxis axis, double theta);

  double expectation(const PauliString& p) const;
  double expectation(const Observable& observable) const;
  double norm() const;

 private:
  void apply_1q(std::uint32_t q, const std::complex<double> (&m)[2][2]);

  std::size_t n_;
  std::vector<std::complex<double>> amps_;
};

/// C(theta) = <0|U(theta)^dag O U(theta)|0>, theta indexed by parameter.
double evaluate_cost(const ParamCircuit& circuit, const Observable& observable,
                     std::span<const double> theta, std::size_t cap = kDenseQubitCap);

/// <O> after a plain Clifford gate list on |0...0>.
double evaluate_gates(std::span<const CliffordGate> gates, const Observable& observable,
                      std::size_t cap = kDenseQubitCap);

/// 2^n x 2^n unitary of a gate list; for small verification problems.
Eigen::MatrixXcd dense_unitary(std::span<const CliffordGate> gates, std::size_t n);

/// The quantity evaluated at one theta; gradients by the shift rule.
double evaluate_quantity(const ParamCircuit& circuit, const Observable& observable,
                         const Quantity& quantity, std::span<const double> theta);

struct DenseAverage {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t draws = 0;
};

/// Monte Carlo over theta drawn from each parameter's law.
DenseAverage mc_average(const ParamCircuit& circuit, const Observable& observable,
                        const Quantity& quantity, std::size_t draws, std::mt19937_64& rng);

/// Deterministic E[quantity]. Every quantity is a trigonometric polynomial of
/// degree <= 2 in each angle, so per-axis rules that reproduce the first two
/// moments are exact: Dirac atoms as given, otherwise five equispaced nodes
/// with moment-matched (possibly signed) weights. Throws if the tensor grid
/// exceeds `max_points`.
double quadrature_average(const ParamCircuit& circuit, const Observable& observable,
                          const Quantity& quantity, std::size_t max_points = 1U << 22);

}  // namespace cliffvar
