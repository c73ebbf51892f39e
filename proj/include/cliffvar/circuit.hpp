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
#include <utility>
#include <variant>
#include <vector>

#include "cliffvar/angle_distribution.hpp"
#include "cliffvar/gates.hpp"

namespace cliffvar {

/// One parameterized rotation exp(-i theta_param P / 2) on `qubit`.
struct RotationSite {
  std::uint32_t qubit = 0;
  PauliAxis axis = PauliAxis::Z;
  std::uint32_t param = 0;
  /// Index into ParamCircuit::distributions().
  std::uint32_t dist = 0;

  friend bool operator==(const RotationSite&, const RotationSite&) = default;
};

/// A layer applies its fixed Clifford gates first, then its rotations.
/// Rotations inside one layer act on distinct qubits.
struct Layer {
  std::vector<CliffordGate> fixed;
  std::vector<RotationSite> rotations;
};

enum class ShiftSign : std::uint8_t { Plus, Minus };

/// theta_param -> theta_param +/- pi/2.
struct ParamShift {
  std::uint32_t param = 0;
  ShiftSign sign = ShiftSign::Plus;
};

/// Layered ansatz acting on |0...0>. A plain circuit has every parameter on
/// exactly one site; a doubled circuit (copies() == 2) carries each parameter
/// on a copy-A site q and a copy-B site q + n/2 in the same layer.
class ParamCircuit {
 public:
  ParamCircuit(std::size_t n, std::vector<Layer> layers, std::vector<CliffordGate> tail,
               std::vector<AngleDistribution> distributions, int copies = 1);

  std::size_t num_qubits() const { return n_; }
  const std::vector<Layer>& layers() const { return layers_; }
  /// Fixed gates applied after the last rotation layer.
  const std::vector<CliffordGate>& tail() const { return tail_; }
  const std::vector<AngleDistribution>& distributions() const { return dists_; }
  int copies() const { return copies_; }
  std::size_t num_params() const { return param_sites_.size(); }
  std::size_t num_rotations() const;

  /// (layer, rotation) positions of the sites carrying `param`, copy A first.
  const std::vector<std::pair<std::size_t, std::size_t>>& sites_of(std::uint32_t param) const {
    return param_sites_.at(param);
  }
  const RotationSite& site(std::pair<std::size_t, std::size_t> pos) const {
    return layers_[pos.first].rotations[pos.second];
  }
  const AngleDistribution& distribution_of(std::uint32_t param) const;

  bool all_z() const;

 private:
  std::size_t n_;
  std::vector<Layer> layers_;
  std::vector<CliffordGate> tail_;
  std::vector<AngleDistribution> dists_;
  int copies_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> param_sites_;
};

struct PauliTerm {
  double coeff = 1.0;
  PauliString pauli;
};

struct PauliSum {
  std::vector<PauliTerm> terms;
};

/// |0><0| on the listed qubits, identity elsewhere.
struct ZeroProjector {
  std::vector<std::uint32_t> support;
};

class Observable {
 public:
  static Observable pauli_sum(std::size_t n, std::vector<PauliTerm> terms);
  static Observable zero_projector(std::size_t n, std::vector<std::uint32_t> support);
  static Observable all_zero(std::size_t n);

  std::size_t num_qubits() const { return n_; }
  const std::variant<PauliSum, ZeroProjector>& kind() const { return kind_; }
  /// Upper bound on the spectral norm: sum |c| for Pauli sums, 1 for projectors.
  double norm_bound() const { return norm_bound_; }

  /// O (x) O on 2n qubits, copy B on [n, 2n).
  Observable tensor_square() const;

 private:
  Observable(std::size_t n, std::variant<PauliSum, ZeroProjector> kind, double norm_bound)
      : n_(n), kind_(std::move(kind)), norm_bound_(norm_bound) {}

  std::size_t n_;
  std::variant<PauliSum, ZeroProjector> kind_;
  double norm_bound_;
};

/// E[C], E[d_k C], E[C^2] or E[(d_k C)^2] over the rotation angles.
enum class QuantityKind : std::uint8_t { Cost, Gradient, CostSquared, GradientSquared };

struct Quantity {
  QuantityKind kind = QuantityKind::Cost;
  /// Differentiated parameter for the gradient kinds.
  std::uint32_t param = 0;
};

/// Rewrites X and Y rotations as Z rotations conjugated by H and (SH) in the
/// neighbouring fixed layers; the last layer's conjugator lands in the tail.
ParamCircuit canonicalize_to_z(const ParamCircuit& circuit);

/// Moves the tail of a Pauli-sum problem into the observable (O -> T^dag O T).
/// Projector observables are returned untouched together with the circuit.
std::pair<ParamCircuit, Observable> absorb_tail_into_observable(const ParamCircuit& circuit,
                                                                const Observable& observable);

/// Replaces each rotation whose law declares a centre c by a zero-centred
/// rotation plus the Clifford R_Z(c) in {I, S, Z, Sdg}. Needs Z rotations.
ParamCircuit extract_symmetry_center(const ParamCircuit& circuit);

/// canonicalize_to_z followed by extract_symmetry_center.
ParamCircuit prepare_for_sampling(const ParamCircuit& circuit);

/// theta_k -> theta_k +/- pi/2 folded into layer k as S (plus) or Sdg (minus).
ParamCircuit apply_parameter_shift(const ParamCircuit& circuit, ParamShift shift);

/// Two copies on 2n qubits sharing every parameter, each copy optionally shifted.
ParamCircuit double_circuit(const ParamCircuit& circuit, std::optional<ParamShift> shift_a,
                            std::optional<ParamShift> shift_b);

/// The Clifford gate equal (up to phase) to R_Z(angle).
GateKind clifford_for_angle(CliffordAngle angle);

}  // namespace cliffvar
