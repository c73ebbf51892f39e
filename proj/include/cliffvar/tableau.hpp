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
#include <span>
#include <vector>

#include "cliffvar/gates.hpp"

namespace cliffvar {

/// Aaronson-Gottesman destabilizer/stabilizer tableau of an n-qubit stabilizer
/// state. Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers. Storage is
/// column-major: for each qubit, one bit per row for the X part and one for the
/// Z part, packed into 64-bit words, so a gate is a sweep over ceil(2n/64) words.
class StabilizerTableau {
 public:
  explicit StabilizerTableau(std::size_t n);

  /// Back to |0...0>: destabilizers X_i, stabilizers Z_i.
  void reset();

  std::size_t num_qubits() const { return n_; }

  void apply(const CliffordGate& gate);
  void apply_all(std::span<const CliffordGate> gates);

  void h(std::size_t q);
  void s(std::size_t q);
  void s_dag(std::size_t q);
  void x(std::size_t q);
  void y(std::size_t q);
  void z(std::size_t q);
  void cnot(std::size_t control, std::size_t target);
  void cz(std::size_t a, std::size_t b);

  /// <psi|P|psi> in {-1, 0, +1}.
  int pauli_expectation(const PauliString& p) const;

  /// Probability that measuring `support` in the computational basis gives all
  /// zeros: 0 or 2^-g. Non-destructive.
  double zero_projector_probability(std::span<const std::uint32_t> support) const;

  /// Row i as a signed Pauli string.
  PauliString row(std::size_t i) const;

  /// Destabilizer i anticommutes with stabilizer i and every other pair of rows commutes.
  bool check_invariants() const;

 private:
  std::uint64_t* xcol(std::size_t q) { return &xs_[q * words_]; }
  std::uint64_t* zcol(std::size_t q) { return &zs_[q * words_]; }
  const std::uint64_t* xcol(std::size_t q) const { return &xs_[q * words_]; }
  const std::uint64_t* zcol(std::size_t q) const { return &zs_[q * words_]; }
  bool bit(const std::uint64_t* col, std::size_t row) const {
    return (col[row / 64] >> (row % 64)) & 1U;
  }

  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> xs_;
  std::vector<std::uint64_t> zs_;
  std::vector<std::uint64_t> signs_;
};

/// Tableau after applying `gates` to |0...0>.
StabilizerTableau run_circuit(std::span<const CliffordGate> gates, std::size_t n);

}  // namespace cliffvar
