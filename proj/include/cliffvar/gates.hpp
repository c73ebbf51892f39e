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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cliffvar {

enum class PauliAxis : std::uint8_t { X, Y, Z };

char axis_char(PauliAxis axis);
PauliAxis parse_axis(std::string_view text);

/// Gate alphabet of the fixed layers and of every Clifford replacement.
/// CNOT_X is (X (x) X) CNOT (X (x) X), i.e. a NOT on the target controlled on |0>.
enum class GateKind : std::uint8_t { I, X, Y, Z, H, S, Sdg, CZ, CNOT, CNOT_X };

std::string_view gate_name(GateKind kind);
GateKind parse_gate_kind(std::string_view name);
bool is_two_qubit(GateKind kind);
GateKind inverse_kind(GateKind kind);

struct CliffordGate {
  GateKind kind = GateKind::I;
  std::uint32_t target = 0;
  std::optional<std::uint32_t> control;

  static CliffordGate single(GateKind kind, std::uint32_t q);
  static CliffordGate pair(GateKind kind, std::uint32_t control, std::uint32_t target);

  /// Largest qubit index touched.
  std::uint32_t max_qubit() const;
  /// Same gate with every qubit index moved by `offset`.
  CliffordGate shifted(std::uint32_t offset) const;
  CliffordGate inverse() const;

  friend bool operator==(const CliffordGate&, const CliffordGate&) = default;
};

/// Throws std::invalid_argument unless the control is present exactly for
/// two-qubit kinds, indices are distinct, and every index is below n.
void validate_gate(const CliffordGate& gate, std::size_t n);

std::string to_string(const CliffordGate& gate);

enum class PauliOp : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Hermitian Pauli string with a +/-1 sign, bit-packed as (x, z) words.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n);

  /// Accepts an optional leading '+' or '-' followed by one of IXYZ per qubit;
  /// character i is qubit i. '_' is accepted as identity.
  static PauliString parse(std::string_view text);

  std::size_t size() const { return n_; }
  bool negative() const { return negative_; }
  void set_negative(bool negative) { negative_ = negative; }

  PauliOp get(std::size_t q) const;
  void set(std::size_t q, PauliOp op);
  bool x(std::size_t q) const { return (xs_[q / 64] >> (q % 64)) & 1U; }
  bool z(std::size_t q) const { return (zs_[q / 64] >> (q % 64)) & 1U; }

  const std::vector<std::uint64_t>& xs() const { return xs_; }
  const std::vector<std::uint64_t>& zs() const { return zs_; }

  std::vector<std::uint32_t> support() const;
  bool commutes_with(const PauliString& other) const;

  /// Concatenation: this on qubits [0, n), other on [n, n + m).
  PauliString tensor(const PauliString& other) const;

  /// In-place conjugation P -> g P g^dagger (Schrodinger picture).
  void conjugate_by(const CliffordGate& gate);

  std::string str() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  void flip_sign_if(bool b) { negative_ ^= b; }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> xs_;
  std::vector<std::uint64_t> zs_;
  bool negative_ = false;
};

}  // namespace cliffvar
