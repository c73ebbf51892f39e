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

#include "cliffvar/gates.hpp"

#include <algorithm>
#include <array>
#include <bit>

namespace cliffvar {

namespace {

constexpr std::array<std::string_view, 10> kGateNames = {
    "I", "X", "Y", "Z", "H", "S", "Sdg", "CZ", "CNOT", "CNOT_X"};

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

}  // namespace

char axis_char(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::X:
      return 'X';
    case PauliAxis::Y:
      return 'Y';
    case PauliAxis::Z:
      return 'Z';
  }
  return '?';
}

PauliAxis parse_axis(std::string_view text) {
  if (text == "X" || text == "x") return PauliAxis::X;
  if (text == "Y" || text == "y") return PauliAxis::Y;
  if (text == "Z" || text == "z") return PauliAxis::Z;
  throw std::invalid_argument("unknown rotation axis '" + std::string(text) + "'");
}

std::string_view gate_name(GateKind kind) {
  return kGateNames[static_cast<std::size_t>(kind)];
}

GateKind parse_gate_kind(std::string_view name) {
  for (std::size_t i = 0; i < kGateNames.size(); ++i) {
    if (kGateNames[i] == name) return static_cast<GateKind>(i);
  }
  if (name == "S_DAG" || name == "SDG" || name == "sdg") return GateKind::Sdg;
  if (name == "CX") return GateKind::CNOT;
  throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

bool is_two_qubit(GateKind kind) {
  return kind == GateKind::CZ || kind == GateKind::CNOT || kind == GateKind::CNOT_X;
}

GateKind inverse_kind(GateKind kind) {
  if (kind == GateKind::S) return GateKind::Sdg;
  if (kind == GateKind::Sdg) return GateKind::S;
  return kind;
}

CliffordGate CliffordGate::single(GateKind kind, std::uint32_t q) {
  return CliffordGate{kind, q, std::nullopt};
}

CliffordGate CliffordGate::pair(GateKind kind, std::uint32_t control, std::uint32_t target) {
  return CliffordGate{kind, target, control};
}

std::uint32_t CliffordGate::max_qubit() const {
  return control ? std::max(*control, target) : target;
}

CliffordGate CliffordGate::shifted(std::uint32_t offset) const {
  CliffordGate g = *this;
  g.target += offset;
  if (g.control) *g.control += offset;
  return g;
}

CliffordGate CliffordGate::inverse() const {
  CliffordGate g = *this;
  g.kind = inverse_kind(kind);
  return g;
}

void validate_gate(const CliffordGate& gate, std::size_t n) {
  const bool two = is_two_qubit(gate.kind);
  if (two != gate.control.has_value()) {
    throw std::invalid_argument("gate " + std::string(gate_name(gate.kind)) +
                                (two ? " needs a control qubit" : " takes no control qubit"));
  }
  if (gate.target >= n || (gate.control && *gate.control >= n)) {
    throw std::invalid_argument("gate " + to_string(gate) + " addresses a qubit >= " +
                                std::to_string(n));
  }
  if (gate.control && *gate.control == gate.target) {
    throw std::invalid_argument("gate " + to_string(gate) + " has equal control and target");
  }
}

std::string to_string(const CliffordGate& gate) {
  std::string out(gate_name(gate.kind));
  out += '(';
  if (gate.control) out += std::to_string(*gate.control) + ",";
  out += std::to_string(gate.target) + ")";
  return out;
}

PauliString::PauliString(std::size_t n)
    : n_(n), xs_(word_count(n), 0), zs_(word_count(n), 0) {}

PauliString PauliString::parse(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  PauliString p(text.size());
  p.negative_ = negative;
  for (std::size_t q = 0; q < text.size(); ++q) {
    switch (text[q]) {
      case 'I':
      case '_':
        break;
      case 'X':
        p.set(q, PauliOp::X);
        break;
      case 'Y':
        p.set(q, PauliOp::Y);
        break;
      case 'Z':
        p.set(q, PauliOp::Z);
        break;
      default:
        throw std::invalid_argument("bad Pauli character '" + std::string(1, text[q]) + "'");
    }
  }
  return p;
}

PauliOp PauliString::get(std::size_t q) const {
  const bool bx = x(q);
  const bool bz = z(q);
  if (bx && bz) return PauliOp::Y;
  if (bx) return PauliOp::X;
  if (bz) return PauliOp::Z;
  return PauliOp::I;
}

void PauliString::set(std::size_t q, PauliOp op) {
  const std::uint64_t mask = std::uint64_t{1} << (q % 64);
  const bool bx = op == PauliOp::X || op == PauliOp::Y;
  const bool bz = op == PauliOp::Z || op == PauliOp::Y;
  xs_[q / 64] = bx ? (xs_[q / 64] | mask) : (xs_[q / 64] & ~mask);
  zs_[q / 64] = bz ? (zs_[q / 64] | mask) : (zs_[q / 64] & ~mask);
}

std::vector<std::uint32_t> PauliString::support() const {
  std::vector<std::uint32_t> out;
  for (std::size_t q = 0; q < n_; ++q) {
    if (x(q) || z(q)) out.push_back(static_cast<std::uint32_t>(q));
  }
  return out;
}

bool PauliString::commutes_with(const PauliString& other) const {
  if (other.n_ != n_) throw std::invalid_argument("Pauli strings differ in length");
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < xs_.size(); ++w) {
    acc ^= (xs_[w] & other.zs_[w]) ^ (zs_[w] & other.xs_[w]);
  }
  return std::popcount(acc) % 2 == 0;
}

PauliString PauliString::tensor(const PauliString& other) const {
  PauliString out(n_ + other.n_);
  for (std::size_t q = 0; q < n_; ++q) out.set(q, get(q));
  for (std::size_t q = 0; q < other.n_; ++q) out.set(n_ + q, other.get(q));
  out.negative_ = negative_ != other.negative_;
  return out;
}

void PauliString::conjugate_by(const CliffordGate& gate) {
  const std::size_t t = gate.target;
  auto set_bits = [this](std::size_t q, bool bx, bool bz) {
    set(q, bx ? (bz ? PauliOp::Y : PauliOp::X) : (bz ? PauliOp::Z : PauliOp::I));
  };
  const bool xt = x(t);
  const bool zt = z(t);
  switch (gate.kind) {
    case GateKind::I:
      return;
    case GateKind::X:
      flip_sign_if(zt);
      return;
    case GateKind::Y:
      flip_sign_if(xt != zt);
      return;
    case GateKind::Z:
      flip_sign_if(xt);
      return;
    case GateKind::H:
      flip_sign_if(xt && zt);
      set_bits(t, zt, xt);
      return;
    case GateKind::S:
      flip_sign_if(xt && zt);
      set_bits(t, xt, zt != xt);
      return;
    case GateKind::Sdg:
      flip_sign_if(xt && !zt);
      set_bits(t, xt, zt != xt);
      return;
    case GateKind::CZ: {
      const std::size_t a = *gate.control;
      const bool xa = x(a);
      const bool za = z(a);
      flip_sign_if(xa && xt && (za != zt));
      set_bits(a, xa, za != xt);
      set_bits(t, xt, zt != xa);
      return;
    }
    case GateKind::CNOT: {
      const std::size_t c = *gate.control;
      const bool xc = x(c);
      const bool zc = z(c);
      flip_sign_if(xc && zt && !(xt != zc));
      set_bits(t, xt != xc, zt);
      set_bits(c, xc, zc != zt);
      return;
    }
    case GateKind::CNOT_X: {
      const std::uint32_t c = *gate.control;
      conjugate_by(CliffordGate::single(GateKind::X, c));
      conjugate_by(CliffordGate::pair(GateKind::CNOT, c, gate.target));
      conjugate_by(CliffordGate::single(GateKind::X, c));
      return;
    }
  }
}

std::string PauliString::str() const {
  std::string out(1, negative_ ? '-' : '+');
  for (std::size_t q = 0; q < n_; ++q) out += "IXYZ"[static_cast<int>(get(q))];
  return out;
}

}  // namespace cliffvar
