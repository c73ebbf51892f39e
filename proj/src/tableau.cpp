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

#include "cliffvar/tableau.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace cliffvar {

namespace {

std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

// A Pauli row with its phase held as a power of i. Rows from the tableau are
// Hermitian, so the exponent is 0 or 2 except mid-product.
struct PhasedRow {
  std::vector<std::uint64_t> x;
  std::vector<std::uint64_t> z;
  unsigned exponent = 0;

  explicit PhasedRow(std::size_t words) : x(words, 0), z(words, 0) {}

  // this <- this * other. The (x, z) encoding is i^{xz} X^x Z^z, so each qubit
  // contributes +1, 0 or -1 to the exponent depending on the pair of Paulis.
  void multiply_by(const PhasedRow& other) {
    int delta = 0;
    for (std::size_t w = 0; w < x.size(); ++w) {
      const std::uint64_t x1 = x[w], z1 = z[w], x2 = other.x[w], z2 = other.z[w];
      const std::uint64_t pX1 = x1 & ~z1, pY1 = x1 & z1, pZ1 = ~x1 & z1;
      const std::uint64_t pX2 = x2 & ~z2, pY2 = x2 & z2, pZ2 = ~x2 & z2;
      const std::uint64_t plus = (pY1 & pZ2) | (pX1 & pY2) | (pZ1 & pX2);
      const std::uint64_t minus = (pY1 & pX2) | (pX1 & pZ2) | (pZ1 & pY2);
      delta += std::popcount(plus) - std::popcount(minus);
      x[w] = x1 ^ x2;
      z[w] = z1 ^ z2;
    }
    exponent = static_cast<unsigned>((static_cast<int>(exponent + other.exponent) + delta) & 3);
  }

  bool get_x(std::size_t q) const { return (x[q / 64] >> (q % 64)) & 1U; }
  bool get_z(std::size_t q) const { return (z[q / 64] >> (q % 64)) & 1U; }
};

}  // namespace

StabilizerTableau::StabilizerTableau(std::size_t n)
    : n_(n),
      words_(word_count(2 * n)),
      xs_(n * words_, 0),
      zs_(n * words_, 0),
      signs_(words_, 0) {
  if (n == 0) throw std::invalid_argument("tableau needs at least one qubit");
  reset();
}

void StabilizerTableau::reset() {
  std::fill(xs_.begin(), xs_.end(), 0);
  std::fill(zs_.begin(), zs_.end(), 0);
  std::fill(signs_.begin(), signs_.end(), 0);
  for (std::size_t q = 0; q < n_; ++q) {
    xcol(q)[q / 64] |= std::uint64_t{1} << (q % 64);
    const std::size_t r = n_ + q;
    zcol(q)[r / 64] |= std::uint64_t{1} << (r % 64);
  }
}

void StabilizerTableau::h(std::size_t q) {
  std::uint64_t* x = xcol(q);
  std::uint64_t* z = zcol(q);
  for (std::size_t w = 0; w < words_; ++w) {
    signs_[w] ^= x[w] & z[w];
    std::swap(x[w], z[w]);
  }
}

void StabilizerTableau::s(std::size_t q) {
  std::uint64_t* x = xcol(q);
  std::uint64_t* z = zcol(q);
  for (std::size_t w = 0; w < words_; ++w) {
    signs_[w] ^= x[w] & z[w];
    z[w] ^= x[w];
  }
}

void StabilizerTableau::s_dag(std::size_t q) {
  std::uint64_t* x = xcol(q);
  std::uint64_t* z = zcol(q);
  for (std::size_t w = 0; w < words_; ++w) {
    signs_[w] ^= x[w] & ~z[w];
    z[w] ^= x[w];
  }
}

void StabilizerTableau::x(std::size_t q) {
  const std::uint64_t* z = zcol(q);
  for (std::size_t w = 0; w < words_; ++w) signs_[w] ^= z[w];
}

void StabilizerTableau::y(std::size_t q) {
  const std::uint64_t* x = xcol(q);
  const std::uint64_t* z = zcol(q);
  for (std::size_t w = 0; w < words_; ++w) signs_[w] ^= x[w] ^ z[w];
}

void StabilizerTableau::z(std::size_t q) {
  const std::uint64_t* x = xcol(q);
  for (std::size_t w = 0; w < words_; ++w) signs_[w] ^= x[w];
}

void StabilizerTableau::cnot(std::size_t control, std::size_t target) {
  std::uint64_t* xc = xcol(control);
  std::uint64_t* zc = zcol(control);
  std::uint64_t* xt = xcol(target);
  std::uint64_t* zt = zcol(target);
  for (std::size_t w = 0; w < words_; ++w) {
    signs_[w] ^= xc[w] & zt[w] & ~(xt[w] ^ zc[w]);
    xt[w] ^= xc[w];
    zc[w] ^= zt[w];
  }
}

void StabilizerTableau::cz(std::size_t a, std::size_t b) {
  std::uint64_t* xa = xcol(a);
  std::uint64_t* za = zcol(a);
  std::uint64_t* xb = xcol(b);
  std::uint64_t* zb = zcol(b);
  for (std::size_t w = 0; w < words_; ++w) {
    signs_[w] ^= xa[w] & xb[w] & (za[w] ^ zb[w]);
    za[w] ^= xb[w];
    zb[w] ^= xa[w];
  }
}

void StabilizerTableau::apply(const CliffordGate& gate) {
  const std::size_t t = gate.target;
  switch (gate.kind) {
    case GateKind::I: break;
    case GateKind::X: x(t); break;
    case GateKind::Y: y(t); break;
    case GateKind::Z: z(t); break;
    case GateKind::H: h(t); break;
    case GateKind::S: s(t); break;
    case GateKind::Sdg: s_dag(t); break;
    case GateKind::CZ: cz(*gate.control, t); break;
    case GateKind::CNOT: cnot(*gate.control, t); break;
    case GateKind::CNOT_X:
      x(*gate.control);
      cnot(*gate.control, t);
      x(*gate.control);
      break;
  }
}

void StabilizerTableau::apply_all(std::span<const CliffordGate> gates) {
  for (const auto& g : gates) apply(g);
}

PauliString StabilizerTableau::row(std::size_t i) const {
  if (i >= 2 * n_) throw std::out_of_range("tableau row index");
  PauliString p(n_);
  for (std::size_t q = 0; q < n_; ++q) {
    const bool bx = bit(xcol(q), i), bz = bit(zcol(q), i);
    p.set(q, bx ? (bz ? PauliOp::Y : PauliOp::X) : (bz ? PauliOp::Z : PauliOp::I));
  }
  p.set_negative(bit(signs_.data(), i));
  return p;
}

int StabilizerTableau::pauli_expectation(const PauliString& p) const {
  if (p.size() != n_) throw std::invalid_argument("Pauli string width does not match tableau");
  // Symplectic product of p with every row at once.
  std::vector<std::uint64_t> anti(words_, 0);
  for (std::size_t q = 0; q < n_; ++q) {
    if (p.x(q)) {
      const std::uint64_t* z = zcol(q);
      for (std::size_t w = 0; w < words_; ++w) anti[w] ^= z[w];
    }
    if (p.z(q)) {
      const std::uint64_t* x = xcol(q);
      for (std::size_t w = 0; w < words_; ++w) anti[w] ^= x[w];
    }
  }
  for (std::size_t r = n_; r < 2 * n_; ++r) {
    if ((anti[r / 64] >> (r % 64)) & 1U) return 0;
  }
  // p is, up to sign, the product of the stabilizers paired with the
  // destabilizers it anticommutes with.
  const std::size_t pw = word_count(n_);
  PhasedRow acc(pw);
  for (std::size_t d = 0; d < n_; ++d) {
    if (!((anti[d / 64] >> (d % 64)) & 1U)) continue;
    const std::size_t r = n_ + d;
    PhasedRow stab(pw);
    for (std::size_t q = 0; q < n_; ++q) {
      if (bit(xcol(q), r)) stab.x[q / 64] |= std::uint64_t{1} << (q % 64);
      if (bit(zcol(q), r)) stab.z[q / 64] |= std::uint64_t{1} << (q % 64);
    }
    stab.exponent = bit(signs_.data(), r) ? 2 : 0;
    acc.multiply_by(stab);
  }
  const bool acc_negative = acc.exponent == 2;
  return acc_negative == p.negative() ? 1 : -1;
}

double StabilizerTableau::zero_projector_probability(
    std::span<const std::uint32_t> support) const {
  std::vector<char> in_support(n_, 0);
  std::size_t k = 0;
  for (auto q : support) {
    if (q >= n_) throw std::invalid_argument("projector support outside register");
    if (!in_support[q]) ++k;
    in_support[q] = 1;
  }
  if (k == 0) return 1.0;

  const std::size_t pw = word_count(n_);
  std::vector<PhasedRow> rows(n_, PhasedRow(pw));
  for (std::size_t q = 0; q < n_; ++q) {
    const std::uint64_t* xc = xcol(q);
    const std::uint64_t* zc = zcol(q);
    const std::uint64_t mask = std::uint64_t{1} << (q % 64);
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t r = n_ + i;
      if (bit(xc, r)) rows[i].x[q / 64] |= mask;
      if (bit(zc, r)) rows[i].z[q / 64] |= mask;
    }
  }
  for (std::size_t i = 0; i < n_; ++i) rows[i].exponent = bit(signs_.data(), n_ + i) ? 2 : 0;

  // Forward elimination over every X column and the Z columns off the
  // support; what is left spans the stabilizer elements that are Z-strings
  // supported on `support`.
  std::size_t rank = 0;
  auto eliminate = [&](bool use_x, std::size_t q) {
    auto has = [&](const PhasedRow& row) { return use_x ? row.get_x(q) : row.get_z(q); };
    std::size_t pivot = rank;
    while (pivot < n_ && !has(rows[pivot])) ++pivot;
    if (pivot == n_) return;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t j = rank + 1; j < n_; ++j) {
      if (has(rows[j])) rows[j].multiply_by(rows[rank]);
    }
    ++rank;
  };
  for (std::size_t q = 0; q < n_ && rank < n_; ++q) eliminate(true, q);
  for (std::size_t q = 0; q < n_ && rank < n_; ++q) {
    if (!in_support[q]) eliminate(false, q);
  }
  for (std::size_t j = rank; j < n_; ++j) {
    if (rows[j].exponent == 2) return 0.0;
  }
  const std::size_t dim_h = n_ - rank;
  return std::ldexp(1.0, -static_cast<int>(k - dim_h));
}

bool StabilizerTableau::check_invariants() const {
  std::vector<PauliString> rows;
  rows.reserve(2 * n_);
  for (std::size_t i = 0; i < 2 * n_; ++i) rows.push_back(row(i));
  for (std::size_t i = 0; i < 2 * n_; ++i) {
    for (std::size_t j = i + 1; j < 2 * n_; ++j) {
      const bool should_anticommute = (j == i + n_);
      if (rows[i].commutes_with(rows[j]) == should_anticommute) return false;
    }
  }
  return true;
}

StabilizerTableau run_circuit(std::span<const CliffordGate> gates, std::size_t n) {
  StabilizerTableau t(n);
  for (const auto& g : gates) {
    validate_gate(g, n);
    t.apply(g);
  }
  return t;
}

}  // namespace cliffvar
