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

#include "cliffvar/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "cliffvar/dense.hpp"

namespace cliffvar {

namespace {

constexpr double kClampTol = 1e-14;

// Product term: kinds[j] acts on local qubit j; I entries are dropped.
MixtureTerm product_term(double weight, std::initializer_list<GateKind> kinds) {
  MixtureTerm t;
  t.weight = weight;
  std::uint32_t q = 0;
  for (GateKind k : kinds) {
    if (!t.label.empty()) t.label += '*';
    t.label += gate_name(k);
    if (k != GateKind::I) t.gates.push_back(CliffordGate::single(k, q));
    ++q;
  }
  return t;
}

}  // namespace

CliffordMixture::CliffordMixture(int order, std::vector<MixtureTerm> terms) : order_(order) {
  if (order < 1) throw std::invalid_argument("mixture order must be positive");
  double total = 0.0;
  for (auto& t : terms) {
    for (const auto& g : t.gates) validate_gate(g, static_cast<std::size_t>(order));
    if (t.weight < 0.0 && t.weight >= -kClampTol) t.weight = 0.0;
    total += t.weight;
    if (std::abs(t.weight) > kClampTol) terms_.push_back(std::move(t));
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
  for (const auto& t : terms_) {
    gamma_ += std::abs(t.weight);
    if (t.weight < 0.0) convex_ = false;
  }
  double acc = 0.0;
  for (const auto& t : terms_) {
    probs_.push_back(std::abs(t.weight) / gamma_);
    acc += probs_.back();
    cumulative_.push_back(acc);
  }
  cumulative_.back() = 1.0;
}

std::size_t CliffordMixture::draw(std::mt19937_64& rng) const {
  const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                               terms_.size() - 1);
}

CliffordMixture one_fold(const AngleDistribution& dist) {
  const TrigMoment m = dist.moment(1);
  using enum GateKind;
  return CliffordMixture(1, {product_term((1 + m.r) / 2, {I}), product_term((1 - m.r) / 2, {Z}),
                             product_term(m.s / 2, {S}), product_term(-m.s / 2, {Sdg})});
}

CliffordMixture two_fold(const AngleDistribution& dist) {
  const TrigMoment m1 = dist.moment(1);
  const TrigMoment m2 = dist.moment(2);
  const double r1 = m1.r, s1 = m1.s, r2 = m2.r, s2 = m2.s;
  using enum GateKind;
  std::vector<MixtureTerm> terms = {
      product_term((1 + r2 + 2 * r1) / 4, {I, I}),
      product_term((1 + r2 - 2 * r1) / 4, {Z, Z}),
      product_term((1 - r2 + 2 * s1) / 4, {S, S}),
      product_term((1 - r2 - 2 * s1) / 4, {Sdg, Sdg}),
  };
  if (std::abs(s1) > kClampTol || std::abs(s2) > kClampTol) {
    const double q = s2 / 8;
    for (auto&& t : {product_term(q, {S, I}), product_term(q, {I, S}), product_term(q, {Z, Sdg}),
                     product_term(q, {Sdg, Z}), product_term(-q, {Sdg, I}),
                     product_term(-q, {I, Sdg}), product_term(-q, {Z, S}),
                     product_term(-q, {S, Z})}) {
      terms.push_back(t);
    }
  }
  return CliffordMixture(2, std::move(terms));
}

bool check_convexity_condition(const AngleDistribution& dist) {
  return (1 + dist.moment(2).r) / 2 >= std::abs(dist.moment(1).r);
}

NFoldCoefficients n_fold_coefficients(const AngleDistribution& dist, int order) {
  if (order < 1) throw std::invalid_argument("N-fold order must be >= 1");
  const auto table = lambda_expectations(dist, order);
  NFoldCoefficients out;
  out.order = order;
  out.sufficient_convex = true;
  const std::size_t count = std::size_t{1} << (2 * order);
  for (std::size_t code = 0; code < count; ++code) {
    std::vector<int> index(static_cast<std::size_t>(order));
    LambdaIndex counts{0, 0, 0, 0};
    for (int j = 0; j < order; ++j) {
      index[static_cast<std::size_t>(j)] = static_cast<int>((code >> (2 * j)) & 3U);
      ++counts[static_cast<std::size_t>(index[static_cast<std::size_t>(j)])];
    }
    const double v = table.at(counts);
    if (v < -kClampTol) out.sufficient_convex = false;
    out.indices.push_back(std::move(index));
    out.values.push_back(v);
  }
  return out;
}

std::vector<MixtureTerm> NFoldCoefficients::as_terms() const {
  static constexpr GateKind kGate[4] = {GateKind::I, GateKind::Z, GateKind::Sdg, GateKind::S};
  std::vector<MixtureTerm> terms;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    MixtureTerm t;
    t.weight = values[i];
    for (std::size_t j = 0; j < indices[i].size(); ++j) {
      const GateKind k = kGate[indices[i][j]];
      if (j) t.label += '*';
      t.label += gate_name(k);
      if (k != GateKind::I) t.gates.push_back(CliffordGate::single(k, static_cast<std::uint32_t>(j)));
    }
    terms.push_back(std::move(t));
  }
  return terms;
}

Eigen::MatrixXcd reconstruct_dense_channel(const std::vector<MixtureTerm>& terms, int order) {
  if (order < 1 || order > 3) throw std::invalid_argument("dense channels support order 1..3");
  const auto n = static_cast<std::size_t>(order);
  const Eigen::Index d = Eigen::Index{1} << order;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (const auto& t : terms) {
    const Eigen::MatrixXcd u = dense_unitary(t.gates, n);
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        out.block(a * d, b * d, d, d) += t.weight * std::conj(u(a, b)) * u;
      }
    }
  }
  return out;
}

Eigen::MatrixXcd reconstruct_dense_channel(const CliffordMixture& mixture) {
  return reconstruct_dense_channel(mixture.terms(), mixture.order());
}

Eigen::MatrixXcd reconstruct_dense_channel(const NFoldCoefficients& coefficients) {
  return reconstruct_dense_channel(coefficients.as_terms(), coefficients.order);
}

Eigen::MatrixXcd rotation_superoperator(double theta, int order) {
  const Eigen::Index d = Eigen::Index{1} << order;
  Eigen::VectorXcd diag(d);
  for (Eigen::Index b = 0; b < d; ++b) {
    const int ones = std::popcount(static_cast<unsigned>(b));
    const double phase = -theta / 2 * (order - 2 * ones);
    diag(b) = std::polar(1.0, phase);
  }
  Eigen::VectorXcd super(d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) super(a * d + b) = std::conj(diag(a)) * diag(b);
  }
  return super.asDiagonal();
}

}  // namespace cliffvar
