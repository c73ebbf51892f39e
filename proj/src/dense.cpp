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

#include "cliffvar/dense.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cliffvar {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

void run_parametrized(DenseState& state, const ParamCircuit& circuit,
                      std::span<const double> theta) {
  for (const auto& layer : circuit.layers()) {
    for (const auto& g : layer.fixed) state.apply(g);
    for (const auto& r : layer.rotations) state.rotate(r.qubit, r.axis, theta[r.param]);
  }
  for (const auto& g : circuit.tail()) state.apply(g);
}

}  // namespace

DenseState::DenseState(std::size_t n, std::size_t cap) : n_(n) {
  if (n > cap) {
    throw std::invalid_argument("dense simulation capped at " + std::to_string(cap) + " qubits");
  }
  amps_.assign(std::size_t{1} << n, cplx{0.0, 0.0});
  amps_[0] = 1.0;
}

void DenseState::apply_1q(std::uint32_t q, const cplx (&m)[2][2]) {
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (i & bit) continue;
    const cplx a0 = amps_[i], a1 = amps_[i | bit];
    amps_[i] = m[0][0] * a0 + m[0][1] * a1;
    amps_[i | bit] = m[1][0] * a0 + m[1][1] * a1;
  }
}

void DenseState::apply(const CliffordGate& gate) {
  validate_gate(gate, n_);
  const std::uint32_t t = gate.target;
  const double h = std::numbers::sqrt2 / 2;
  switch (gate.kind) {
    case GateKind::I: return;
    case GateKind::X: apply_1q(t, {{0, 1}, {1, 0}}); return;
    case GateKind::Y: apply_1q(t, {{0, -kI}, {kI, 0}}); return;
    case GateKind::Z: apply_1q(t, {{1, 0}, {0, -1}}); return;
    case GateKind::H: apply_1q(t, {{h, h}, {h, -h}}); return;
    case GateKind::S: apply_1q(t, {{1, 0}, {0, kI}}); return;
    case GateKind::Sdg: apply_1q(t, {{1, 0}, {0, -kI}}); return;
    default: break;
  }
  const std::size_t cb = std::size_t{1} << *gate.control;
  const std::size_t tb = std::size_t{1} << t;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    switch (gate.kind) {
      case GateKind::CZ:
        if ((i & cb) && (i & tb)) amps_[i] = -amps_[i];
        break;
      case GateKind::CNOT:
        if ((i & cb) && !(i & tb)) std::swap(amps_[i], amps_[i | tb]);
        break;
      case GateKind::CNOT_X:
        if (!(i & cb) && !(i & tb)) std::swap(amps_[i], amps_[i | tb]);
        break;
      default: break;
    }
  }
}

void DenseState::rotate(std::uint32_t q, PauliAxis axis, double theta) {
  if (q >= n_) throw std::invalid_argument("rotation qubit out of range");
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  switch (axis) {
    case PauliAxis::X: apply_1q(q, {{c, -kI * s}, {-kI * s, c}}); break;
    case PauliAxis::Y: apply_1q(q, {{c, -s}, {s, c}}); break;
    case PauliAxis::Z:
      apply_1q(q, {{std::polar(1.0, -theta / 2), 0}, {0, std::polar(1.0, theta / 2)}});
      break;
  }
}

double DenseState::expectation(const PauliString& p) const {
  if (p.size() != n_) throw std::invalid_argument("Pauli string width does not match state");
  std::size_t mx = 0, mz = 0;
  int ys = 0;
  for (std::size_t q = 0; q < n_; ++q) {
    if (p.x(q)) mx |= std::size_t{1} << q;
    if (p.z(q)) mz |= std::size_t{1} << q;
    if (p.x(q) && p.z(q)) ++ys;
  }
  // Y = i X Z on each qubit.
  cplx global = std::pow(kI, ys);
  if (p.negative()) global = -global;
  cplx acc = 0.0;
  for (std::size_t b = 0; b < amps_.size(); ++b) {
    const double z_sign = (std::popcount(b & mz) & 1) ? -1.0 : 1.0;
    acc += std::conj(amps_[b ^ mx]) * z_sign * amps_[b];
  }
  return (global * acc).real();
}

double DenseState::expectation(const Observable& observable) const {
  if (observable.num_qubits() != n_) throw std::invalid_argument("observable width mismatch");
  if (const auto* sum = std::get_if<PauliSum>(&observable.kind())) {
    double total = 0.0;
    for (const auto& t : sum->terms) total += t.coeff * expectation(t.pauli);
    return total;
  }
  const auto& proj = std::get<ZeroProjector>(observable.kind());
  std::size_t mask = 0;
  for (auto q : proj.support) mask |= std::size_t{1} << q;
  double total = 0.0;
  for (std::size_t b = 0; b < amps_.size(); ++b) {
    if ((b & mask) == 0) total += std::norm(amps_[b]);
  }
  return total;
}

double DenseState::norm() const {
  double total = 0.0;
  for (const auto& a : amps_) total += std::norm(a);
  return std::sqrt(total);
}

double evaluate_cost(const ParamCircuit& circuit, const Observable& observable,
                     std::span<const double> theta, std::size_t cap) {
  if (theta.size() != circuit.num_params()) {
    throw std::invalid_argument("theta has " + std::to_string(theta.size()) +
                                " entries, circuit has " +
                                std::to_string(circuit.num_params()) + " parameters");
  }
  DenseState state(circuit.num_qubits(), cap);
  run_parametrized(state, circuit, theta);
  return state.expectation(observable);
}

double evaluate_gates(std::span<const CliffordGate> gates, const Observable& observable,
                      std::size_t cap) {
  DenseState state(observable.num_qubits(), cap);
  for (const auto& g : gates) state.apply(g);
  return state.expectation(observable);
}

Eigen::MatrixXcd dense_unitary(std::span<const CliffordGate> gates, std::size_t n) {
  const std::size_t d = std::size_t{1} << n;
  Eigen::MatrixXcd u(d, d);
  for (std::size_t col = 0; col < d; ++col) {
    DenseState state(n);
    // Prepare basis state |col> by flipping bits.
    for (std::size_t q = 0; q < n; ++q) {
      if ((col >> q) & 1U) state.apply(CliffordGate::single(GateKind::X, static_cast<std::uint32_t>(q)));
    }
    for (const auto& g : gates) state.apply(g);
    for (std::size_t row = 0; row < d; ++row) {
      u(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = state.amplitudes()[row];
    }
  }
  return u;
}

double evaluate_quantity(const ParamCircuit& circuit, const Observable& observable,
                         const Quantity& quantity, std::span<const double> theta) {
  const bool gradient =
      quantity.kind == QuantityKind::Gradient || quantity.kind == QuantityKind::GradientSquared;
  double value = 0.0;
  if (gradient) {
    if (quantity.param >= circuit.num_params()) {
      throw std::invalid_argument("gradient parameter out of range");
    }
    std::vector<double> shifted(theta.begin(), theta.end());
    shifted[quantity.param] += std::numbers::pi / 2;
    const double plus = evaluate_cost(circuit, observable, shifted);
    shifted[quantity.param] -= std::numbers::pi;
    const double minus = evaluate_cost(circuit, observable, shifted);
    value = (plus - minus) / 2;
  } else {
    value = evaluate_cost(circuit, observable, theta);
  }
  const bool squared =
      quantity.kind == QuantityKind::CostSquared || quantity.kind == QuantityKind::GradientSquared;
  return squared ? value * value : value;
}

DenseAverage mc_average(const ParamCircuit& circuit, const Observable& observable,
                        const Quantity& quantity, std::size_t draws, std::mt19937_64& rng) {
  if (draws == 0) throw std::invalid_argument("need at least one draw");
  std::vector<double> theta(circuit.num_params());
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    for (std::uint32_t k = 0; k < theta.size(); ++k) theta[k] = circuit.distribution_of(k).sample(rng);
    const double v = evaluate_quantity(circuit, observable, quantity, theta);
    sum += v;
    sum_sq += v * v;
  }
  DenseAverage out;
  out.draws = draws;
  out.mean = sum / static_cast<double>(draws);
  if (draws > 1) {
    const double var = std::max(0.0, (sum_sq - sum * out.mean) / static_cast<double>(draws - 1));
    out.standard_error = std::sqrt(var / static_cast<double>(draws));
  }
  return out;
}

double quadrature_average(const ParamCircuit& circuit, const Observable& observable,
                          const Quantity& quantity, std::size_t max_points) {
  struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
  };
  std::vector<Rule> rules;
  std::size_t points = 1;
  for (std::uint32_t k = 0; k < circuit.num_params(); ++k) {
    const AngleDistribution& dist = circuit.distribution_of(k);
    Rule rule;
    if (const auto* dirac = std::get_if<DiracLaw>(&dist.law())) {
      for (const auto& a : dirac->atoms) {
        rule.nodes.push_back(a.angle);
        rule.weights.push_back(a.weight);
      }
    } else {
      const TrigMoment m1 = dist.moment(1), m2 = dist.moment(2);
      constexpr int kNodes = 5;
      for (int j = 0; j < kNodes; ++j) {
        const double phi = 2 * std::numbers::pi * j / kNodes;
        rule.nodes.push_back(phi);
        rule.weights.push_back((1 + 2 * (m1.r * std::cos(phi) + m1.s * std::sin(phi) +
                                         m2.r * std::cos(2 * phi) + m2.s * std::sin(2 * phi))) /
                               kNodes);
      }
    }
    points *= rule.nodes.size();
    if (points > max_points) throw std::invalid_argument("quadrature grid too large");
    rules.push_back(std::move(rule));
  }
  std::vector<std::size_t> idx(rules.size(), 0);
  std::vector<double> theta(rules.size());
  double total = 0.0;
  for (std::size_t p = 0; p < points; ++p) {
    double w = 1.0;
    for (std::size_t k = 0; k < rules.size(); ++k) {
      theta[k] = rules[k].nodes[idx[k]];
      w *= rules[k].weights[idx[k]];
    }
    if (w != 0.0) total += w * evaluate_quantity(circuit, observable, quantity, theta);
    for (std::size_t k = 0; k < rules.size(); ++k) {
      if (++idx[k] < rules[k].nodes.size()) break;
      idx[k] = 0;
    }
  }
  return total;
}

}  // namespace cliffvar
