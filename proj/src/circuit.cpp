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

#include "cliffvar/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace cliffvar {

ParamCircuit::ParamCircuit(std::size_t n, std::vector<Layer> layers, std::vector<CliffordGate> tail,
                           std::vector<AngleDistribution> distributions, int copies)
    : n_(n),
      layers_(std::move(layers)),
      tail_(std::move(tail)),
      dists_(std::move(distributions)),
      copies_(copies) {
  if (copies_ != 1 && copies_ != 2) throw std::invalid_argument("copies must be 1 or 2");
  if (copies_ == 2 && n_ % 2 != 0) throw std::invalid_argument("doubled circuit needs even n");
  for (const auto& g : tail_) validate_gate(g, n_);

  std::size_t max_param = 0;
  bool any = false;
  for (const auto& layer : layers_) {
    for (const auto& g : layer.fixed) validate_gate(g, n_);
    std::set<std::uint32_t> used;
    for (const auto& r : layer.rotations) {
      if (r.qubit >= n_) throw std::invalid_argument("rotation qubit out of range");
      if (r.dist >= dists_.size()) throw std::invalid_argument("rotation references unknown distribution");
      if (!used.insert(r.qubit).second) {
        throw std::invalid_argument("two rotations on qubit " + std::to_string(r.qubit) +
                                    " in one layer");
      }
      max_param = std::max<std::size_t>(max_param, r.param);
      any = true;
    }
  }
  param_sites_.assign(any ? max_param + 1 : 0, {});
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    for (std::size_t ri = 0; ri < layers_[li].rotations.size(); ++ri) {
      param_sites_[layers_[li].rotations[ri].param].emplace_back(li, ri);
    }
  }
  const std::size_t half = n_ / 2;
  for (std::size_t k = 0; k < param_sites_.size(); ++k) {
    auto& sites = param_sites_[k];
    if (sites.size() != static_cast<std::size_t>(copies_)) {
      throw std::invalid_argument("parameter " + std::to_string(k) + " appears on " +
                                  std::to_string(sites.size()) + " sites, expected " +
                                  std::to_string(copies_) + " (indices must be 0..M-1 without gaps)");
    }
    if (copies_ == 2) {
      std::sort(sites.begin(), sites.end(), [this](auto a, auto b) {
        return site(a).qubit < site(b).qubit;
      });
      const auto& a = site(sites[0]);
      const auto& b = site(sites[1]);
      if (sites[0].first != sites[1].first || a.qubit >= half || b.qubit != a.qubit + half ||
          a.dist != b.dist || a.axis != b.axis) {
        throw std::invalid_argument("parameter " + std::to_string(k) +
                                    " is not a matched copy-A/copy-B rotation pair");
      }
    }
  }
}

std::size_t ParamCircuit::num_rotations() const {
  std::size_t total = 0;
  for (const auto& layer : layers_) total += layer.rotations.size();
  return total;
}

const AngleDistribution& ParamCircuit::distribution_of(std::uint32_t param) const {
  return dists_[site(sites_of(param).front()).dist];
}

bool ParamCircuit::all_z() const {
  return std::all_of(layers_.begin(), layers_.end(), [](const Layer& layer) {
    return std::all_of(layer.rotations.begin(), layer.rotations.end(),
                       [](const RotationSite& r) { return r.axis == PauliAxis::Z; });
  });
}

Observable Observable::pauli_sum(std::size_t n, std::vector<PauliTerm> terms) {
  double bound = 0.0;
  for (const auto& t : terms) {
    if (t.pauli.size() != n) {
      throw std::invalid_argument("Pauli string " + t.pauli.str() + " has length " +
                                  std::to_string(t.pauli.size()) + ", expected " + std::to_string(n));
    }
    bound += std::abs(t.coeff);
  }
  return Observable(n, PauliSum{std::move(terms)}, bound);
}

Observable Observable::zero_projector(std::size_t n, std::vector<std::uint32_t> support) {
  if (support.empty()) throw std::invalid_argument("projector support must be nonempty");
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  if (support.back() >= n) throw std::invalid_argument("projector support outside the register");
  return Observable(n, ZeroProjector{std::move(support)}, 1.0);
}

Observable Observable::all_zero(std::size_t n) {
  std::vector<std::uint32_t> support(n);
  std::iota(support.begin(), support.end(), 0U);
  return zero_projector(n, std::move(support));
}

Observable Observable::tensor_square() const {
  const auto n = static_cast<std::uint32_t>(n_);
  if (const auto* proj = std::get_if<ZeroProjector>(&kind_)) {
    std::vector<std::uint32_t> support = proj->support;
    for (auto q : proj->support) support.push_back(q + n);
    return zero_projector(2 * n_, std::move(support));
  }
  const auto& sum = std::get<PauliSum>(kind_);
  std::vector<PauliTerm> terms;
  terms.reserve(sum.terms.size() * sum.terms.size());
  for (const auto& a : sum.terms) {
    for (const auto& b : sum.terms) terms.push_back({a.coeff * b.coeff, a.pauli.tensor(b.pauli)});
  }
  return pauli_sum(2 * n_, std::move(terms));
}

ParamCircuit canonicalize_to_z(const ParamCircuit& circuit) {
  std::vector<Layer> layers = circuit.layers();
  std::vector<CliffordGate> tail = circuit.tail();
  for (std::size_t li = 0; li < layers.size(); ++li) {
    std::vector<CliffordGate> after;
    for (auto& r : layers[li].rotations) {
      const std::uint32_t q = r.qubit;
      if (r.axis == PauliAxis::X) {
        layers[li].fixed.push_back(CliffordGate::single(GateKind::H, q));
        after.push_back(CliffordGate::single(GateKind::H, q));
      } else if (r.axis == PauliAxis::Y) {
        layers[li].fixed.push_back(CliffordGate::single(GateKind::Sdg, q));
        layers[li].fixed.push_back(CliffordGate::single(GateKind::H, q));
        after.push_back(CliffordGate::single(GateKind::H, q));
        after.push_back(CliffordGate::single(GateKind::S, q));
      }
      r.axis = PauliAxis::Z;
    }
    if (after.empty()) continue;
    auto& next = li + 1 < layers.size() ? layers[li + 1].fixed : tail;
    next.insert(next.begin(), after.begin(), after.end());
  }
  return ParamCircuit(circuit.num_qubits(), std::move(layers), std::move(tail),
                      circuit.distributions(), circuit.copies());
}

std::pair<ParamCircuit, Observable> absorb_tail_into_observable(const ParamCircuit& circuit,
                                                                const Observable& observable) {
  const auto* sum = std::get_if<PauliSum>(&observable.kind());
  if (sum == nullptr || circuit.tail().empty()) return {circuit, observable};
  std::vector<PauliTerm> terms = sum->terms;
  for (auto& term : terms) {
    for (auto it = circuit.tail().rbegin(); it != circuit.tail().rend(); ++it) {
      term.pauli.conjugate_by(it->inverse());
    }
  }
  ParamCircuit stripped(circuit.num_qubits(), circuit.layers(), {}, circuit.distributions(),
                        circuit.copies());
  return {std::move(stripped), Observable::pauli_sum(observable.num_qubits(), std::move(terms))};
}

GateKind clifford_for_angle(CliffordAngle angle) {
  switch (angle) {
    case CliffordAngle::Zero:
      return GateKind::I;
    case CliffordAngle::HalfPi:
      return GateKind::S;
    case CliffordAngle::Pi:
      return GateKind::Z;
    case CliffordAngle::ThreeHalfPi:
      return GateKind::Sdg;
  }
  return GateKind::I;
}

ParamCircuit extract_symmetry_center(const ParamCircuit& circuit) {
  std::vector<AngleDistribution> dists = circuit.distributions();
  std::vector<std::optional<CliffordAngle>> centers(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) {
    centers[i] = dists[i].center();
    if (centers[i]) dists[i] = dists[i].recenter(*centers[i]);
  }
  std::vector<Layer> layers = circuit.layers();
  for (auto& layer : layers) {
    for (const auto& r : layer.rotations) {
      const auto& c = centers[r.dist];
      if (!c || *c == CliffordAngle::Zero) continue;
      if (r.axis != PauliAxis::Z) {
        throw std::logic_error("extract_symmetry_center needs a Z-canonical circuit");
      }
      layer.fixed.push_back(CliffordGate::single(clifford_for_angle(*c), r.qubit));
    }
  }
  return ParamCircuit(circuit.num_qubits(), std::move(layers), circuit.tail(), std::move(dists),
                      circuit.copies());
}

ParamCircuit prepare_for_sampling(const ParamCircuit& circuit) {
  return extract_symmetry_center(canonicalize_to_z(circuit));
}

namespace {

GateKind shift_gate(ShiftSign sign) { return sign == ShiftSign::Plus ? GateKind::S : GateKind::Sdg; }

void check_shift(const ParamCircuit& circuit, const ParamShift& shift) {
  if (shift.param >= circuit.num_params()) {
    throw std::out_of_range("parameter index " + std::to_string(shift.param) + " out of range (M=" +
                            std::to_string(circuit.num_params()) + ")");
  }
}

}  // namespace

ParamCircuit apply_parameter_shift(const ParamCircuit& circuit, ParamShift shift) {
  check_shift(circuit, shift);
  std::vector<Layer> layers = circuit.layers();
  for (const auto& pos : circuit.sites_of(shift.param)) {
    const auto& r = circuit.site(pos);
    if (r.axis != PauliAxis::Z) throw std::logic_error("parameter shift needs a Z-canonical circuit");
    layers[pos.first].fixed.push_back(CliffordGate::single(shift_gate(shift.sign), r.qubit));
  }
  return ParamCircuit(circuit.num_qubits(), std::move(layers), circuit.tail(),
                      circuit.distributions(), circuit.copies());
}

ParamCircuit double_circuit(const ParamCircuit& circuit, std::optional<ParamShift> shift_a,
                            std::optional<ParamShift> shift_b) {
  if (circuit.copies() != 1) throw std::logic_error("circuit is already doubled");
  if (!circuit.all_z()) throw std::logic_error("double_circuit needs a Z-canonical circuit");
  if (shift_a) check_shift(circuit, *shift_a);
  if (shift_b) check_shift(circuit, *shift_b);
  const auto n = static_cast<std::uint32_t>(circuit.num_qubits());

  std::vector<Layer> layers;
  layers.reserve(circuit.layers().size());
  for (const auto& layer : circuit.layers()) {
    Layer doubled;
    doubled.fixed = layer.fixed;
    for (const auto& g : layer.fixed) doubled.fixed.push_back(g.shifted(n));
    for (const auto& r : layer.rotations) {
      doubled.rotations.push_back(r);
      RotationSite b = r;
      b.qubit += n;
      doubled.rotations.push_back(b);
    }
    layers.push_back(std::move(doubled));
  }
  auto add_shift = [&](const std::optional<ParamShift>& shift, std::uint32_t offset) {
    if (!shift) return;
    const auto pos = circuit.sites_of(shift->param).front();
    const auto q = circuit.site(pos).qubit + offset;
    layers[pos.first].fixed.push_back(CliffordGate::single(shift_gate(shift->sign), q));
  };
  add_shift(shift_a, 0);
  add_shift(shift_b, n);

  std::vector<CliffordGate> tail = circuit.tail();
  for (const auto& g : circuit.tail()) tail.push_back(g.shifted(n));
  return ParamCircuit(2 * circuit.num_qubits(), std::move(layers), std::move(tail),
                      circuit.distributions(), 2);
}

}  // namespace cliffvar
