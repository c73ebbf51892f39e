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

#include <cmath>
#include <numbers>
#include <random>

#include "cliffvar/tableau.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace cliffvar;
using std::numbers::pi;

namespace {

// H R_Z(theta) H on one qubit.
ParamCircuit hzh(const AngleDistribution& dist) {
  std::vector<Layer> layers(1);
  layers[0].fixed = {CliffordGate::single(GateKind::H, 0)};
  layers[0].rotations = {RotationSite{0, PauliAxis::Z, 0, 0}};
  return ParamCircuit(1, std::move(layers), {CliffordGate::single(GateKind::H, 0)}, {dist});
}

const Observable kZ = Observable::pauli_sum(1, {{1.0, PauliString::parse("Z")}});

}  // namespace

TEST(dense, empty_circuit_projector) {
  const ParamCircuit empty(3, {}, {}, {});
  EXPECT_DOUBLE_EQ(evaluate_cost(empty, Observable::all_zero(3), std::vector<double>{}), 1.0);
}

TEST(dense, hzh_is_cosine) {
  const auto c = hzh(AngleDistribution::uniform());
  for (double theta : {0.0, pi / 2, pi, 0.37}) {
    EXPECT_NEAR(evaluate_cost(c, kZ, std::vector<double>{theta}), std::cos(theta), 1e-14);
  }
}

TEST(dense, cap_enforced) {
  EXPECT_THROW(DenseState(15), std::invalid_argument);
  EXPECT_NO_THROW(DenseState(3, 3));
  EXPECT_THROW(evaluate_cost(ParamCircuit(4, {}, {}, {}), Observable::all_zero(4),
                             std::vector<double>{}, 3),
               std::invalid_argument);
  EXPECT_THROW(evaluate_cost(hzh(AngleDistribution::uniform()), kZ, std::vector<double>{}),
               std::invalid_argument);
}

TEST(dense, clifford_angles_match_stabilizer) {
  std::mt19937_64 rng(7);
  const auto fixture = canonicalize_to_z(testutil::three_qubit_fixture(AngleDistribution::uniform()));
  const auto obs = Observable::all_zero(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> theta(fixture.num_params());
    std::vector<CliffordGate> gates;
    for (auto& t : theta) t = (rng() % 4) * pi / 2;
    for (const auto& layer : fixture.layers()) {
      gates.insert(gates.end(), layer.fixed.begin(), layer.fixed.end());
      for (const auto& r : layer.rotations) {
        gates.push_back(CliffordGate::single(
            clifford_for_angle(clifford_angle_from_radians(theta[r.param])), r.qubit));
      }
    }
    gates.insert(gates.end(), fixture.tail().begin(), fixture.tail().end());
    const std::uint32_t all[] = {0, 1, 2};
    EXPECT_NEAR(evaluate_cost(fixture, obs, theta),
                run_circuit(gates, 3).zero_projector_probability(all), 1e-12);
  }
}

TEST(dense, rewrites_keep_cost) {
  std::mt19937_64 rng(8);
  const auto original = testutil::random_layered_circuit(4, 3, {AngleDistribution::uniform()}, rng);
  const auto obs = Observable::pauli_sum(4, {{1.0, PauliString::parse("ZXYI")}});
  std::uniform_real_distribution<double> u(-pi, pi);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> theta(original.num_params());
    for (auto& t : theta) t = u(rng);
    EXPECT_NEAR(evaluate_cost(original, obs, theta),
                evaluate_cost(canonicalize_to_z(original), obs, theta), 1e-12);
  }
}

TEST(dense, shift_rule_is_exact_derivative) {
  std::mt19937_64 rng(9);
  const auto circuit = testutil::random_layered_circuit(3, 2, {AngleDistribution::uniform()}, rng);
  const auto obs = Observable::all_zero(3);
  std::vector<double> theta(circuit.num_params());
  std::uniform_real_distribution<double> u(-pi, pi);
  for (auto& t : theta) t = u(rng);
  for (std::uint32_t k = 0; k < circuit.num_params(); ++k) {
    auto central = [&](double h) {
      auto p = theta, m = theta;
      p[k] += h;
      m[k] -= h;
      return (evaluate_cost(circuit, obs, p) - evaluate_cost(circuit, obs, m)) / (2 * h);
    };
    const double shift = evaluate_quantity(circuit, obs, {QuantityKind::Gradient, k}, theta);
    const double richardson = (4 * central(5e-4) - central(1e-3)) / 3;
    EXPECT_NEAR(shift, richardson, 1e-10);
    // Central differences converge at O(h^2).
    const double e1 = std::abs(central(1e-2) - shift), e2 = std::abs(central(5e-3) - shift);
    if (e1 > 1e-9) EXPECT_NEAR(e1 / e2, 4.0, 0.05);
  }
}

TEST(dense, mc_average_single_atom_is_exact) {
  std::mt19937_64 rng(10);
  const auto r = mc_average(hzh(AngleDistribution::dirac_at(0.4)), kZ, {QuantityKind::Cost, 0}, 50, rng);
  EXPECT_NEAR(r.mean, std::cos(0.4), 1e-15);
  EXPECT_EQ(r.standard_error, 0.0);
}

TEST(dense, mc_average_uniform_cos_squared) {
  std::mt19937_64 rng(11);
  const auto c = hzh(AngleDistribution::uniform());
  const auto r = mc_average(c, kZ, {QuantityKind::CostSquared, 0}, 100000, rng);
  EXPECT_NEAR(r.mean, 0.5, 4 * r.standard_error);
  EXPECT_NEAR(quadrature_average(c, kZ, {QuantityKind::CostSquared, 0}), 0.5, 1e-14);
}

TEST(dense, quadrature_matches_monte_carlo) {
  std::mt19937_64 rng(12);
  const std::vector<AngleDistribution> dists{AngleDistribution::gaussian(0.3, 0.8),
                                             AngleDistribution::uniform(),
                                             AngleDistribution::dirac({{0.2, 0.6}, {2.0, 0.4}})};
  const auto circuit = testutil::random_layered_circuit(3, 2, dists, rng);
  const auto obs = Observable::all_zero(3);
  for (auto kind : {QuantityKind::Cost, QuantityKind::Gradient, QuantityKind::CostSquared,
                    QuantityKind::GradientSquared}) {
    const Quantity q{kind, 1};
    const double exact = quadrature_average(circuit, obs, q);
    const auto mc = mc_average(circuit, obs, q, 20000, rng);
    EXPECT_NEAR(mc.mean, exact, 4 * mc.standard_error + 1e-12);
  }
}

TEST(dense, quadrature_exact_for_gaussian_moments) {
  // E[cos^2 theta] = (1 + r2) / 2 exactly.
  const auto g = AngleDistribution::gaussian(0.4, 0.9);
  EXPECT_NEAR(quadrature_average(hzh(g), kZ, {QuantityKind::CostSquared, 0}),
              (1 + g.moment(2).r) / 2, 1e-14);
}
