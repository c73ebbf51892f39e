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

#include <numbers>
#include <random>

#include "cliffvar/dense.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace cliffvar;
using std::numbers::pi;

namespace {

std::vector<double> random_theta(std::size_t m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-pi, pi);
  std::vector<double> theta(m);
  for (auto& t : theta) t = u(rng);
  return theta;
}

ParamCircuit single_rotation(PauliAxis axis, const AngleDistribution& dist) {
  std::vector<Layer> layers(1);
  layers[0].rotations = {RotationSite{0, axis, 0, 0}};
  return ParamCircuit(1, std::move(layers), {}, {dist});
}

}  // namespace

TEST(param_circuit, validation) {
  const auto u = AngleDistribution::uniform();
  std::vector<Layer> twice(1);
  twice[0].rotations = {RotationSite{0, PauliAxis::Z, 0, 0}, RotationSite{0, PauliAxis::X, 1, 0}};
  EXPECT_THROW(ParamCircuit(2, twice, {}, {u}), std::invalid_argument);
  std::vector<Layer> gap(1);
  gap[0].rotations = {RotationSite{0, PauliAxis::Z, 1, 0}};
  EXPECT_THROW(ParamCircuit(1, gap, {}, {u}), std::invalid_argument);
  std::vector<Layer> bad_dist(1);
  bad_dist[0].rotations = {RotationSite{0, PauliAxis::Z, 0, 3}};
  EXPECT_THROW(ParamCircuit(1, bad_dist, {}, {u}), std::invalid_argument);
  EXPECT_THROW(Observable::zero_projector(2, {}), std::invalid_argument);
  EXPECT_THROW(Observable::pauli_sum(2, {{1.0, PauliString::parse("XYZ")}}), std::invalid_argument);
}

TEST(canonicalize, x_rotation_wrapped_by_hadamards) {
  const auto c = canonicalize_to_z(single_rotation(PauliAxis::X, AngleDistribution::uniform()));
  EXPECT_TRUE(c.all_z());
  ASSERT_EQ(c.layers()[0].fixed.size(), 1u);
  EXPECT_EQ(c.layers()[0].fixed[0], CliffordGate::single(GateKind::H, 0));
  ASSERT_EQ(c.tail().size(), 1u);
  EXPECT_EQ(c.tail()[0], CliffordGate::single(GateKind::H, 0));
}

TEST(canonicalize, z_only_unchanged_and_idempotent) {
  const auto z = single_rotation(PauliAxis::Z, AngleDistribution::uniform());
  const auto c = canonicalize_to_z(z);
  EXPECT_TRUE(c.layers()[0].fixed.empty());
  EXPECT_TRUE(c.tail().empty());
  const auto fixture = canonicalize_to_z(testutil::three_qubit_fixture(AngleDistribution::uniform()));
  const auto again = canonicalize_to_z(fixture);
  for (std::size_t l = 0; l < fixture.layers().size(); ++l) {
    EXPECT_EQ(fixture.layers()[l].fixed, again.layers()[l].fixed);
  }
  EXPECT_EQ(fixture.tail(), again.tail());
}

TEST(canonicalize, preserves_channel) {
  std::mt19937_64 rng(1);
  const auto circuit = testutil::three_qubit_fixture(AngleDistribution::uniform());
  const auto z = canonicalize_to_z(circuit);
  EXPECT_TRUE(z.all_z());
  for (int trial = 0; trial < 20; ++trial) {
    const auto theta = random_theta(circuit.num_params(), rng);
    EXPECT_LT(testutil::phase_distance(testutil::circuit_unitary(circuit, theta),
                                       testutil::circuit_unitary(z, theta)),
              1e-12);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const auto random = testutil::random_layered_circuit(4, 3, {AngleDistribution::uniform()}, rng);
    const auto theta = random_theta(random.num_params(), rng);
    EXPECT_LT(testutil::phase_distance(testutil::circuit_unitary(random, theta),
                                       testutil::circuit_unitary(canonicalize_to_z(random), theta)),
              1e-12);
  }
}

TEST(symmetry_center, inserts_clifford_and_recentres) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 4; ++k) {
    const auto c = static_cast<CliffordAngle>(k);
    const auto dist = AngleDistribution::gaussian(radians(c), 0.3).with_center(c);
    const auto circuit = single_rotation(PauliAxis::Z, dist);
    const auto out = extract_symmetry_center(circuit);
    EXPECT_FALSE(out.distributions()[0].center());
    EXPECT_NEAR(std::get<GaussianLaw>(out.distributions()[0].law()).mean, 0.0, 1e-15);
    if (c == CliffordAngle::Zero) {
      EXPECT_TRUE(out.layers()[0].fixed.empty());
    } else {
      ASSERT_EQ(out.layers()[0].fixed.size(), 1u);
      EXPECT_EQ(out.layers()[0].fixed[0].kind, clifford_for_angle(c));
    }
    // theta in the original circuit is theta - c in the recentred one.
    const double theta = std::uniform_real_distribution<double>(-pi, pi)(rng);
    EXPECT_LT(testutil::phase_distance(testutil::circuit_unitary(circuit, {theta}),
                                       testutil::circuit_unitary(out, {theta - radians(c)})),
              1e-12);
  }
}

TEST(parameter_shift, plus_uses_s_minus_uses_sdg) {
  const auto z = single_rotation(PauliAxis::Z, AngleDistribution::uniform());
  const auto plus = apply_parameter_shift(z, {0, ShiftSign::Plus});
  const auto minus = apply_parameter_shift(z, {0, ShiftSign::Minus});
  EXPECT_EQ(plus.layers()[0].fixed.back().kind, GateKind::S);
  EXPECT_EQ(minus.layers()[0].fixed.back().kind, GateKind::Sdg);
  EXPECT_THROW(apply_parameter_shift(z, {1, ShiftSign::Plus}), std::out_of_range);
}

TEST(parameter_shift, matches_shifted_angle) {
  std::mt19937_64 rng(3);
  const auto circuit = canonicalize_to_z(testutil::three_qubit_fixture(AngleDistribution::uniform()));
  for (std::uint32_t k = 0; k < circuit.num_params(); ++k) {
    for (auto sign : {ShiftSign::Plus, ShiftSign::Minus}) {
      const auto shifted = apply_parameter_shift(circuit, {k, sign});
      auto theta = random_theta(circuit.num_params(), rng);
      const auto u_shifted = testutil::circuit_unitary(shifted, theta);
      theta[k] += sign == ShiftSign::Plus ? pi / 2 : -pi / 2;
      EXPECT_LT(testutil::phase_distance(u_shifted, testutil::circuit_unitary(circuit, theta)), 1e-12);
    }
  }
}

TEST(parameter_shift, four_plus_shifts_are_identity) {
  std::mt19937_64 rng(4);
  const auto circuit = canonicalize_to_z(testutil::three_qubit_fixture(AngleDistribution::uniform()));
  auto shifted = circuit;
  for (int i = 0; i < 4; ++i) shifted = apply_parameter_shift(shifted, {2, ShiftSign::Plus});
  const auto theta = random_theta(circuit.num_params(), rng);
  EXPECT_LT(testutil::phase_distance(testutil::circuit_unitary(shifted, theta),
                                     testutil::circuit_unitary(circuit, theta)),
            1e-12);
}

TEST(double_circuit, structure) {
  const auto z = single_rotation(PauliAxis::Z, AngleDistribution::uniform());
  const auto d = double_circuit(z, std::nullopt, std::nullopt);
  EXPECT_EQ(d.num_qubits(), 2u);
  EXPECT_EQ(d.copies(), 2);
  EXPECT_EQ(d.num_params(), 1u);
  EXPECT_EQ(d.num_rotations(), 2u);
  const auto fixture = canonicalize_to_z(testutil::three_qubit_fixture(AngleDistribution::uniform()));
  const auto big = double_circuit(fixture, ParamShift{1, ShiftSign::Plus}, ParamShift{1, ShiftSign::Minus});
  EXPECT_EQ(big.num_qubits(), 6u);
  EXPECT_EQ(big.num_rotations(), 12u);
  EXPECT_EQ(big.num_params(), 6u);
  const auto& layer0 = big.layers()[0].fixed;
  EXPECT_NE(std::find(layer0.begin(), layer0.end(), CliffordGate::single(GateKind::S, 1)), layer0.end());
  EXPECT_NE(std::find(layer0.begin(), layer0.end(), CliffordGate::single(GateKind::Sdg, 4)), layer0.end());
  EXPECT_THROW(double_circuit(big, std::nullopt, std::nullopt), std::logic_error);
}

TEST(double_circuit, cost_is_product_of_copies) {
  std::mt19937_64 rng(5);
  const auto fixture = canonicalize_to_z(testutil::three_qubit_fixture(AngleDistribution::uniform()));
  const auto obs = Observable::pauli_sum(3, {{0.5, PauliString::parse("ZXI")}, {-1.0, PauliString::parse("IYZ")}});
  const ParamShift a{3, ShiftSign::Plus}, b{3, ShiftSign::Minus};
  const auto doubled = double_circuit(fixture, a, b);
  const auto theta = random_theta(fixture.num_params(), rng);
  const double expected = evaluate_cost(apply_parameter_shift(fixture, a), obs, theta) *
                          evaluate_cost(apply_parameter_shift(fixture, b), obs, theta);
  EXPECT_NEAR(evaluate_cost(doubled, obs.tensor_square(), theta), expected, 1e-12);
}

TEST(observable, tail_absorption_preserves_cost) {
  std::mt19937_64 rng(6);
  const auto fixture = canonicalize_to_z(testutil::three_qubit_fixture(AngleDistribution::uniform()));
  for (int trial = 0; trial < 20; ++trial) {
    const auto obs = Observable::pauli_sum(3, {{0.7, testutil::random_pauli(3, rng)},
                                               {-0.2, testutil::random_pauli(3, rng)}});
    const auto [stripped, moved] = absorb_tail_into_observable(fixture, obs);
    EXPECT_TRUE(stripped.tail().empty());
    const auto theta = random_theta(fixture.num_params(), rng);
    EXPECT_NEAR(evaluate_cost(fixture, obs, theta), evaluate_cost(stripped, moved, theta), 1e-12);
  }
}

TEST(observable, norm_bounds_and_square) {
  const auto p = Observable::pauli_sum(2, {{0.5, PauliString::parse("XZ")}, {-2.0, PauliString::parse("YY")}});
  EXPECT_DOUBLE_EQ(p.norm_bound(), 2.5);
  EXPECT_EQ(std::get<PauliSum>(p.tensor_square().kind()).terms.size(), 4u);
  const auto z = Observable::zero_projector(3, {2, 0});
  EXPECT_DOUBLE_EQ(z.norm_bound(), 1.0);
  EXPECT_EQ(std::get<ZeroProjector>(z.tensor_square().kind()).support,
            (std::vector<std::uint32_t>{0, 2, 3, 5}));
}
