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

#include "cliffvar/angle_distribution.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace cliffvar;
using std::numbers::pi;

namespace {

// Trapezoid rule over one period; spectrally accurate for periodic integrands.
double trapezoid_uniform(const std::function<double(double)>& f, int points) {
  double total = 0.0;
  for (int j = 0; j < points; ++j) total += f(2 * pi * j / points);
  return total / points;
}

}  // namespace

TEST(moments, uniform) {
  const auto m = AngleDistribution::uniform().moment(1);
  EXPECT_EQ(m.r, 0.0);
  EXPECT_EQ(m.s, 0.0);
  EXPECT_EQ(AngleDistribution::uniform().moment(0).r, 1.0);
}

TEST(moments, gaussian_closed_form) {
  const double var = 0.7;
  const auto g = AngleDistribution::gaussian(0.0, var);
  EXPECT_NEAR(g.moment(1).r, std::exp(-var / 2), 1e-15);
  EXPECT_NEAR(g.moment(2).r, std::exp(-2 * var), 1e-15);
  EXPECT_EQ(g.moment(2).s, 0.0);
  // Closed form agrees with quadrature of cos(t theta).
  const auto shifted = AngleDistribution::gaussian(0.3, var);
  EXPECT_NEAR(shifted.expectation([](double t) { return std::sin(2 * t); }), shifted.moment(2).s,
              1e-10);
}

TEST(moments, dirac_pi_over_3) {
  const auto m = AngleDistribution::dirac({{pi / 3, 1.0}}).moment(2);
  EXPECT_NEAR(m.r, -0.5, 1e-15);
  EXPECT_NEAR(m.s, std::sqrt(3.0) / 2, 1e-15);
}

TEST(moments, tabulated_range) {
  const auto t = AngleDistribution::tabulated({0.5, 0.1}, {0.0, 0.2});
  EXPECT_EQ(t.max_order(), 2u);
  EXPECT_DOUBLE_EQ(t.moment(2).s, 0.2);
  EXPECT_THROW(t.moment(3), std::out_of_range);
  EXPECT_THROW(t.expectation([](double) { return 1.0; }), std::invalid_argument);
  EXPECT_THROW(lambda_expectations(t, 1), std::invalid_argument);
}

TEST(distribution, validation) {
  EXPECT_THROW(AngleDistribution::dirac({{0.0, 0.4}, {1.0, 0.4}}), std::invalid_argument);
  EXPECT_THROW(AngleDistribution::dirac({{0.0, 1.5}, {1.0, -0.5}}), std::invalid_argument);
  EXPECT_THROW(AngleDistribution::gaussian(0.0, -1.0), std::invalid_argument);
  EXPECT_THROW(AngleDistribution::tabulated({1.5}, {0.0}), std::invalid_argument);
  EXPECT_THROW(clifford_angle_from_radians(0.3), std::invalid_argument);
  EXPECT_EQ(clifford_angle_from_radians(-pi / 2), CliffordAngle::ThreeHalfPi);
}

TEST(recenter, laws) {
  EXPECT_TRUE(std::holds_alternative<UniformLaw>(
      AngleDistribution::uniform().recenter(CliffordAngle::HalfPi).law()));
  const auto g = AngleDistribution::gaussian(pi / 2, 0.4).recenter(CliffordAngle::HalfPi);
  EXPECT_NEAR(std::get<GaussianLaw>(g.law()).mean, 0.0, 1e-15);
  const auto d = AngleDistribution::dirac_at(pi / 3 + pi / 2).recenter(CliffordAngle::HalfPi);
  const auto ref = AngleDistribution::dirac_at(pi / 3);
  for (int t = 1; t <= 3; ++t) {
    EXPECT_NEAR(d.moment(t).r, ref.moment(t).r, 1e-12);
    EXPECT_NEAR(d.moment(t).s, ref.moment(t).s, 1e-12);
  }
}

TEST(recenter, moments_rotate_analytically) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = testutil::random_dirac(rng);
    const auto tab = AngleDistribution::tabulated({d.moment(1).r, d.moment(2).r, d.moment(3).r},
                                                  {d.moment(1).s, d.moment(2).s, d.moment(3).s});
    for (int k = 0; k < 4; ++k) {
      const auto c = static_cast<CliffordAngle>(k);
      const auto a = d.recenter(c), b = tab.recenter(c);
      for (int t = 1; t <= 3; ++t) {
        // E[e^{it(theta - c)}] = e^{-itc} E[e^{it theta}].
        const std::complex<double> expected =
            std::polar(1.0, -t * radians(c)) * std::complex<double>(d.moment(t).r, d.moment(t).s);
        EXPECT_NEAR(a.moment(t).r, expected.real(), 1e-12);
        EXPECT_NEAR(a.moment(t).s, expected.imag(), 1e-12);
        EXPECT_NEAR(b.moment(t).r, expected.real(), 1e-12);
        EXPECT_NEAR(b.moment(t).s, expected.imag(), 1e-12);
      }
    }
  }
}

TEST(lambda, order_one_table) {
  const auto d = AngleDistribution::gaussian(0.2, 0.5);
  const auto [r1, s1] = d.moment(1);
  const auto table = lambda_expectations(d, 1);
  EXPECT_NEAR((table.at({1, 0, 0, 0})), (1 + r1) / 2, 1e-10);
  EXPECT_NEAR((table.at({0, 1, 0, 0})), (1 - r1) / 2, 1e-10);
  EXPECT_NEAR((table.at({0, 0, 1, 0})), -s1 / 2, 1e-10);
  EXPECT_NEAR((table.at({0, 0, 0, 1})), s1 / 2, 1e-10);
}

TEST(lambda, dirac_zero) {
  for (int order = 1; order <= 4; ++order) {
    for (const auto& [idx, v] : lambda_expectations(AngleDistribution::dirac_at(0.0), order)) {
      EXPECT_DOUBLE_EQ(v, idx[0] == order ? 1.0 : 0.0);
    }
  }
}

TEST(lambda, uniform_matches_trapezoid) {
  for (const auto& [idx, v] : lambda_expectations(AngleDistribution::uniform(), 2)) {
    const auto counts = idx;
    const double ref =
        trapezoid_uniform([&](double t) { return lambda_value(counts, t); }, 1000000);
    EXPECT_NEAR(v, ref, 1e-10);
  }
}

TEST(lambda, ordered_sum_is_one) {
  const AngleDistribution laws[] = {AngleDistribution::uniform(),
                                    AngleDistribution::gaussian(0.5, 2.0),
                                    AngleDistribution::dirac({{1.0, 0.3}, {2.5, 0.7}})};
  for (const auto& d : laws) {
    for (int order = 1; order <= 4; ++order) {
      double total = 0.0;
      for (const auto& [idx, v] : lambda_expectations(d, order)) {
        // Multinomial count of ordered indices with these counts.
        double mult = std::tgamma(order + 1.0);
        for (int m : idx) mult /= std::tgamma(m + 1.0);
        total += mult * v;
      }
      EXPECT_NEAR(total, 1.0, 1e-10) << d.describe() << " N=" << order;
    }
  }
}

TEST(sampling, dirac_and_gaussian) {
  std::mt19937_64 rng(9);
  const auto d = AngleDistribution::dirac({{0.0, 0.25}, {1.0, 0.75}});
  double ones = 0;
  for (int i = 0; i < 100000; ++i) ones += d.sample(rng) == 1.0;
  EXPECT_NEAR(ones / 100000, 0.75, 0.01);
  EXPECT_THROW(AngleDistribution::tabulated({0.0}, {0.0}).sample(rng), std::invalid_argument);
}
