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

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cliffvar {

/// The four angles k*pi/2 at which R_Z is a Clifford gate up to phase.
enum class CliffordAngle : std::uint8_t { Zero = 0, HalfPi = 1, Pi = 2, ThreeHalfPi = 3 };

double radians(CliffordAngle angle);
/// Maps an angle within 1e-9 of k*pi/2 (mod 2pi) to its Clifford angle;
/// throws std::invalid_argument for anything else.
CliffordAngle clifford_angle_from_radians(double angle);

/// (E[cos t theta], E[sin t theta]).
struct TrigMoment {
  double r = 1.0;
  double s = 0.0;
};

struct UniformLaw {};
struct GaussianLaw {
  double mean = 0.0;
  double variance = 0.0;
};
struct DiracAtom {
  double angle = 0.0;
  double weight = 0.0;
};
struct DiracLaw {
  std::vector<DiracAtom> atoms;
};
/// A law known only through its first T characteristic-function values.
struct TabulatedLaw {
  std::vector<double> r;
  std::vector<double> s;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AngleDistribution {
 public:
  using Law = std::variant<UniformLaw, GaussianLaw, DiracLaw, TabulatedLaw>;

  static AngleDistribution uniform();
  static AngleDistribution gaussian(double mean, double variance);
  static AngleDistribution dirac(std::vector<DiracAtom> atoms);
  static AngleDistribution dirac_at(double angle);
  static AngleDistribution tabulated(std::vector<double> r, std::vector<double> s);

  /// Declares the law symmetric about `center`.
  AngleDistribution with_center(CliffordAngle center) const;

  const Law& law() const { return law_; }
  std::optional<CliffordAngle> center() const { return center_; }
  /// Highest available moment order; unbounded for everything but tabulated laws.
  std::optional<std::size_t> max_order() const;

  /// Throws std::out_of_range for t beyond a tabulated law's range; t = 0 gives (1, 0).
  TrigMoment moment(int t) const;

  /// Law of theta - c. The declared centre is dropped.
  AngleDistribution recenter(CliffordAngle c) const;

  /// s_1 and s_2 vanish, i.e. the 1- and 2-fold channels see an even law.
  bool is_even(double tol = 1e-14) const;

  /// E[f(theta)]: exact for Dirac mixtures, adaptive Gauss-Kronrod to 1e-10
  /// otherwise. Tabulated laws throw std::invalid_argument.
  double expectation(const std::function<double(double)>& f) const;

  /// Only for the dense oracle; tabulated laws cannot be sampled.
  double sample(std::mt19937_64& rng) const;

  std::string describe() const;

 private:
  explicit AngleDistribution(Law law) : law_(std::move(law)) {}

  Law law_;
  std::optional<CliffordAngle> center_;
};

/// Counts (m0, m1, m2, m3) of the factors (1+cos), (1-cos), sin(-theta), sin(theta).
using LambdaIndex = std::array<int, 4>;

/// lambda_I(theta) = 2^-N (1+cos)^m0 (1-cos)^m1 sin(-theta)^m2 sin(theta)^m3.
double lambda_value(const LambdaIndex& counts, double theta);

/// E[lambda_I] for every count pattern with m0+m1+m2+m3 = N.
std::map<LambdaIndex, double> lambda_expectations(const AngleDistribution& dist, int order);

}  // namespace cliffvar
