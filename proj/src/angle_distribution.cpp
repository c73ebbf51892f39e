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

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace cliffvar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kQuadratureTolerance = 1e-10;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double integrate(const std::function<double(double)>& f, double a, double b, double scale) {
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, 20, 1e-14, &error, &l1);
  if (!std::isfinite(value) || error * scale > kQuadratureTolerance) {
    throw QuadratureError("quadrature did not reach 1e-10 (estimated error " +
                          std::to_string(error * scale) + ")");
  }
  return value * scale;
}

}  // namespace

double radians(CliffordAngle angle) {
  return static_cast<int>(angle) * std::numbers::pi / 2.0;
}

CliffordAngle clifford_angle_from_radians(double angle) {
  const double quarter = angle / (std::numbers::pi / 2.0);
  const double k = std::round(quarter);
  if (!std::isfinite(angle) || std::abs(quarter - k) > 1e-9) {
    throw std::invalid_argument("symmetry centre " + std::to_string(angle) +
                                " is not a multiple of pi/2");
  }
  const long long idx = ((static_cast<long long>(k) % 4) + 4) % 4;
  return static_cast<CliffordAngle>(idx);
}

AngleDistribution AngleDistribution::uniform() { return AngleDistribution(UniformLaw{}); }

AngleDistribution AngleDistribution::gaussian(double mean, double variance) {
  if (!(variance >= 0.0) || !std::isfinite(mean) || !std::isfinite(variance)) {
    throw std::invalid_argument("gaussian law needs a finite mean and variance >= 0");
  }
  return AngleDistribution(GaussianLaw{mean, variance});
}

AngleDistribution AngleDistribution::dirac(std::vector<DiracAtom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("dirac mixture needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.weight >= 0.0) || !std::isfinite(a.angle)) {
      throw std::invalid_argument("dirac atoms need finite angles and nonnegative weights");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("dirac weights sum to " + std::to_string(total) + ", not 1");
  }
  return AngleDistribution(DiracLaw{std::move(atoms)});
}

AngleDistribution AngleDistribution::dirac_at(double angle) { return dirac({{angle, 1.0}}); }

AngleDistribution AngleDistribution::tabulated(std::vector<double> r, std::vector<double> s) {
  if (r.empty() || r.size() != s.size()) {
    throw std::invalid_argument("tabulated moments need equal-length, nonempty r and s");
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(std::abs(r[i]) <= 1.0 + 1e-12) || !(std::abs(s[i]) <= 1.0 + 1e-12)) {
      throw std::invalid_argument("tabulated moments must satisfy |r_t|, |s_t| <= 1");
    }
  }
  return AngleDistribution(TabulatedLaw{std::move(r), std::move(s)});
}

AngleDistribution AngleDistribution::with_center(CliffordAngle center) const {
  AngleDistribution out = *this;
  out.center_ = center;
  return out;
}

std::optional<std::size_t> AngleDistribution::max_order() const {
  if (const auto* tab = std::get_if<TabulatedLaw>(&law_)) return tab->r.size();
  return std::nullopt;
}

TrigMoment AngleDistribution::moment(int t) const {
  if (t < 0) throw std::out_of_range("moment order must be >= 0");
  if (t == 0) return {1.0, 0.0};
  return std::visit(
      Overloaded{
          [](const UniformLaw&) { return TrigMoment{0.0, 0.0}; },
          [t](const GaussianLaw& g) {
            const double damp = std::exp(-0.5 * t * t * g.variance);
            return TrigMoment{damp * std::cos(t * g.mean), damp * std::sin(t * g.mean)};
          },
          [t](const DiracLaw& d) {
            TrigMoment m{0.0, 0.0};
            for (const auto& a : d.atoms) {
              m.r += a.weight * std::cos(t * a.angle);
              m.s += a.weight * std::sin(t * a.angle);
            }
            return m;
          },
          [t](const TabulatedLaw& tab) {
            if (static_cast<std::size_t>(t) > tab.r.size()) {
              throw std::out_of_range("moment order " + std::to_string(t) +
                                      " beyond tabulated range " + std::to_string(tab.r.size()));
            }
            return TrigMoment{tab.r[t - 1], tab.s[t - 1]};
          }},
      law_);
}

AngleDistribution AngleDistribution::recenter(CliffordAngle c) const {
  const double shift = radians(c);
  const int quarter_turns = static_cast<int>(c);
  Law law = std::visit(
      Overloaded{
          [](const UniformLaw& u) -> Law { return u; },
          [shift](const GaussianLaw& g) -> Law { return GaussianLaw{g.mean - shift, g.variance}; },
          [shift](const DiracLaw& d) -> Law {
            DiracLaw out = d;
            for (auto& a : out.atoms) a.angle = std::remainder(a.angle - shift, kTwoPi);
            return out;
          },
          [quarter_turns](const TabulatedLaw& tab) -> Law {
            // (r + i s) * (-i)^(t k), exact for quarter turns.
            TabulatedLaw out = tab;
            for (std::size_t i = 0; i < tab.r.size(); ++i) {
              const int t = static_cast<int>(i) + 1;
              const double r = tab.r[i];
              const double s = tab.s[i];
              switch ((t * quarter_turns) % 4) {
                case 0:
                  break;
                case 1:
                  out.r[i] = s;
                  out.s[i] = -r;
                  break;
                case 2:
                  out.r[i] = -r;
                  out.s[i] = -s;
                  break;
                case 3:
                  out.r[i] = -s;
                  out.s[i] = r;
                  break;
              }
            }
            return out;
          }},
      law_);
  return AngleDistribution(std::move(law));
}

bool AngleDistribution::is_even(double tol) const {
  if (const auto* tab = std::get_if<TabulatedLaw>(&law_)) {
    for (double s : tab->s) {
      if (std::abs(s) > tol) return false;
    }
    return true;
  }
  return std::abs(moment(1).s) <= tol && std::abs(moment(2).s) <= tol;
}

double AngleDistribution::expectation(const std::function<double(double)>& f) const {
  return std::visit(
      Overloaded{
          [&f](const UniformLaw&) { return integrate(f, 0.0, kTwoPi, 1.0 / kTwoPi); },
          [&f](const GaussianLaw& g) {
            if (g.variance == 0.0) return f(g.mean);
            const double sigma = std::sqrt(g.variance);
            const double norm = 1.0 / (sigma * std::sqrt(kTwoPi));
            auto weighted = [&](double x) {
              const double u = (x - g.mean) / sigma;
              return f(x) * std::exp(-0.5 * u * u);
            };
            // Split into pi-wide panels so the adaptive rule never straddles many periods.
            const double half_width = 12.0 * sigma;
            const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * half_width / std::numbers::pi)));
            const double h = 2.0 * half_width / panels;
            double total = 0.0;
            for (int p = 0; p < panels; ++p) {
              const double a = g.mean - half_width + p * h;
              total += integrate(weighted, a, a + h, norm);
            }
            return total;
          },
          [&f](const DiracLaw& d) {
            double total = 0.0;
            for (const auto& a : d.atoms) total += a.weight * f(a.angle);
            return total;
          },
          [](const TabulatedLaw&) -> double {
            throw std::invalid_argument(
                "a tabulated law only fixes finitely many moments; general expectations are undefined");
          }},
      law_);
}

double AngleDistribution::sample(std::mt19937_64& rng) const {
  return std::visit(
      Overloaded{
          [&rng](const UniformLaw&) {
            return kTwoPi * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
          },
          [&rng](const GaussianLaw& g) {
            return std::normal_distribution<double>(g.mean, std::sqrt(g.variance))(rng);
          },
          [&rng](const DiracLaw& d) {
            double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            for (const auto& a : d.atoms) {
              if (u < a.weight) return a.angle;
              u -= a.weight;
            }
            return d.atoms.back().angle;
          },
          [](const TabulatedLaw&) -> double {
            throw std::invalid_argument("tabulated moment laws cannot be sampled");
          }},
      law_);
}

std::string AngleDistribution::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{[&](const UniformLaw&) { out << "uniform"; },
                        [&](const GaussianLaw& g) {
                          out << "gaussian(mean=" << g.mean << ", var=" << g.variance << ")";
                        },
                        [&](const DiracLaw& d) { out << "dirac(" << d.atoms.size() << " atoms)"; },
                        [&](const TabulatedLaw& t) { out << "tabulated(T=" << t.r.size() << ")"; }},
             law_);
  if (center_) out << " centred at " << radians(*center_);
  return out.str();
}

double lambda_value(const LambdaIndex& counts, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const int order = counts[0] + counts[1] + counts[2] + counts[3];
  return std::ldexp(1.0, -order) * std::pow(1.0 + c, counts[0]) * std::pow(1.0 - c, counts[1]) *
         std::pow(-s, counts[2]) * std::pow(s, counts[3]);
}

std::map<LambdaIndex, double> lambda_expectations(const AngleDistribution& dist, int order) {
  if (order < 1) throw std::invalid_argument("N-fold order must be >= 1");
  if (std::holds_alternative<TabulatedLaw>(dist.law())) {
    throw std::invalid_argument("N-fold coefficients need the full law, not tabulated moments");
  }
  std::map<LambdaIndex, double> out;
  for (int m0 = 0; m0 <= order; ++m0) {
    for (int m1 = 0; m0 + m1 <= order; ++m1) {
      for (int m2 = 0; m0 + m1 + m2 <= order; ++m2) {
        const LambdaIndex idx{m0, m1, m2, order - m0 - m1 - m2};
        out[idx] = dist.expectation([&idx](double t) { return lambda_value(idx, t); });
      }
    }
  }
  return out;
}

}  // namespace cliffvar
