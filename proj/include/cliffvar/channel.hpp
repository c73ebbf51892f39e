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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cliffvar/angle_distribution.hpp"
#include "cliffvar/gates.hpp"

namespace cliffvar {

/// One branch of a channel decomposition. Gates act on local qubits
/// 0..order-1; local qubit 1 is the copy-B partner in a doubled circuit.
struct MixtureTerm {
  double weight = 0.0;
  std::vector<CliffordGate> gates;
  std::string label;
};

/// Signed Clifford mixture of a random Z rotation's 1- or 2-fold channel.
class CliffordMixture {
 public:
  CliffordMixture(int order, std::vector<MixtureTerm> terms);

  int order() const { return order_; }
  const std::vector<MixtureTerm>& terms() const { return terms_; }
  bool is_convex() const { return convex_; }
  /// Sum of |weight|.
  double gamma() const { return gamma_; }
  /// |weight| / gamma per term.
  const std::vector<double>& probabilities() const { return probs_; }
  double sign(std::size_t j) const { return terms_[j].weight < 0 ? -1.0 : 1.0; }

  /// Index of a term drawn with probabilities(); consumes one 64-bit draw.
  std::size_t draw(std::mt19937_64& rng) const;

 private:
  int order_;
  std::vector<MixtureTerm> terms_;
  bool convex_ = true;
  double gamma_ = 0.0;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

/// (1+r1)/2 I + (1-r1)/2 Z + s1/2 S - s1/2 Sdg, for a recentred law.
CliffordMixture one_fold(const AngleDistribution& dist);

/// Four-term form when s1 = s2 = 0, twelve-term signed form otherwise.
CliffordMixture two_fold(const AngleDistribution& dist);

/// (1 + r2)/2 >= |r1|; meaningful for laws even about 0.
bool check_convexity_condition(const AngleDistribution& dist);

struct NFoldCoefficients {
  int order = 0;
  /// Ordered index (i_1..i_N) in {0,1,2,3}^N with gate U_0=I, U_1=Z, U_2=Sdg, U_3=S.
  std::vector<std::vector<int>> indices;
  std::vector<double> values;
  /// Every coefficient >= -1e-14 (sufficient, not necessary, for convexity).
  bool sufficient_convex = false;

  std::vector<MixtureTerm> as_terms() const;
};

NFoldCoefficients n_fold_coefficients(const AngleDistribution& dist, int order);

/// Superoperator on column-stacked d x d density matrices, d = 2^order:
/// vec(U rho U^dag) = (conj(U) kron U) vec(rho).
Eigen::MatrixXcd reconstruct_dense_channel(const std::vector<MixtureTerm>& terms, int order);
Eigen::MatrixXcd reconstruct_dense_channel(const CliffordMixture& mixture);
Eigen::MatrixXcd reconstruct_dense_channel(const NFoldCoefficients& coefficients);

/// Superoperator of R_Z(theta)^{(x) order}.
Eigen::MatrixXcd rotation_superoperator(double theta, int order);

}  // namespace cliffvar
