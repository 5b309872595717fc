// Copyright 2026 The qbath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QBATH_NONHERMITIAN_HPP
#define QBATH_NONHERMITIAN_HPP

#include <span>
#include <vector>

#include "qbath/core.hpp"
#include "qbath/lindblad.hpp"

namespace qbath {

/// H - (i/2) sum_k L_k^dagger L_k.
OperatorMatrix effective_hamiltonian(const OperatorMatrix& h, std::span<const CollapseOperator> collapse);

/// Eigenvalues with column-aligned right and left eigenvectors.
///
/// Left vectors come from the eigenvectors of H^dagger, matched to right vectors by nearest
/// conjugated eigenvalue. Inside clusters of eigenvalues closer than kClusterTolerance the
/// pairing is ambiguous: the right vectors are orthonormalized and the left vectors replaced by
/// their dual basis within the cluster; those modes are flagged.
struct EigenSystem {
  static constexpr double kClusterTolerance = 1e-10;

  ComplexVector eigenvalues;
  ComplexMatrix right;
  ComplexMatrix left;
  std::vector<bool> ambiguous;
  double max_residual = 0.0;  ///< max_k ||H R_k - lambda_k R_k|| / ||H||
};

EigenSystem eigensystem(const OperatorMatrix& h_eff);

/// min_{m != n} |lambda_m - lambda_n|.
double deps(const OperatorMatrix& h_eff);
double deps(const ComplexVector& eigenvalues);

struct PetermannResult {
  static constexpr double kSentinel = 1e24;

  std::vector<double> factors;
  double k_max = 0.0;
  /// Modes whose normalized overlap |<L|R>| fell below 1e-12; their factor is kSentinel.
  std::vector<bool> ep_flag;
  bool any_flagged() const;
};

/// K_k = ||L_k||^2 ||R_k||^2 / |<L_k|R_k>|^2.
PetermannResult petermann_factors(const OperatorMatrix& h_eff);
PetermannResult petermann_factors(const EigenSystem& es);

}  // namespace qbath

#endif  // QBATH_NONHERMITIAN_HPP
