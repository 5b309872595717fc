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

#ifndef QBATH_STATES_HPP
#define QBATH_STATES_HPP

#include "qbath/core.hpp"
#include "qbath/qubit_algebra.hpp"

namespace qbath {

/// Deviation of a matrix from the density-matrix invariants.
struct PhysicalityReport {
  double hermiticity = 0.0;    ///< max |rho - rho^dagger|
  double trace_error = 0.0;    ///< |Tr rho - 1|
  double min_eigenvalue = 0.0;

  bool within(double herm_tol, double trace_tol, double eig_tol) const {
    return hermiticity <= herm_tol && trace_error <= trace_tol && min_eigenvalue >= -eig_tol;
  }
};

PhysicalityReport inspect_state(const ComplexMatrix& rho);

/// Hermitian, unit-trace, positive semidefinite matrix.
///
/// The checked constructor enforces hermiticity to 1e-10, |Tr - 1| <= 1e-10 and
/// lambda_min >= -1e-8. `trusted` skips the eigenvalue check for hot loops whose
/// callers have already validated the state.
class DensityMatrix {
 public:
  static constexpr double kHermiticityTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityTol = 1e-8;

  explicit DensityMatrix(ComplexMatrix rho);
  static DensityMatrix trusted(ComplexMatrix rho);

  const ComplexMatrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }
  /// log2(dim) when dim is a power of two, otherwise -1.
  int n_qubits() const;
  double purity() const;

 private:
  struct Unchecked {};
  DensityMatrix(ComplexMatrix rho, Unchecked) : rho_(std::move(rho)) {}
  ComplexMatrix rho_;
};

/// |+><+| with all entries 1/2.
DensityMatrix plus_state();

/// Pure basis-state projector |k><k| on a register of given dimension.
DensityMatrix basis_state(Eigen::Index dim, Eigen::Index k);

/// Bose occupation 1 / (exp(beta omega) - 1).
double thermal_occupation(double beta, double omega);

/// exp(-beta H_q) / Z with H_q = (omega/2) sigma_z; diag(e^{-x/2}, e^{x/2}) / (2 cosh(x/2)), x = beta omega.
DensityMatrix thermal_qubit_state(double beta, double omega);

/// Places `system_state` on every logical node and a thermal state (at that node's omega)
/// on every bath node, as a tensor product in node order.
DensityMatrix initial_product_state(const DensityMatrix& system_state, const BathTopology& topo);

/// Kronecker product a (x) b, a being the more significant factor.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qbath

#endif  // QBATH_STATES_HPP
