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

#include "qbath/states.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qbath {

PhysicalityReport inspect_state(const ComplexMatrix& rho) {
  PhysicalityReport r;
  r.hermiticity = hermiticity_defect(rho);
  r.trace_error = std::abs(rho.trace() - Complex{1.0, 0.0});
  const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = solver.eigenvalues().minCoeff();
  return r;
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() == 0 || rho_.rows() != rho_.cols()) {
    throw DomainError("density matrix must be square and non-empty");
  }
  const PhysicalityReport r = inspect_state(rho_);
  if (!r.within(kHermiticityTol, kTraceTol, kPositivityTol)) {
    std::ostringstream msg;
    msg << "not a density matrix: hermiticity " << r.hermiticity << ", trace error " << r.trace_error
        << ", min eigenvalue " << r.min_eigenvalue;
    throw DomainError(msg.str());
  }
}

DensityMatrix DensityMatrix::trusted(ComplexMatrix rho) { return DensityMatrix(std::move(rho), Unchecked{}); }

int DensityMatrix::n_qubits() const {
  const Eigen::Index d = dim();
  int n = 0;
  while ((Eigen::Index{1} << n) < d) ++n;
  return (Eigen::Index{1} << n) == d ? n : -1;
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

DensityMatrix plus_state() { return DensityMatrix(ComplexMatrix::Constant(2, 2, Complex{0.5, 0.0})); }

DensityMatrix basis_state(Eigen::Index dim, Eigen::Index k) {
  if (k < 0 || k >= dim) throw DomainError("basis index out of range");
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return DensityMatrix::trusted(std::move(m));
}

double thermal_occupation(double beta, double omega) {
  const double x = beta * omega;
  if (!(x > 0.0)) throw DomainError("thermal occupation diverges for beta*omega <= 0");
  return 1.0 / std::expm1(x);
}

DensityMatrix thermal_qubit_state(double beta, double omega) {
  if (!(beta >= 0.0) || !(omega > 0.0)) throw DomainError("thermal state needs beta >= 0 and omega > 0");
  const double x = beta * omega;
  // Populations written as logistic functions to stay finite for large beta*omega.
  const double excited = 1.0 / (1.0 + std::exp(x));
  const double ground = 1.0 / (1.0 + std::exp(-x));
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = excited;
  m(1, 1) = ground;
  return DensityMatrix::trusted(std::move(m));
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix initial_product_state(const DensityMatrix& system_state, const BathTopology& topo) {
  if (system_state.dim() != 2) {
    throw DomainError("system state must be a single-qubit (2x2) density matrix, got dim " +
                      std::to_string(system_state.dim()));
  }
  topo.validate();
  ComplexMatrix rho = ComplexMatrix::Ones(1, 1);
  for (NodeId node = 0; node < topo.n_qubits; ++node) {
    if (topo.is_bath_node(node)) {
      rho = kron(rho, thermal_qubit_state(topo.beta, topo.omega[static_cast<std::size_t>(node)]).matrix());
    } else {
      rho = kron(rho, system_state.matrix());
    }
  }
  return DensityMatrix::trusted(std::move(rho));
}

}  // namespace qbath
