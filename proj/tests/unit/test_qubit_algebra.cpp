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

#include <algorithm>
#include <set>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "qbath/config.hpp"
#include "qbath/qubit_algebra.hpp"

namespace qbath {
namespace {

// Kronecker product written out index by index.
ComplexMatrix kron_oracle(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

ComplexMatrix embed(const ComplexMatrix& single, NodeId site, int n) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int q = 0; q < n; ++q) out = kron_oracle(out, q == site ? single : ComplexMatrix::Identity(2, 2));
  return out;
}

TEST(PauliAlgebra, ProductsAndSquares) {
  const ComplexMatrix x = pauli_matrix(PauliAxis::X);
  const ComplexMatrix y = pauli_matrix(PauliAxis::Y);
  const ComplexMatrix z = pauli_matrix(PauliAxis::Z);
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  EXPECT_LT((x * x - id).norm(), 1e-15);
  EXPECT_LT((y * y - id).norm(), 1e-15);
  EXPECT_LT((z * z - id).norm(), 1e-15);
  EXPECT_LT((x * y - kI * z).norm(), 1e-15);
  EXPECT_LT((y * z - kI * x).norm(), 1e-15);
  EXPECT_LT((z * x - kI * y).norm(), 1e-15);
  EXPECT_EQ(z(0, 0), Complex(1.0, 0.0));
}

TEST(LiftPauli, MatchesExplicitKronecker) {
  for (int n = 1; n <= 4; ++n) {
    for (NodeId site = 0; site < n; ++site) {
      for (PauliAxis a : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
        EXPECT_LT((lift_pauli(a, site, n) - embed(pauli_matrix(a), site, n)).norm(), 1e-15)
            << "n=" << n << " site=" << site;
      }
    }
  }
}

TEST(LiftPauli, RejectsBadSite) {
  EXPECT_THROW(lift_pauli(PauliAxis::X, 3, 3), DomainError);
  EXPECT_THROW(lift_pauli(PauliAxis::X, -1, 3), DomainError);
  EXPECT_THROW(lift_pauli(PauliAxis::X, 0, 0), DomainError);
}

TEST(LadderOperators, LoweringTakesZeroToOne) {
  const OperatorMatrix lower = lift_lowering(0, 1);
  ComplexVector e0 = ComplexVector::Zero(2);
  e0(0) = 1.0;
  const ComplexVector out = lower * e0;
  EXPECT_NEAR(std::abs(out(1)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(out(0)), 0.0, 1e-15);
  EXPECT_LT((lift_raising(1, 3) - lift_lowering(1, 3).adjoint()).norm(), 1e-15);
  const ComplexMatrix sm = 0.5 * (pauli_matrix(PauliAxis::X) - kI * pauli_matrix(PauliAxis::Y));
  EXPECT_LT((lift_lowering(2, 3) - embed(sm, 2, 3)).norm(), 1e-15);
}

BathTopology pair_topology(double j) {
  BathTopology t;
  t.n_qubits = 2;
  t.omega = {1.0, 1.0};
  t.edges = {Coupling::isotropic(0, 1, j)};
  return t;
}

TEST(Hamiltonian, TwoQubitMatrixElements) {
  const OperatorMatrix h = build_interaction_hamiltonian(pair_topology(1.0));
  // |01> is index 1, |10> is index 2.
  EXPECT_NEAR(h(1, 1).real(), -1.0, 1e-14);
  EXPECT_NEAR(h(1, 2).real(), 2.0, 1e-14);
  EXPECT_NEAR(h(0, 0).real(), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(h(0, 3)), 0.0, 1e-14);
}

TEST(Hamiltonian, LocalTermIsHalfOmegaSigmaZ) {
  BathTopology t = pair_topology(0.0);
  t.omega = {1.0, 3.0};
  const OperatorMatrix h = build_local_hamiltonian(t);
  EXPECT_NEAR(h(0, 0).real(), 2.0, 1e-14);   // |00>: 0.5 + 1.5
  EXPECT_NEAR(h(1, 1).real(), -1.0, 1e-14);  // |01>: 0.5 - 1.5
  EXPECT_NEAR(h(3, 3).real(), -2.0, 1e-14);
}

TEST(Hamiltonian, HeisenbergTriangleSpectrum) {
  BathTopology t;
  t.n_qubits = 3;
  t.omega = {1.0, 1.0, 1.0};
  const double j = 0.7;
  t.edges = {Coupling::isotropic(0, 1, j), Coupling::isotropic(0, 2, j), Coupling::isotropic(1, 2, j)};
  // sum_{i<j} sigma_i . sigma_j = 2 S(S+1) - 9/2: +3 on the quartet, -3 on both doublets.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(build_interaction_hamiltonian(t));
  const RealVector ev = es.eigenvalues();
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(ev(k), -3.0 * j, 1e-12);
  for (int k = 4; k < 8; ++k) EXPECT_NEAR(ev(k), 3.0 * j, 1e-12);
}

TEST(Hamiltonian, TrianglePresetIsHermitian) {
  const OperatorMatrix h = build_total_hamiltonian(preset("triangle-weak").topology());
  EXPECT_EQ(h.rows(), 8);
  EXPECT_LT(hermiticity_defect(h), 1e-12);
}

TEST(Hamiltonian, SixQubitEdgeSet) {
  const BathTopology t = preset("case1-dissipative").topology();
  std::set<std::pair<int, int>> edges;
  for (const Coupling& e : t.edges) edges.insert(std::minmax(e.i, e.j));
  const std::set<std::pair<int, int>> expected = {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {1, 4},
                                                  {2, 4}, {2, 5}, {3, 4}, {4, 5}};
  EXPECT_EQ(edges, expected);
}

TEST(Hamiltonian, AnisotropicCouplingSplitsAxes) {
  BathTopology t = pair_topology(0.0);
  t.edges = {{0, 1, 0.1, 0.2, 0.3}};
  const OperatorMatrix expected = 0.1 * embed(pauli_matrix(PauliAxis::X), 0, 2) * embed(pauli_matrix(PauliAxis::X), 1, 2) +
                                  0.2 * embed(pauli_matrix(PauliAxis::Y), 0, 2) * embed(pauli_matrix(PauliAxis::Y), 1, 2) +
                                  0.3 * embed(pauli_matrix(PauliAxis::Z), 0, 2) * embed(pauli_matrix(PauliAxis::Z), 1, 2);
  EXPECT_LT((build_interaction_hamiltonian(t) - expected).norm(), 1e-15);
}

TEST(HamiltonianProperty, IsotropicCouplingConservesMagnetization) {
  for (const char* name : {"triangle-weak", "case1-dissipative", "non-markovian", "two-logical-qubits"}) {
    const BathTopology t = preset(name).topology();
    const OperatorMatrix h = build_total_hamiltonian(t);
    const OperatorMatrix m = total_magnetization(t.n_qubits);
    EXPECT_LT((h * m - m * h).norm(), 1e-11) << name;
    EXPECT_LT(hermiticity_defect(h), 1e-12) << name;
  }
}

TEST(TopologyValidation, RejectsInvalidInput) {
  BathTopology t = pair_topology(1.0);
  EXPECT_NO_THROW(t.validate());
  BathTopology bad = t;
  bad.edges = {Coupling::isotropic(0, 0, 1.0)};
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = t;
  bad.edges = {Coupling::isotropic(0, 2, 1.0)};
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = t;
  bad.thermal = {{1, -0.1}};
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = t;
  bad.omega = {1.0};
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = t;
  bad.n_qubits = 11;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Topology, BathNodesExcludeLogicalNodes) {
  const BathTopology t = preset("two-logical-qubits").topology();
  EXPECT_EQ(t.logical_nodes(), (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(t.bath_nodes(), (std::vector<NodeId>{2, 3, 4, 5, 6}));
  const BathTopology six = preset("case2-retained").topology();
  EXPECT_EQ(six.bath_nodes(), (std::vector<NodeId>{1, 2, 3, 4, 5}));
}

}  // namespace
}  // namespace qbath
