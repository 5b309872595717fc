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

#include <cmath>

#include <gtest/gtest.h>

#include "qbath/config.hpp"
#include "qbath/diagnostics.hpp"
#include "qbath/states.hpp"

namespace qbath {
namespace {

TEST(PlusState, EntriesPurityEntropy) {
  const DensityMatrix p = plus_state();
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) EXPECT_EQ(p.matrix()(i, j), Complex(0.5, 0.0));
  EXPECT_NEAR(p.purity(), 1.0, 1e-15);
  EXPECT_NEAR(von_neumann_entropy(p), 0.0, 1e-12);
}

TEST(ThermalOccupation, ClosedForm) {
  EXPECT_NEAR(thermal_occupation(1.0, 1.0), 0.582, 5e-4);
  EXPECT_NEAR(thermal_occupation(1.0, 1.0), 1.0 / (std::exp(1.0) - 1.0), 1e-15);
  EXPECT_NEAR(thermal_occupation(2.0, 1.0), 0.1565, 5e-5);
  double prev = thermal_occupation(0.5, 1.0);
  for (double beta = 1.0; beta <= 50.0; beta += 1.0) {
    const double n = thermal_occupation(beta, 1.0);
    EXPECT_LT(n, prev);
    prev = n;
  }
  EXPECT_LT(prev, 1e-20);
  EXPECT_THROW(thermal_occupation(0.0, 1.0), DomainError);
}

TEST(ThermalQubitState, PopulationsAndEntropy) {
  const DensityMatrix t = thermal_qubit_state(1.0, 1.0);
  EXPECT_NEAR(t.matrix()(0, 0).real(), 0.2689, 5e-5);
  EXPECT_NEAR(t.matrix()(1, 1).real(), 0.7311, 5e-5);
  EXPECT_EQ(t.matrix()(0, 1), Complex(0.0, 0.0));
  EXPECT_NEAR(von_neumann_entropy(t), 0.582, 5e-4);
  const DensityMatrix hot = thermal_qubit_state(0.0, 1.0);
  EXPECT_NEAR(hot.matrix()(0, 0).real(), 0.5, 1e-15);
}

TEST(ThermalQubitStateProperty, BoltzmannRatio) {
  for (double beta : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    for (double omega : {0.3, 1.0, 2.0}) {
      const ComplexMatrix m = thermal_qubit_state(beta, omega).matrix();
      EXPECT_NEAR(m(0, 0).real() / m(1, 1).real(), std::exp(-beta * omega), 1e-13);
      EXPECT_NEAR(m.trace().real(), 1.0, 1e-15);
    }
  }
}

TEST(DensityMatrix, RejectsInvalidMatrices) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 0.5;
  m(1, 1) = 0.4;
  EXPECT_THROW(DensityMatrix{m}, DomainError);  // trace
  m(1, 1) = 0.5;
  m(0, 1) = 0.3;
  EXPECT_THROW(DensityMatrix{m}, DomainError);  // not Hermitian
  m(1, 0) = 0.3;
  EXPECT_NO_THROW(DensityMatrix{m});
  m(0, 1) = m(1, 0) = 0.7;
  EXPECT_THROW(DensityMatrix{m}, DomainError);  // eigenvalue -0.2
  EXPECT_THROW(DensityMatrix{ComplexMatrix(2, 3)}, DomainError);
}

TEST(Kron, MatchesBlockStructure) {
  ComplexMatrix a(2, 2);
  a << 1.0, 2.0, Complex(0.0, 1.0), 3.0;
  ComplexMatrix b = ComplexMatrix::Identity(2, 2);
  b(0, 1) = 4.0;
  const ComplexMatrix k = kron(a, b);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) EXPECT_EQ(k(2 * i + p, 2 * j + q), a(i, j) * b(p, q));
}

TEST(InitialProductState, SingleQubitIsUnchanged) {
  BathTopology t;
  t.n_qubits = 1;
  t.omega = {1.0};
  const DensityMatrix r = initial_product_state(plus_state(), t);
  EXPECT_LT((r.matrix() - plus_state().matrix()).norm(), 1e-15);
}

TEST(InitialProductState, MarginalsAndEntropy) {
  const BathTopology tri = preset("triangle-weak").topology();
  const DensityMatrix r3 = initial_product_state(plus_state(), tri);
  EXPECT_EQ(r3.dim(), 8);
  EXPECT_LT((partial_trace(r3, {0}, 3).matrix() - plus_state().matrix()).norm(), 1e-12);
  EXPECT_LT((partial_trace(r3, {2}, 3).matrix() - thermal_qubit_state(1.0, 1.0).matrix()).norm(), 1e-12);

  const BathTopology six = preset("non-markovian").topology();
  const DensityMatrix r6 = initial_product_state(plus_state(), six);
  EXPECT_NEAR(von_neumann_entropy(r6), 5.0 * von_neumann_entropy(thermal_qubit_state(1.0, 1.0)), 1e-10);
  EXPECT_NEAR(von_neumann_entropy(r6), 2.910, 5e-3);
}

TEST(InitialProductStateProperty, FactorsAreUncorrelated) {
  const BathTopology six = preset("case1-dissipative").topology();
  const DensityMatrix r = initial_product_state(plus_state(), six);
  const PhysicalityReport rep = inspect_state(r.matrix());
  EXPECT_TRUE(rep.within(1e-10, 1e-10, 1e-8));
  for (NodeId a = 0; a < 6; ++a) {
    for (NodeId b = a + 1; b < 6; ++b) {
      const DensityMatrix pair = partial_trace(r, {a, b}, 6);
      EXPECT_NEAR(mutual_information(pair, {0}, 2), 0.0, 1e-10) << a << "," << b;
    }
  }
}

TEST(InitialProductState, RejectsWrongSystemDimension) {
  const BathTopology tri = preset("triangle-weak").topology();
  EXPECT_THROW(initial_product_state(basis_state(4, 0), tri), DomainError);
}

}  // namespace
}  // namespace qbath
