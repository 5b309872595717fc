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

#include "qbath/nonhermitian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace qbath {
namespace {

constexpr double kOverlapFloor = 1e-12;

// Connected components of the "closer than tol" relation on eigenvalues.
std::vector<std::vector<int>> clusters(const ComplexVector& lambda, double tol) {
  const int n = static_cast<int>(lambda.size());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
    return i;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(lambda(i) - lambda(j)) < tol) parent[static_cast<std::size_t>(find(j))] = find(i);
    }
  }
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) groups[static_cast<std::size_t>(find(i))].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& g : groups) {
    if (!g.empty()) out.push_back(std::move(g));
  }
  return out;
}

}  // namespace

OperatorMatrix effective_hamiltonian(const OperatorMatrix& h, std::span<const CollapseOperator> collapse) {
  if (h.rows() != h.cols()) throw DomainError("Hamiltonian must be square");
  OperatorMatrix heff = h;
  for (const CollapseOperator& c : collapse) {
    if (c.op.rows() != h.rows() || c.op.cols() != h.cols()) {
      throw DomainError("collapse operator dimension does not match the Hamiltonian");
    }
    heff -= 0.5 * kI * (c.op.adjoint() * c.op);
  }
  return heff;
}

EigenSystem eigensystem(const OperatorMatrix& h_eff) {
  if (h_eff.rows() != h_eff.cols() || h_eff.rows() == 0) throw DomainError("eigensystem needs a square matrix");
  const Eigen::Index n = h_eff.rows();
  Eigen::ComplexEigenSolver<ComplexMatrix> right_solver(h_eff);
  Eigen::ComplexEigenSolver<ComplexMatrix> left_solver(h_eff.adjoint());
  if (right_solver.info() != Eigen::Success || left_solver.info() != Eigen::Success) {
    throw DomainError("eigen decomposition did not converge");
  }

  EigenSystem es;
  es.eigenvalues = right_solver.eigenvalues();
  es.right = right_solver.eigenvectors();
  for (Eigen::Index k = 0; k < n; ++k) es.right.col(k).normalize();

  // Greedy nearest matching of conj(mu_j) to lambda_k, globally by ascending distance.
  const ComplexVector mu = left_solver.eigenvalues().conjugate();
  std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> candidates;
  candidates.reserve(static_cast<std::size_t>(n * n));
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) candidates.emplace_back(std::abs(es.eigenvalues(k) - mu(j)), k, j);
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<Eigen::Index> match(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  Eigen::Index assigned = 0;
  for (const auto& [dist, k, j] : candidates) {
    if (match[static_cast<std::size_t>(k)] >= 0 || used[static_cast<std::size_t>(j)]) continue;
    match[static_cast<std::size_t>(k)] = j;
    used[static_cast<std::size_t>(j)] = true;
    if (++assigned == n) break;
  }
  es.left.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    es.left.col(k) = left_solver.eigenvectors().col(match[static_cast<std::size_t>(k)]).normalized();
  }

  es.ambiguous.assign(static_cast<std::size_t>(n), false);
  for (const std::vector<int>& group : clusters(es.eigenvalues, EigenSystem::kClusterTolerance)) {
    if (group.size() < 2) continue;
    const auto m = static_cast<Eigen::Index>(group.size());
    ComplexMatrix rc(n, m);
    ComplexMatrix lc(n, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      rc.col(a) = es.right.col(group[static_cast<std::size_t>(a)]);
      lc.col(a) = es.left.col(group[static_cast<std::size_t>(a)]);
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(rc);
    const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, m);
    // Keep the orthonormalized basis only if it still spans eigenvectors.
    const ComplexMatrix resid = h_eff * q - q * es.eigenvalues(group[0]);
    if (resid.norm() <= 1e-8 * std::max(1.0, h_eff.norm())) rc = q;
    const ComplexMatrix overlap = lc.adjoint() * rc;
    Eigen::FullPivLU<ComplexMatrix> lu(overlap);
    if (lu.isInvertible()) lc = lc * lu.inverse().adjoint();
    for (Eigen::Index a = 0; a < m; ++a) {
      const int k = group[static_cast<std::size_t>(a)];
      es.right.col(k) = rc.col(a);
      es.left.col(k) = lc.col(a);
      es.ambiguous[static_cast<std::size_t>(k)] = true;
    }
  }

  const double scale = std::max(h_eff.norm(), std::numeric_limits<double>::min());
  for (Eigen::Index k = 0; k < n; ++k) {
    const double r = (h_eff * es.right.col(k) - es.eigenvalues(k) * es.right.col(k)).norm() / scale;
    es.max_residual = std::max(es.max_residual, r);
  }
  return es;
}

double deps(const ComplexVector& eigenvalues) {
  const Eigen::Index n = eigenvalues.size();
  if (n < 2) throw DomainError("DEPS needs at least two eigenvalues");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) best = std::min(best, std::abs(eigenvalues(i) - eigenvalues(j)));
  }
  return best;
}

double deps(const OperatorMatrix& h_eff) {
  if (h_eff.rows() != h_eff.cols()) throw DomainError("DEPS needs a square matrix");
  if (h_eff.rows() < 2) throw DomainError("DEPS needs dimension >= 2");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(h_eff, false);
  if (solver.info() != Eigen::Success) throw DomainError("eigen decomposition did not converge");
  return deps(solver.eigenvalues());
}

bool PetermannResult::any_flagged() const { return std::find(ep_flag.begin(), ep_flag.end(), true) != ep_flag.end(); }

PetermannResult petermann_factors(const EigenSystem& es) {
  const Eigen::Index n = es.eigenvalues.size();
  PetermannResult r;
  r.factors.resize(static_cast<std::size_t>(n));
  r.ep_flag.assign(static_cast<std::size_t>(n), false);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double nl = es.left.col(k).squaredNorm();
    const double nr = es.right.col(k).squaredNorm();
    const double overlap = std::abs(es.left.col(k).dot(es.right.col(k)));
    const double normalized = overlap / std::sqrt(nl * nr);
    double value = PetermannResult::kSentinel;
    if (normalized >= kOverlapFloor) {
      value = std::min(PetermannResult::kSentinel, nl * nr / (overlap * overlap));
    } else {
      r.ep_flag[static_cast<std::size_t>(k)] = true;
    }
    r.factors[static_cast<std::size_t>(k)] = value;
    r.k_max = std::max(r.k_max, value);
  }
  return r;
}

PetermannResult petermann_factors(const OperatorMatrix& h_eff) { return petermann_factors(eigensystem(h_eff)); }

}  // namespace qbath
