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

#include "qbath/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qbath {
namespace {

constexpr double kEntropyFloor = 1e-14;
constexpr double kPsdTolerance = 1e-8;

Eigen::Index checked_dim(const ComplexMatrix& rho, int n_qubits) {
  if (n_qubits < 1 || n_qubits > 16) throw DomainError("n_qubits out of range");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (rho.rows() != dim || rho.cols() != dim) {
    throw DomainError("state dimension " + std::to_string(rho.rows()) + " does not match " +
                      std::to_string(n_qubits) + " qubits");
  }
  return dim;
}

std::vector<NodeId> sorted_nodes(const std::vector<NodeId>& nodes, int n_qubits) {
  std::set<NodeId> unique;
  for (NodeId node : nodes) {
    if (node < 0 || node >= n_qubits) throw DomainError("node " + std::to_string(node) + " out of range");
    if (!unique.insert(node).second) throw DomainError("node " + std::to_string(node) + " listed twice");
  }
  return {unique.begin(), unique.end()};
}

std::vector<NodeId> proper_partition(const std::vector<NodeId>& partition, int n_qubits) {
  std::vector<NodeId> a = sorted_nodes(partition, n_qubits);
  if (a.empty() || static_cast<int>(a.size()) == n_qubits) {
    throw DomainError("partition must be a nonempty proper subset of the register");
  }
  return a;
}

std::vector<NodeId> complement(const std::vector<NodeId>& a, int n_qubits) {
  std::vector<NodeId> out;
  for (NodeId node = 0; node < n_qubits; ++node) {
    if (!std::binary_search(a.begin(), a.end(), node)) out.push_back(node);
  }
  return out;
}

// Bit mask of `nodes` in the full register index (node 0 is the most significant bit).
std::size_t node_mask(const std::vector<NodeId>& nodes, int n_qubits) {
  std::size_t mask = 0;
  for (NodeId node : nodes) mask |= std::size_t{1} << (n_qubits - 1 - node);
  return mask;
}

// Scatters the bits of `local` (most significant first) onto the register positions of `nodes`.
std::size_t scatter(std::size_t local, const std::vector<NodeId>& nodes, int n_qubits) {
  std::size_t out = 0;
  const std::size_t k = nodes.size();
  for (std::size_t b = 0; b < k; ++b) {
    if ((local >> (k - 1 - b)) & 1U) out |= std::size_t{1} << (n_qubits - 1 - nodes[b]);
  }
  return out;
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
  if (solver.eigenvalues().minCoeff() < -kPsdTolerance) {
    throw DomainError("fidelity needs positive semidefinite inputs, min eigenvalue " +
                      std::to_string(solver.eigenvalues().minCoeff()));
  }
  const Eigen::VectorXd root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().adjoint();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& rho, const std::vector<NodeId>& keep, int n_qubits) {
  checked_dim(rho, n_qubits);
  const std::vector<NodeId> kept = sorted_nodes(keep, n_qubits);
  if (kept.empty()) throw DomainError("partial trace needs at least one kept node");
  const std::vector<NodeId> traced = complement(kept, n_qubits);
  const std::size_t dk = std::size_t{1} << kept.size();
  const std::size_t dt = std::size_t{1} << traced.size();

  std::vector<std::size_t> env(dt);
  for (std::size_t e = 0; e < dt; ++e) env[e] = scatter(e, traced, n_qubits);
  std::vector<std::size_t> sub(dk);
  for (std::size_t i = 0; i < dk; ++i) sub[i] = scatter(i, kept, n_qubits);

  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t j = 0; j < dk; ++j) {
    for (std::size_t i = 0; i < dk; ++i) {
      Complex acc{0.0, 0.0};
      for (std::size_t e = 0; e < dt; ++e) {
        acc += rho(static_cast<Eigen::Index>(sub[i] | env[e]), static_cast<Eigen::Index>(sub[j] | env[e]));
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<NodeId>& keep, int n_qubits) {
  return DensityMatrix::trusted(partial_trace(rho.matrix(), keep, n_qubits));
}

ComplexMatrix partial_transpose(const ComplexMatrix& rho, const std::vector<NodeId>& partition, int n_qubits) {
  const Eigen::Index dim = checked_dim(rho, n_qubits);
  const std::size_t mask = node_mask(sorted_nodes(partition, n_qubits), n_qubits);
  ComplexMatrix out(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      const auto ur = static_cast<std::size_t>(r);
      const auto uc = static_cast<std::size_t>(c);
      const std::size_t nr = (ur & ~mask) | (uc & mask);
      const std::size_t nc = (uc & ~mask) | (ur & mask);
      out(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc)) = rho(r, c);
    }
  }
  return out;
}

double von_neumann_entropy(const ComplexMatrix& rho) {
  const Eigen::VectorXd lambda = hermitian_eigenvalues(rho);
  double s = 0.0;
  for (double l : lambda) {
    if (l > kEntropyFloor) s -= l * std::log(l);
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.matrix()); }

double uhlmann_fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw DomainError("fidelity arguments have different dimensions");
  }
  if (hermitian_eigenvalues(rho).minCoeff() < -kPsdTolerance) {
    throw DomainError("fidelity needs positive semidefinite inputs");
  }
  // Nuclear norm of sqrt(rho) sqrt(sigma).
  const ComplexMatrix product = psd_sqrt(rho) * psd_sqrt(sigma);
  const double tr = Eigen::JacobiSVD<ComplexMatrix>(product).singularValues().sum();
  return std::clamp(tr * tr, 0.0, 1.0);
}

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return uhlmann_fidelity(rho.matrix(), sigma.matrix());
}

double trace_distance(const ComplexMatrix& rho1, const ComplexMatrix& rho2) {
  if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols()) {
    throw DomainError("trace distance arguments have different dimensions");
  }
  return 0.5 * hermitian_eigenvalues(rho1 - rho2).cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  return trace_distance(rho1.matrix(), rho2.matrix());
}

int default_backflow_window(int n_points, Smoothing smoothing) {
  const double divisor = smoothing == Smoothing::SavitzkyGolay ? 100.0 : 200.0;
  int w = std::max(5, static_cast<int>(std::lround(n_points / divisor)));
  if (w % 2 == 0) ++w;
  return w;
}

std::vector<double> savitzky_golay(std::span<const double> y, int window, int polyorder) {
  const int n = static_cast<int>(y.size());
  if (window < 1 || window % 2 == 0) throw DomainError("Savitzky-Golay window must be odd and positive");
  if (polyorder < 0 || polyorder >= window) throw DomainError("Savitzky-Golay polyorder must be below the window");
  if (n < window) {
    throw DomainError("series of length " + std::to_string(n) + " is shorter than the window " +
                      std::to_string(window));
  }
  const int half = window / 2;
  // Least-squares projector on scaled abscissae x / half.
  RealMatrix vander(window, polyorder + 1);
  const double scale = half > 0 ? static_cast<double>(half) : 1.0;
  for (int i = 0; i < window; ++i) {
    const double x = (i - half) / scale;
    double p = 1.0;
    for (int k = 0; k <= polyorder; ++k, p *= x) vander(i, k) = p;
  }
  const RealMatrix projector = (vander.transpose() * vander).ldlt().solve(vander.transpose());
  auto weights_at = [&](int offset) {
    const double x = offset / scale;
    RealVector basis(polyorder + 1);
    double p = 1.0;
    for (int k = 0; k <= polyorder; ++k, p *= x) basis(k) = p;
    return RealVector(projector.transpose() * basis);
  };

  std::vector<double> out(static_cast<std::size_t>(n));
  const RealVector center = weights_at(0);
  for (int i = half; i < n - half; ++i) {
    double acc = 0.0;
    for (int j = 0; j < window; ++j) acc += center(j) * y[static_cast<std::size_t>(i - half + j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  for (int i = 0; i < half; ++i) {
    const RealVector head = weights_at(i - half);
    const RealVector tail = weights_at(half - i);
    double a = 0.0;
    double b = 0.0;
    for (int j = 0; j < window; ++j) {
      a += head(j) * y[static_cast<std::size_t>(j)];
      b += tail(j) * y[static_cast<std::size_t>(n - window + j)];
    }
    out[static_cast<std::size_t>(i)] = a;
    out[static_cast<std::size_t>(n - 1 - i)] = b;
  }
  return out;
}

std::vector<double> moving_average(std::span<const double> y, int window) {
  const int n = static_cast<int>(y.size());
  if (window < 1 || window % 2 == 0) throw DomainError("moving-average window must be odd and positive");
  if (n < window) {
    throw DomainError("series of length " + std::to_string(n) + " is shorter than the window " +
                      std::to_string(window));
  }
  const int half = window / 2;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += y[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc / (hi - lo + 1);
  }
  return out;
}

std::vector<double> gradient(std::span<const double> y, double h) {
  const std::size_t n = y.size();
  if (n < 2) throw DomainError("gradient needs at least 2 samples");
  std::vector<double> out(n);
  out[0] = (y[1] - y[0]) / h;
  out[n - 1] = (y[n - 1] - y[n - 2]) / h;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
  return out;
}

BackflowResult blp_backflow(std::span<const double> d, const TimeGrid& grid, const BackflowOptions& options) {
  grid.validate();
  const int n = static_cast<int>(d.size());
  if (n != grid.n_points) throw DomainError("series length does not match the grid");
  if (n < 5) throw DomainError("backflow needs at least 5 samples");
  if (!(options.tail_fraction > 0.0 && options.tail_fraction <= 1.0)) {
    throw DomainError("tail_fraction must lie in (0, 1]");
  }
  const int window = options.window > 0 ? options.window : default_backflow_window(n, options.smoothing);

  BackflowResult r;
  r.smoothed = options.smoothing == Smoothing::SavitzkyGolay ? savitzky_golay(d, window, options.polyorder)
                                                             : moving_average(d, window);
  const double h = grid.dt();
  r.derivative = gradient(r.smoothed, h);

  const auto tail_start = static_cast<std::size_t>(std::floor((1.0 - options.tail_fraction) * n));
  std::vector<double> tail;
  for (std::size_t i = tail_start; i < r.derivative.size(); ++i) tail.push_back(std::abs(r.derivative[i]));
  r.threshold = options.threshold_factor * median(std::move(tail));

  std::vector<double> kept(r.derivative.size(), 0.0);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (r.derivative[i] > r.threshold) kept[i] = r.derivative[i];
  }
  for (std::size_t i = 0; i + 1 < kept.size(); ++i) r.total += 0.5 * h * (kept[i] + kept[i + 1]);

  for (std::size_t i = 0; i < kept.size();) {
    if (kept[i] > 0.0) {
      std::size_t j = i;
      while (j + 1 < kept.size() && kept[j + 1] > 0.0) ++j;
      r.positive_intervals.emplace_back(grid.time(static_cast<int>(i)), grid.time(static_cast<int>(j)));
      i = j + 1;
    } else {
      ++i;
    }
  }
  r.rate = r.total / grid.span();
  return r;
}

double negativity(const DensityMatrix& rho, const std::vector<NodeId>& partition_a, int n_qubits) {
  const std::vector<NodeId> a = proper_partition(partition_a, n_qubits);
  const ComplexMatrix pt = partial_transpose(rho.matrix(), a, n_qubits);
  const double norm = hermitian_eigenvalues(pt).cwiseAbs().sum();
  return std::max(0.0, 0.5 * (norm - 1.0));
}

double mutual_information(const DensityMatrix& rho, const std::vector<NodeId>& partition_a, int n_qubits) {
  const std::vector<NodeId> a = proper_partition(partition_a, n_qubits);
  const std::vector<NodeId> b = complement(a, n_qubits);
  return von_neumann_entropy(partial_trace(rho.matrix(), a, n_qubits)) +
         von_neumann_entropy(partial_trace(rho.matrix(), b, n_qubits)) - von_neumann_entropy(rho.matrix());
}

LocalEnergies local_energies(const DensityMatrix& rho, const BathTopology& topo) {
  topo.validate();
  checked_dim(rho.matrix(), topo.n_qubits);
  LocalEnergies e;
  e.per_node.assign(static_cast<std::size_t>(topo.n_qubits), 0.0);
  const Eigen::Index dim = rho.dim();
  for (Eigen::Index b = 0; b < dim; ++b) {
    const double p = rho.matrix()(b, b).real();
    for (NodeId site = 0; site < topo.n_qubits; ++site) {
      const bool excited_bit = (b >> (topo.n_qubits - 1 - site)) & 1;
      e.per_node[static_cast<std::size_t>(site)] +=
          0.5 * topo.omega[static_cast<std::size_t>(site)] * (excited_bit ? -p : p);
    }
  }
  for (double v : e.per_node) e.total += v;
  const OperatorMatrix h_int = build_interaction_hamiltonian(topo);
  e.interaction = rho.matrix().cwiseProduct(h_int.transpose()).sum().real();
  return e;
}

EnergyFlows energy_flows(const DensityMatrix& rho, const OperatorMatrix& h, std::span<const CollapseOperator> collapse) {
  const ComplexMatrix& r = rho.matrix();
  if (h.rows() != r.rows() || h.cols() != r.cols()) throw DomainError("Hamiltonian and state dimensions differ");
  EnergyFlows f;
  const ComplexMatrix coherent = -kI * (h * r - r * h);
  f.coherent = (h * coherent).trace().real();
  ComplexMatrix dissipator = ComplexMatrix::Zero(r.rows(), r.cols());
  for (const CollapseOperator& c : collapse) {
    const ComplexMatrix ldag_l = c.op.adjoint() * c.op;
    dissipator += c.op * r * c.op.adjoint() - 0.5 * (ldag_l * r + r * ldag_l);
  }
  f.dissipative = (h * dissipator).trace().real();
  return f;
}

}  // namespace qbath
