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

#include "qbath/qubit_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

namespace qbath {
namespace {

constexpr int kMaxQubits = 10;

void check_site(NodeId site, int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw DomainError("n_qubits must lie in [1, " + std::to_string(kMaxQubits) + "], got " +
                      std::to_string(n_qubits));
  }
  if (site < 0 || site >= n_qubits) {
    throw DomainError("site " + std::to_string(site) + " out of range for " + std::to_string(n_qubits) +
                      " qubits");
  }
}

// Single-site Pauli acting on a computational basis state: returns the image state and phase.
struct BasisImage {
  std::size_t state;
  Complex phase;
};

BasisImage apply_pauli(PauliAxis axis, NodeId site, int n_qubits, std::size_t basis) {
  const std::size_t mask = std::size_t{1} << (n_qubits - 1 - site);
  const bool excited_bit = (basis & mask) != 0;  // bit set means |1>
  switch (axis) {
    case PauliAxis::X:
      return {basis ^ mask, Complex{1.0, 0.0}};
    case PauliAxis::Y:
      return {basis ^ mask, excited_bit ? -kI : kI};
    case PauliAxis::Z:
      return {basis, Complex{excited_bit ? -1.0 : 1.0, 0.0}};
  }
  return {basis, Complex{0.0, 0.0}};
}

// Adds coeff * sigma_axis^{(i)} sigma_axis^{(j)} into h.
void add_pauli_pair(OperatorMatrix& h, PauliAxis axis, NodeId i, NodeId j, int n_qubits, double coeff) {
  if (coeff == 0.0) return;
  const std::size_t dim = std::size_t{1} << n_qubits;
  for (std::size_t col = 0; col < dim; ++col) {
    const BasisImage first = apply_pauli(axis, j, n_qubits, col);
    const BasisImage second = apply_pauli(axis, i, n_qubits, first.state);
    h(static_cast<Eigen::Index>(second.state), static_cast<Eigen::Index>(col)) +=
        coeff * first.phase * second.phase;
  }
}

}  // namespace

ComplexMatrix pauli_matrix(PauliAxis axis) {
  ComplexMatrix m(2, 2);
  switch (axis) {
    case PauliAxis::X:
      m << 0.0, 1.0, 1.0, 0.0;
      break;
    case PauliAxis::Y:
      m << 0.0, -kI, kI, 0.0;
      break;
    case PauliAxis::Z:
      m << 1.0, 0.0, 0.0, -1.0;
      break;
  }
  return m;
}

OperatorMatrix lift_pauli(PauliAxis axis, NodeId site, int n_qubits) {
  check_site(site, n_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  OperatorMatrix out = OperatorMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    const BasisImage img = apply_pauli(axis, site, n_qubits, col);
    out(static_cast<Eigen::Index>(img.state), static_cast<Eigen::Index>(col)) = img.phase;
  }
  return out;
}

OperatorMatrix lift_lowering(NodeId site, int n_qubits) {
  check_site(site, n_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  const std::size_t mask = std::size_t{1} << (n_qubits - 1 - site);
  OperatorMatrix out = OperatorMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    if ((col & mask) == 0) out(static_cast<Eigen::Index>(col | mask), static_cast<Eigen::Index>(col)) = 1.0;
  }
  return out;
}

OperatorMatrix lift_raising(NodeId site, int n_qubits) { return lift_lowering(site, n_qubits).adjoint(); }

void BathTopology::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw ValidationError("n_qubits must lie in [1, " + std::to_string(kMaxQubits) + "]");
  }
  auto in_range = [this](NodeId node) { return node >= 0 && node < n_qubits; };
  if (!in_range(system_index)) throw ValidationError("system_index out of range");
  for (NodeId node : system_nodes) {
    if (!in_range(node)) throw ValidationError("system node " + std::to_string(node) + " out of range");
  }
  if (!system_nodes.empty() &&
      std::find(system_nodes.begin(), system_nodes.end(), system_index) == system_nodes.end()) {
    throw ValidationError("system_nodes must contain system_index");
  }
  if (static_cast<int>(omega.size()) != n_qubits) {
    throw ValidationError("omega needs one entry per node (" + std::to_string(n_qubits) + "), got " +
                          std::to_string(omega.size()));
  }
  for (double w : omega) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("omega must be positive and finite");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be positive and finite");
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const Coupling& e : edges) {
    if (!in_range(e.i) || !in_range(e.j)) {
      throw ValidationError("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ") has a node out of range");
    }
    if (e.i == e.j) throw ValidationError("edge endpoints must differ, got self-loop on " + std::to_string(e.i));
    if (!std::isfinite(e.jx) || !std::isfinite(e.jy) || !std::isfinite(e.jz)) {
      throw ValidationError("edge coupling must be finite");
    }
    const auto key = std::minmax(e.i, e.j);
    if (!seen.insert(key).second) {
      throw ValidationError("duplicate edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) + ")");
    }
  }
  auto check_rates = [&](const std::vector<NodeRate>& rates, const char* label) {
    for (const NodeRate& r : rates) {
      if (!in_range(r.site)) throw ValidationError(std::string(label) + " site out of range");
      if (!(r.rate >= 0.0) || !std::isfinite(r.rate)) {
        throw ValidationError(std::string(label) + " gamma must be >= 0, got " + std::to_string(r.rate));
      }
    }
  };
  check_rates(dephasing, "dephasing");
  check_rates(thermal, "thermal");
}

std::vector<NodeId> BathTopology::logical_nodes() const {
  if (system_nodes.empty()) return {system_index};
  return system_nodes;
}

bool BathTopology::is_bath_node(NodeId node) const {
  const auto logical = logical_nodes();
  return std::find(logical.begin(), logical.end(), node) == logical.end();
}

std::vector<NodeId> BathTopology::bath_nodes() const {
  std::vector<NodeId> out;
  for (NodeId n = 0; n < n_qubits; ++n) {
    if (is_bath_node(n)) out.push_back(n);
  }
  return out;
}

double BathTopology::max_omega() const {
  return omega.empty() ? 0.0 : *std::max_element(omega.begin(), omega.end());
}

OperatorMatrix build_local_hamiltonian(const BathTopology& topo) {
  topo.validate();
  const Eigen::Index dim = topo.dim();
  OperatorMatrix h = OperatorMatrix::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    double energy = 0.0;
    for (NodeId site = 0; site < topo.n_qubits; ++site) {
      const bool excited_bit = (b >> (topo.n_qubits - 1 - site)) & 1;
      energy += 0.5 * topo.omega[static_cast<std::size_t>(site)] * (excited_bit ? -1.0 : 1.0);
    }
    h(b, b) = energy;
  }
  return h;
}

OperatorMatrix build_interaction_hamiltonian(const BathTopology& topo) {
  topo.validate();
  const Eigen::Index dim = topo.dim();
  OperatorMatrix h = OperatorMatrix::Zero(dim, dim);
  for (const Coupling& e : topo.edges) {
    add_pauli_pair(h, PauliAxis::X, e.i, e.j, topo.n_qubits, e.jx);
    add_pauli_pair(h, PauliAxis::Y, e.i, e.j, topo.n_qubits, e.jy);
    add_pauli_pair(h, PauliAxis::Z, e.i, e.j, topo.n_qubits, e.jz);
  }
  return h;
}

OperatorMatrix build_total_hamiltonian(const BathTopology& topo) {
  return build_local_hamiltonian(topo) + build_interaction_hamiltonian(topo);
}

OperatorMatrix total_magnetization(int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  OperatorMatrix m = OperatorMatrix::Zero(dim, dim);
  for (NodeId site = 0; site < n_qubits; ++site) m += lift_pauli(PauliAxis::Z, site, n_qubits);
  return m;
}

}  // namespace qbath
