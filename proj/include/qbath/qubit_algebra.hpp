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

#ifndef QBATH_QUBIT_ALGEBRA_HPP
#define QBATH_QUBIT_ALGEBRA_HPP

#include <vector>

#include "qbath/core.hpp"

namespace qbath {

enum class PauliAxis { X, Y, Z };

/// 2x2 Pauli matrix. Basis convention: |0> = (1,0)^T with sigma_z|0> = +|0>.
ComplexMatrix pauli_matrix(PauliAxis axis);

/// I^{(x)site} (x) sigma_axis (x) I^{(x)(n_qubits-site-1)}. Site 0 is the most significant tensor factor.
OperatorMatrix lift_pauli(PauliAxis axis, NodeId site, int n_qubits);

/// Lowering operator |1><0| on `site` (takes the +omega/2 level to -omega/2).
OperatorMatrix lift_lowering(NodeId site, int n_qubits);
/// Raising operator |0><1| on `site`.
OperatorMatrix lift_raising(NodeId site, int n_qubits);

/// Heisenberg coupling J_x XX + J_y YY + J_z ZZ between two nodes. Undirected.
struct Coupling {
  NodeId i = 0;
  NodeId j = 0;
  double jx = 0.0;
  double jy = 0.0;
  double jz = 0.0;

  static Coupling isotropic(NodeId i, NodeId j, double coupling) { return {i, j, coupling, coupling, coupling}; }
  bool is_isotropic() const { return jx == jy && jy == jz; }
};

/// A dissipative channel attached to one node with a rate gamma >= 0.
struct NodeRate {
  NodeId site = 0;
  double rate = 0.0;
};

/// Qubit network: on-site frequencies, Heisenberg edges and the dissipators attached to it.
struct BathTopology {
  int n_qubits = 1;
  NodeId system_index = 0;
  /// Nodes prepared in the system state and excluded from the collective bath operator.
  /// Empty means {system_index}.
  std::vector<NodeId> system_nodes;
  std::vector<double> omega;  ///< one entry per node
  std::vector<Coupling> edges;
  std::vector<NodeRate> dephasing;
  std::vector<NodeRate> thermal;
  double beta = 1.0;

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  int dim() const { return 1 << n_qubits; }
  std::vector<NodeId> logical_nodes() const;
  std::vector<NodeId> bath_nodes() const;
  bool is_bath_node(NodeId node) const;
  double max_omega() const;
};

/// Sum_i (omega_i / 2) sigma_z^{(i)}.
OperatorMatrix build_local_hamiltonian(const BathTopology& topo);
/// Sum over edges of J_x XX + J_y YY + J_z ZZ.
OperatorMatrix build_interaction_hamiltonian(const BathTopology& topo);
OperatorMatrix build_total_hamiltonian(const BathTopology& topo);

/// Sum_i sigma_z^{(i)} on the register.
OperatorMatrix total_magnetization(int n_qubits);

}  // namespace qbath

#endif  // QBATH_QUBIT_ALGEBRA_HPP
