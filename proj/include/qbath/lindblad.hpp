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

#ifndef QBATH_LINDBLAD_HPP
#define QBATH_LINDBLAD_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "qbath/core.hpp"
#include "qbath/qubit_algebra.hpp"
#include "qbath/states.hpp"

namespace qbath {

enum class ChannelKind { Dephasing, Emission, Absorption };

const char* channel_name(ChannelKind kind);

/// One dissipative channel; `rate` is the prefactor under the square root of L.
struct CollapseSpec {
  ChannelKind kind = ChannelKind::Dephasing;
  NodeId site = 0;
  double rate = 0.0;
};

struct CollapseOperator {
  CollapseSpec spec;
  OperatorMatrix op;
};

/// sqrt(gamma_sys) sigma_z per dephasing entry and, per thermal entry, the emission/absorption pair
/// sqrt(gamma (1 + n_th)) sigma^- and sqrt(gamma n_th) sigma^+ with n_th at that node's omega.
/// Channels with zero rate are omitted.
std::vector<CollapseOperator> build_collapse_operators(const BathTopology& topo);

/// -i[H, rho] + sum_k (L_k rho L_k^dagger - 1/2 {L_k^dagger L_k, rho}), evaluated densely.
ComplexMatrix lindblad_rhs(const OperatorMatrix& h, std::span<const CollapseOperator> collapse,
                           const ComplexMatrix& rho);

/// Uniform sampling grid.
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  int n_points = 2;

  void validate() const;
  double dt() const { return (t_end - t_start) / (n_points - 1); }
  double time(int k) const { return t_start + k * dt(); }
  double span() const { return t_end - t_start; }
  double nyquist() const { return 1.0 / (2.0 * dt()); }
  double resolution() const { return 1.0 / (n_points * dt()); }
  std::vector<double> times() const;

  /// 0..500 with 5000 points.
  static TimeGrid short_window() { return {0.0, 500.0, 5000}; }
  /// 0..1500 with 5000 points.
  static TimeGrid long_window() { return {0.0, 1500.0, 5000}; }
};

/// Precompiled Lindblad generator used by the integrator.
///
/// The coherent part is folded into H_eff = H - (i/2) sum L^dagger L (stored sparse) and each
/// jump term L X L^dagger is evaluated through the operator's nonzero pattern; operators with at
/// most one entry per row and column (Pauli strings, sigma^+-) reduce to an O(nnz^2) gather.
class LindbladGenerator {
 public:
  LindbladGenerator(const OperatorMatrix& h, std::span<const CollapseOperator> collapse);

  Eigen::Index dim() const { return dim_; }

  /// out = L(x). With `hermitian_input`, x is assumed Hermitian and x H_eff^dagger is
  /// obtained as (H_eff x)^dagger.
  void apply(const ComplexMatrix& x, ComplexMatrix& out, bool hermitian_input) const;

  /// Largest Bohr frequency of H (spread of its spectrum).
  double max_frequency() const { return max_frequency_; }

 private:
  struct MonomialJump {
    std::vector<Eigen::Index> rows;
    std::vector<Eigen::Index> cols;
    std::vector<Complex> values;
  };

  Eigen::Index dim_ = 0;
  double max_frequency_ = 0.0;
  Eigen::SparseMatrix<Complex, Eigen::ColMajor> heff_;
  std::vector<MonomialJump> monomial_;
  std::vector<Eigen::SparseMatrix<Complex, Eigen::ColMajor>> general_;
};

/// Named operator whose expectation Tr[rho O] is recorded at each grid point.
struct Observable {
  std::string name;
  OperatorMatrix op;
};

struct Trajectory {
  TimeGrid grid;
  std::vector<std::string> names;
  /// n_points x n_observables expectations Tr[rho(t_k) O_j].
  ComplexMatrix expectations;
  /// |Tr rho(t_k) - 1| per grid point.
  std::vector<double> trace_error;
  /// Smallest eigenvalue of rho(t_k); NaN where not evaluated.
  std::vector<double> min_eigenvalue;
  std::vector<ComplexMatrix> states;  ///< filled only with EvolveOptions::store_states
  int substeps = 1;                   ///< RK4 steps per grid interval
  double step = 0.0;                  ///< internal RK4 step size

  /// Real part of the named series; throws DomainError for unknown names.
  std::vector<double> series(const std::string& name) const;
  int index_of(const std::string& name) const;
};

struct EvolveOptions {
  bool store_states = false;
  /// Internal step is at most step_factor / omega_max (and at most the grid spacing).
  double step_factor = 0.05;
  /// Frequency scale of the step rule, normally the largest qubit frequency. When <= 0 the
  /// generator's largest Bohr frequency is used instead.
  double omega_max = 0.0;
  /// Forces an exact substep count per grid interval when > 0.
  int substeps = 0;
  /// Evaluate the minimum eigenvalue every `positivity_stride` grid points (0 disables).
  int positivity_stride = 1;
  double trace_tolerance = 1e-6;
  double positivity_tolerance = 1e-6;
  /// Called at every grid point with the current state.
  std::function<void(int, double, const ComplexMatrix&)> on_sample;
};

/// RK4 substep count per grid interval for a given generator and grid.
int rk4_substeps(const LindbladGenerator& gen, const TimeGrid& grid, const EvolveOptions& options);

/// Fixed-step RK4 integration of the Lindblad equation with deterministic substepping.
/// Throws IntegrationError when the trace drifts or positivity fails beyond tolerance.
Trajectory evolve(const OperatorMatrix& h, std::span<const CollapseOperator> collapse, const DensityMatrix& rho0,
                  const TimeGrid& grid, std::span<const Observable> observables, const EvolveOptions& options = {});

/// Same integrator applied to an arbitrary (non-Hermitian) operator X(0); `on_sample` receives X(t_k).
/// Used for quantum-regression correlators.
void propagate_operator(const LindbladGenerator& gen, const ComplexMatrix& x0, const TimeGrid& grid,
                        const EvolveOptions& options,
                        const std::function<void(int, double, const ComplexMatrix&)>& on_sample);

}  // namespace qbath

#endif  // QBATH_LINDBLAD_HPP
