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

#ifndef QBATH_DIAGNOSTICS_HPP
#define QBATH_DIAGNOSTICS_HPP

#include <span>
#include <utility>
#include <vector>

#include "qbath/core.hpp"
#include "qbath/lindblad.hpp"
#include "qbath/qubit_algebra.hpp"
#include "qbath/states.hpp"

namespace qbath {

/// Reduced state on `keep` (any order; the result follows ascending node order).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<NodeId>& keep, int n_qubits);
ComplexMatrix partial_trace(const ComplexMatrix& rho, const std::vector<NodeId>& keep, int n_qubits);

/// Partial transpose over the nodes in `partition`.
ComplexMatrix partial_transpose(const ComplexMatrix& rho, const std::vector<NodeId>& partition, int n_qubits);

/// -sum lambda ln lambda in nats; eigenvalues below 1e-14 contribute nothing.
double von_neumann_entropy(const DensityMatrix& rho);
double von_neumann_entropy(const ComplexMatrix& rho);

/// [Tr sqrt(sqrt(sigma) rho sqrt(sigma))]^2, clamped to [0, 1].
double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double uhlmann_fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// Half the trace norm of rho1 - rho2.
double trace_distance(const ComplexMatrix& rho1, const ComplexMatrix& rho2);
double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2);

enum class Smoothing { SavitzkyGolay, MovingAverage };

struct BackflowOptions {
  Smoothing smoothing = Smoothing::SavitzkyGolay;
  /// Odd window length; 0 selects the grid-scaled default (see default_backflow_window).
  int window = 0;
  int polyorder = 3;
  double threshold_factor = 3.0;
  double tail_fraction = 0.1;
};

/// Window used when BackflowOptions::window is 0: max(5, round(n / 100)) for Savitzky-Golay and
/// max(5, round(n / 200)) for the moving average, bumped to the next odd integer.
int default_backflow_window(int n_points, Smoothing smoothing);

struct BackflowResult {
  double total = 0.0;                                      ///< integral of the thresholded positive slope
  double rate = 0.0;                                       ///< total / (t_end - t_start)
  double threshold = 0.0;
  std::vector<std::pair<double, double>> positive_intervals;
  std::vector<double> smoothed;
  std::vector<double> derivative;
};

/// Trace-distance backflow: smooth D(t), differentiate on the grid, keep the slope above
/// threshold_factor * median(|dD/dt|) over the trailing tail_fraction of samples and integrate it.
BackflowResult blp_backflow(std::span<const double> d, const TimeGrid& grid, const BackflowOptions& options = {});

/// Savitzky-Golay filter; edge samples come from the polynomial fitted to the first/last window.
std::vector<double> savitzky_golay(std::span<const double> y, int window, int polyorder);

/// Centered moving average; the window shrinks symmetrically near the edges.
std::vector<double> moving_average(std::span<const double> y, int window);

/// Central differences in the interior, one-sided at the ends (uniform spacing h).
std::vector<double> gradient(std::span<const double> y, double h);

/// (||rho^{T_A}||_1 - 1) / 2.
double negativity(const DensityMatrix& rho, const std::vector<NodeId>& partition_a, int n_qubits);

/// S(rho_A) + S(rho_B) - S(rho).
double mutual_information(const DensityMatrix& rho, const std::vector<NodeId>& partition_a, int n_qubits);

struct LocalEnergies {
  std::vector<double> per_node;  ///< Tr[rho (omega_i / 2) sigma_z^(i)]
  double total = 0.0;            ///< sum of per_node
  double interaction = 0.0;      ///< Tr[rho H_int]
};

LocalEnergies local_energies(const DensityMatrix& rho, const BathTopology& topo);

struct EnergyFlows {
  double coherent = 0.0;     ///< Tr[H (-i[H, rho])]
  double dissipative = 0.0;  ///< Tr[H D(rho)]
};

EnergyFlows energy_flows(const DensityMatrix& rho, const OperatorMatrix& h, std::span<const CollapseOperator> collapse);

}  // namespace qbath

#endif  // QBATH_DIAGNOSTICS_HPP
