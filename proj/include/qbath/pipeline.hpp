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

#ifndef QBATH_PIPELINE_HPP
#define QBATH_PIPELINE_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "qbath/config.hpp"
#include "qbath/diagnostics.hpp"
#include "qbath/ml.hpp"
#include "qbath/spectral.hpp"

namespace qbath {

/// Target columns of a run, in CSV order.
inline const std::array<std::string, 7> kTargetNames = {"J_L12",         "gamma_L1", "gamma_L2",     "J_sb",
                                                        "backflow_rate", "log_deps", "dominant_freq"};

struct RunOptions {
  /// Evaluate the state spectrum every this many grid points (0 disables).
  int positivity_stride = 1;
  double step_factor = 0.05;
  /// Forces an RK4 substep count when > 0.
  int substeps = 0;
  bool backflow = true;
  bool correlator = true;
  BackflowOptions backflow_options;
};

/// Everything a single run produces.
struct RunRecord {
  long run_id = 0;
  RunConfig config;
  ParamMap values;
  BathTopology topology;
  std::vector<double> times;

  /// Bloch components (x, y, z) of the system qubit.
  std::array<std::vector<double>, 3> system;
  std::vector<NodeId> bath_nodes;
  std::vector<std::array<std::vector<double>, 3>> bath;

  std::vector<double> entropy;           ///< von Neumann entropy of the system qubit (nats)
  std::vector<double> fidelity;          ///< Uhlmann fidelity to the thermal qubit state
  std::vector<double> energy_system;     ///< local energy of the logical nodes
  std::vector<double> energy_bath;       ///< local energy of the bath nodes
  std::vector<double> energy_interaction;
  std::vector<double> dissipative_flow;  ///< Tr[H D(rho)]
  std::vector<double> trace_error;
  std::vector<double> min_eigenvalue;
  double thermal_entropy = 0.0;          ///< entropy of the thermal target

  std::vector<double> trace_distance;    ///< D(t) of the |0> / |1> pair
  BackflowResult backflow;

  std::vector<Complex> correlator;
  Spectrum spectral_density;
  Spectrum sx_spectrum;
  double sharpness = 0.0;
  DominantFrequency dominant;
  FeatureVector features;

  double deps = 0.0;
  bool deps_degenerate = false;
  double k_max = 0.0;
  bool k_flagged = false;

  std::array<double, 7> targets{};
  /// Set for targets that are undefined for this run (value is then NaN).
  std::array<bool, 7> target_flags{};

  int substeps = 0;
  double step = 0.0;
  double seconds = 0.0;
  ComplexMatrix final_state;
  std::vector<std::string> files;
};

/// Runs the full pipeline on the config's own parameter values.
RunRecord run_single(const RunConfig& config, const RunOptions& options = {});

/// Same with explicit parameter values. Integration failures are rethrown with the run's
/// name and parameter values in the message.
RunRecord run_single(const RunConfig& config, const ParamMap& values, long run_id, const RunOptions& options = {});

/// Writes the enabled output families below `out_dir` and returns the written paths.
std::vector<std::string> emit_outputs(const RunRecord& record, const std::string& out_dir);

/// Parameter sets for a batch: one draw per randomized parameter per run from a generator seeded
/// with config.seed, in run order then parameter-name order.
std::vector<ParamMap> draw_parameters(const RunConfig& config, int n_runs);

struct BatchOptions {
  int n_runs = 1;
  int workers = 1;
  RunOptions run;
  /// Called after each run finishes (from a worker thread, serialized).
  std::function<void(long run_id, bool ok, double seconds)> progress;
};

struct BatchRow {
  long run_id = 0;
  ParamMap values;
  bool ok = false;
  std::string error;
  std::vector<double> features;
  std::array<double, 7> targets{};
  std::array<bool, 7> target_flags{};
};

struct BatchResult {
  std::vector<BatchRow> rows;  ///< every run in run_id order, failures included

  std::size_t failures() const;
  /// Successful runs only.
  ml::Dataset dataset() const;
};

/// Executes the batch on a worker pool. A failed run is kept as a flagged row.
BatchResult run_batch(const RunConfig& config, const BatchOptions& options);

/// features.csv and targets.csv for the successful runs, runs.csv with every run's parameters and
/// status, failures.csv with the error of each failed run.
std::vector<std::string> emit_batch(const BatchResult& result, const RunConfig& config, const std::string& out_dir);

}  // namespace qbath

#endif  // QBATH_PIPELINE_HPP
