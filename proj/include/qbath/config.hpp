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

#ifndef QBATH_CONFIG_HPP
#define QBATH_CONFIG_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qbath/core.hpp"
#include "qbath/lindblad.hpp"
#include "qbath/qubit_algebra.hpp"

namespace qbath {

using ParamMap = std::map<std::string, double>;

/// A literal number or a reference to a named parameter.
struct ParamValue {
  double value = 0.0;
  std::string ref;

  static ParamValue literal(double v) { return {v, {}}; }
  static ParamValue named(std::string name) { return {0.0, std::move(name)}; }
  double resolve(const ParamMap& params) const;
};

struct EdgeSpec {
  NodeId i = 0;
  NodeId j = 0;
  std::array<ParamValue, 3> coupling;  ///< XX, YY, ZZ prefactors
};

struct RateSpec {
  NodeId site = 0;
  ParamValue gamma;
};

struct Range {
  double min = 0.0;
  double max = 0.0;
};

enum class Sampling { Linear, Log };

/// Couplings (names starting with "J") are drawn linearly, rates ("gamma...") log-uniformly.
Sampling sampling_for(const std::string& param);

struct OutputFlags {
  bool states = false;
  bool observables = true;
  bool spectra = true;
  bool features = true;
  bool diagnostics = true;
};

/// Fully specified run: a parametrized topology, named parameter values, grid and batch settings.
struct RunConfig {
  std::string name = "custom";
  std::string citation;
  std::string note;

  int n_qubits = 0;
  NodeId system_index = 0;
  std::vector<NodeId> system_nodes;
  std::vector<ParamValue> omega;
  ParamValue beta = ParamValue::literal(1.0);
  std::vector<EdgeSpec> edges;
  std::vector<RateSpec> dephasing;
  std::vector<RateSpec> thermal;
  ParamMap params;

  TimeGrid grid = TimeGrid::long_window();
  std::string grid_name = "long";
  std::uint64_t seed = 0;
  std::map<std::string, Range> randomize;
  OutputFlags outputs;
  PauliAxis bath_axis = PauliAxis::X;

  /// Throws ValidationError naming the offending key or parameter.
  void validate() const;
  BathTopology topology() const { return topology(params); }
  BathTopology topology(const ParamMap& values) const;
};

/// "short" = 0..500 with 5000 points, "long" = 0..1500 with 5000 points.
TimeGrid named_grid(const std::string& name);

/// Reads a YAML config file. Malformed input raises ParseError with the line; unknown keys and
/// invariant violations raise ValidationError naming the key.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

struct PresetInfo {
  std::string name;
  std::string citation;
  std::string note;
};

std::vector<PresetInfo> list_presets();
bool has_preset(const std::string& name);
/// Throws ValidationError for unknown names.
RunConfig preset(const std::string& name);

/// Resolves a preset name or a config file path.
RunConfig load_run_config(const std::string& preset_or_path);

}  // namespace qbath

#endif  // QBATH_CONFIG_HPP
