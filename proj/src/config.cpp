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

#include "qbath/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace qbath {
namespace {

std::string line_of(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  return m.line >= 0 ? " (line " + std::to_string(m.line + 1) + ")" : "";
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
  throw ValidationError(what + line_of(node));
}

double as_double(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, "'" + key + "' must be a number");
  try {
    return node.as<double>();
  } catch (const YAML::BadConversion&) {
    throw ParseError("'" + key + "' expects a number, got '" + node.Scalar() + "'" + line_of(node));
  }
}

long as_integer(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, "'" + key + "' must be an integer");
  try {
    return node.as<long>();
  } catch (const YAML::BadConversion&) {
    throw ParseError("'" + key + "' expects an integer, got '" + node.Scalar() + "'" + line_of(node));
  }
}

bool as_bool(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<bool>();
  } catch (const YAML::BadConversion&) {
    throw ParseError("'" + key + "' expects true/false" + line_of(node));
  }
}

// Number, or a bare/quoted string naming a parameter.
ParamValue as_param(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, "'" + key + "' entries must be numbers or parameter names");
  double v = 0.0;
  if (YAML::convert<double>::decode(node, v)) return ParamValue::literal(v);
  const std::string& s = node.Scalar();
  if (s.empty()) fail(node, "'" + key + "' has an empty parameter name");
  return ParamValue::named(s);
}

std::vector<NodeId> as_node_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) fail(node, "'" + key + "' must be a list of node ids");
  std::vector<NodeId> out;
  for (const YAML::Node& item : node) out.push_back(static_cast<NodeId>(as_integer(item, key)));
  return out;
}

std::vector<RateSpec> as_rates(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) fail(node, "'" + key + "' must be a list of [site, gamma]");
  std::vector<RateSpec> out;
  for (const YAML::Node& item : node) {
    if (!item.IsSequence() || item.size() != 2) fail(item, "'" + key + "' entries must be [site, gamma]");
    out.push_back({static_cast<NodeId>(as_integer(item[0], key)), as_param(item[1], key)});
  }
  return out;
}

std::vector<EdgeSpec> as_edges(const YAML::Node& node) {
  if (!node.IsSequence()) fail(node, "'edges' must be a list of [i, j, J] or [i, j, Jx, Jy, Jz]");
  std::vector<EdgeSpec> out;
  for (const YAML::Node& item : node) {
    if (!item.IsSequence() || (item.size() != 3 && item.size() != 5)) {
      fail(item, "'edges' entries must be [i, j, J] or [i, j, Jx, Jy, Jz]");
    }
    EdgeSpec e;
    e.i = static_cast<NodeId>(as_integer(item[0], "edges"));
    e.j = static_cast<NodeId>(as_integer(item[1], "edges"));
    if (item.size() == 3) {
      const ParamValue j = as_param(item[2], "edges");
      e.coupling = {j, j, j};
    } else {
      e.coupling = {as_param(item[2], "edges"), as_param(item[3], "edges"), as_param(item[4], "edges")};
    }
    out.push_back(e);
  }
  return out;
}

TimeGrid as_grid(const YAML::Node& node, std::string& grid_name) {
  if (node.IsScalar()) {
    grid_name = node.Scalar();
    try {
      return named_grid(grid_name);
    } catch (const ValidationError& e) {
      fail(node, e.what());
    }
  }
  if (!node.IsMap()) fail(node, "'grid' must be \"short\", \"long\" or {t_start, t_end, n_points}");
  TimeGrid g;
  for (const auto& kv : node) {
    const std::string k = kv.first.as<std::string>();
    if (k == "t_start") {
      g.t_start = as_double(kv.second, "grid.t_start");
    } else if (k == "t_end") {
      g.t_end = as_double(kv.second, "grid.t_end");
    } else if (k == "n_points") {
      g.n_points = static_cast<int>(as_integer(kv.second, "grid.n_points"));
    } else {
      fail(kv.first, "unknown key 'grid." + k + "'");
    }
  }
  try {
    g.validate();
  } catch (const DomainError& e) {
    fail(node, std::string("invalid grid: ") + e.what());
  }
  grid_name = "custom";
  return g;
}

// ---- presets -------------------------------------------------------------------------------

struct PresetEntry {
  PresetInfo info;
  RunConfig (*build)();
};

RunConfig base_config(const char* name, const char* citation, int n_qubits, double beta, const char* grid) {
  RunConfig c;
  c.name = name;
  c.citation = citation;
  c.n_qubits = n_qubits;
  c.omega = {ParamValue::literal(1.0)};
  c.beta = ParamValue::literal(beta);
  c.grid_name = grid;
  c.grid = named_grid(grid);
  return c;
}

void add_edge(RunConfig& c, NodeId i, NodeId j, const char* param) {
  const ParamValue v = ParamValue::named(param);
  c.edges.push_back({i, j, {v, v, v}});
}

// Six-qubit two-layer bath: system 0, layer one {1, 2}, layer two {3, 4, 5}.
RunConfig six_qubit(const char* name, const char* citation, double j_sb, double j_l1, double j_l12, double j_l2,
                    double g_sys, double g_l1, double g_l2, double beta, const char* grid) {
  RunConfig c = base_config(name, citation, 6, beta, grid);
  add_edge(c, 0, 1, "J_sb");
  add_edge(c, 0, 2, "J_sb");
  add_edge(c, 1, 2, "J_L1");
  add_edge(c, 1, 3, "J_L12");
  add_edge(c, 1, 4, "J_L12");
  add_edge(c, 2, 4, "J_L12");
  add_edge(c, 2, 5, "J_L12");
  add_edge(c, 3, 4, "J_L2");
  add_edge(c, 4, 5, "J_L2");
  c.dephasing = {{0, ParamValue::named("gamma_sys")}};
  for (NodeId n : {1, 2}) c.thermal.push_back({n, ParamValue::named("gamma_L1")});
  for (NodeId n : {3, 4, 5}) c.thermal.push_back({n, ParamValue::named("gamma_L2")});
  c.params = {{"J_sb", j_sb},           {"J_L1", j_l1},         {"J_L12", j_l12},       {"J_L2", j_l2},
              {"gamma_sys", g_sys},     {"gamma_L1", g_l1},     {"gamma_L2", g_l2}};
  return c;
}

constexpr double kGammaSys = 0.005;

RunConfig triangle_weak() {
  RunConfig c = base_config("triangle-weak", "three-qubit thermalization benchmark", 3, 1.0, "long");
  add_edge(c, 0, 1, "J_sb");
  add_edge(c, 0, 2, "J_sb");
  add_edge(c, 1, 2, "J_L1");
  c.dephasing = {{0, ParamValue::named("gamma_sys")}};
  c.thermal = {{1, ParamValue::named("gamma_L1")}, {2, ParamValue::named("gamma_L1")}};
  c.params = {{"J_sb", 0.2}, {"J_L1", 0.2}, {"gamma_sys", 0.005}, {"gamma_L1", 0.005}};
  return c;
}

RunConfig case1() {
  return six_qubit("case1-dissipative", "memory category: dissipative", 1.0, 0.05, 0.02, 1.0, kGammaSys, 0.3, 0.3,
                   2.0, "short");
}
RunConfig case2() {
  return six_qubit("case2-retained", "memory category: retained", 1.0, 0.05, 0.001, 1.0, kGammaSys, 0.02, 0.02,
                   2.0, "short");
}
RunConfig case3() {
  return six_qubit("case3-transferred", "memory category: transferred", 1.0, 0.05, 0.75, 1.0, kGammaSys, 0.02,
                   0.001, 2.0, "short");
}
RunConfig markovian() {
  RunConfig c = six_qubit("markovian", "correlator regime: strongly thermal, Markovian", 1.0, 1.0, 0.8,
                          1.0, kGammaSys, 0.3, 0.3, 1.0, "long");
  c.note = "Uses J_L1 = 1.0, J_L12 = 0.8, J_L2 = 1.0. An alternative reading sets the intra-layer couplings to 0.8 as well.";
  return c;
}
RunConfig non_markovian() {
  return six_qubit("non-markovian", "correlator regime: non-Markovian", 1.0, 0.1, 0.05, 0.1, kGammaSys,
                   0.001, 0.001, 1.0, "long");
}
RunConfig intermediate() {
  return six_qubit("intermediate", "correlator regime: intermediate", 1.0, 0.5, 0.15, 0.5, kGammaSys,
                   0.15, 0.15, 1.0, "long");
}
RunConfig backflow_example1() {
  return six_qubit("backflow-example1", "backflow worked example 1 (near zero)", 1.0, 0.365, 0.041, 0.844,
                   kGammaSys, 0.1961, 0.1858, 1.0, "long");
}
RunConfig backflow_example2() {
  return six_qubit("backflow-example2", "backflow worked example 2 (finite)", 1.0, 0.407, 0.043, 0.010,
                   kGammaSys, 0.003, 0.0063, 1.0, "long");
}
RunConfig spectral_case1() {
  return six_qubit("spectral-case1", "spectral case 1: weakly linked bath layers", 1.0, 1.0, 0.001, 0.001, kGammaSys, 0.001,
                   0.001, 2.0, "short");
}
RunConfig spectral_case2a() {
  return six_qubit("spectral-case2a", "spectral case 2a: uniform strong coupling", 1.0, 1.0, 1.0, 1.0, kGammaSys, 0.01,
                   0.01, 2.0, "short");
}
RunConfig spectral_case2b() {
  return six_qubit("spectral-case2b", "spectral case 2b: weak links, strong damping", 1.0, 0.0001, 0.001, 0.001,
                   kGammaSys, 0.3, 0.3, 2.0, "short");
}
RunConfig spectral_case3a() {
  return six_qubit("spectral-case3a", "spectral case 3a: strong inter-layer transfer", 1.0, 1.0, 1.0, 1.0, kGammaSys,
                   0.0001, 0.0001, 2.0, "short");
}
RunConfig spectral_case3b() {
  return six_qubit("spectral-case3b", "spectral case 3b: transfer into a weakly coupled second layer", 1.0, 1.0, 1.0, 0.001,
                   kGammaSys, 0.0001, 0.0001, 2.0, "short");
}

// Two logical qubits S1 = 0, S2 = 1; layer one B1..B3 = 2..4 with B2 shared; layer two B4, B5 = 5, 6.
RunConfig two_logical() {
  RunConfig c = base_config("two-logical-qubits", "two logical qubits sharing bath qubit B2", 7, 1.0, "long");
  c.system_index = 0;
  c.system_nodes = {0, 1};
  add_edge(c, 0, 2, "J_sb");
  add_edge(c, 0, 3, "J_sb");
  add_edge(c, 1, 3, "J_sb");
  add_edge(c, 1, 4, "J_sb");
  add_edge(c, 2, 3, "J_L1");
  add_edge(c, 3, 4, "J_L1");
  add_edge(c, 2, 5, "J_L12");
  add_edge(c, 3, 5, "J_L12");
  add_edge(c, 3, 6, "J_L12");
  add_edge(c, 4, 6, "J_L12");
  add_edge(c, 5, 6, "J_L2");
  c.dephasing = {{0, ParamValue::named("gamma_sys")}, {1, ParamValue::named("gamma_sys")}};
  for (NodeId n : {2, 3, 4}) c.thermal.push_back({n, ParamValue::named("gamma_L1")});
  for (NodeId n : {5, 6}) c.thermal.push_back({n, ParamValue::named("gamma_L2")});
  c.params = {{"J_sb", 1.0},           {"J_L1", 0.05},         {"J_L12", 0.02},  {"J_L2", 1.0},
              {"gamma_sys", kGammaSys}, {"gamma_L1", 0.3}, {"gamma_L2", 0.3}};
  c.note = "No dedicated parameter block exists for this topology; the dissipative memory-category values are used.";
  return c;
}

RunConfig batch_memory() {
  RunConfig c = case1();
  c.name = "batch-memory";
  c.citation = "batch: randomized J_L12, gamma_L1, gamma_L2 on the six-qubit topology";
  c.randomize = {{"J_L12", {0.001, 1.0}}, {"gamma_L1", {0.001, 0.3}}, {"gamma_L2", {0.001, 0.3}}};
  c.seed = 2024;
  return c;
}

RunConfig batch_jsb() {
  RunConfig c = batch_memory();
  c.name = "batch-jsb";
  c.citation = "batch: randomized J_sb, J_L12, gamma_L1, gamma_L2";
  c.randomize["J_sb"] = {0.001, 1.0};
  return c;
}

const std::vector<PresetEntry>& registry() {
  static const std::vector<PresetEntry> entries = [] {
    std::vector<PresetEntry> out;
    for (RunConfig (*f)() : {triangle_weak, case1, case2, case3, markovian, non_markovian, intermediate, backflow_example1, backflow_example2, spectral_case1,
                             spectral_case2a, spectral_case2b, spectral_case3a, spectral_case3b, two_logical, batch_memory, batch_jsb}) {
      const RunConfig c = f();
      out.push_back({{c.name, c.citation, c.note}, f});
    }
    return out;
  }();
  return entries;
}

const std::set<std::string>& allowed_keys() {
  static const std::set<std::string> keys = {"name",      "preset",   "n_qubits", "system_index", "system_nodes",
                                             "omega",     "beta",     "edges",    "dephasing",    "thermal",
                                             "params",    "grid",     "seed",     "randomize",    "outputs",
                                             "bath_operator"};
  return keys;
}

}  // namespace

double ParamValue::resolve(const ParamMap& params) const {
  if (ref.empty()) return value;
  const auto it = params.find(ref);
  if (it == params.end()) throw ValidationError("parameter '" + ref + "' is referenced but not defined");
  return it->second;
}

Sampling sampling_for(const std::string& param) {
  return param.rfind("gamma", 0) == 0 ? Sampling::Log : Sampling::Linear;
}

TimeGrid named_grid(const std::string& name) {
  if (name == "short") return TimeGrid::short_window();
  if (name == "long") return TimeGrid::long_window();
  throw ValidationError("unknown grid '" + name + "' (expected short or long)");
}

BathTopology RunConfig::topology(const ParamMap& values) const {
  BathTopology t;
  t.n_qubits = n_qubits;
  t.system_index = system_index;
  t.system_nodes = system_nodes;
  if (omega.size() == 1) {
    t.omega.assign(static_cast<std::size_t>(std::max(n_qubits, 0)), omega[0].resolve(values));
  } else {
    for (const ParamValue& w : omega) t.omega.push_back(w.resolve(values));
  }
  t.beta = beta.resolve(values);
  for (const EdgeSpec& e : edges) {
    t.edges.push_back({e.i, e.j, e.coupling[0].resolve(values), e.coupling[1].resolve(values),
                       e.coupling[2].resolve(values)});
  }
  for (const RateSpec& r : dephasing) t.dephasing.push_back({r.site, r.gamma.resolve(values)});
  for (const RateSpec& r : thermal) t.thermal.push_back({r.site, r.gamma.resolve(values)});
  return t;
}

void RunConfig::validate() const {
  if (n_qubits < 1) throw ValidationError("n_qubits must be >= 1");
  if (omega.size() != 1 && static_cast<int>(omega.size()) != n_qubits) {
    throw ValidationError("omega must be a scalar or have n_qubits entries");
  }
  for (const auto& [key, range] : randomize) {
    if (!(range.min <= range.max)) throw ValidationError("randomize." + key + ": min must not exceed max");
    if (sampling_for(key) == Sampling::Log && !(range.min > 0.0)) {
      throw ValidationError("randomize." + key + ": log-uniform range needs min > 0");
    }
  }
  for (const RateSpec& r : dephasing) {
    const double g = r.gamma.resolve(params);
    if (!(g >= 0.0)) {
      throw ValidationError("dephasing gamma" + (r.gamma.ref.empty() ? "" : " '" + r.gamma.ref + "'") +
                            " must be >= 0, got " + std::to_string(g));
    }
  }
  for (const RateSpec& r : thermal) {
    const double g = r.gamma.resolve(params);
    if (!(g >= 0.0)) {
      throw ValidationError("thermal gamma" + (r.gamma.ref.empty() ? "" : " '" + r.gamma.ref + "'") +
                            " must be >= 0, got " + std::to_string(g));
    }
  }
  topology().validate();
  grid.validate();
}

std::vector<PresetInfo> list_presets() {
  std::vector<PresetInfo> out;
  for (const PresetEntry& e : registry()) out.push_back(e.info);
  return out;
}

bool has_preset(const std::string& name) {
  for (const PresetEntry& e : registry()) {
    if (e.info.name == name) return true;
  }
  return false;
}

RunConfig preset(const std::string& name) {
  for (const PresetEntry& e : registry()) {
    if (e.info.name == name) return e.build();
  }
  throw ValidationError("unknown preset '" + name + "'");
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(origin + ": line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ParseError(origin + ": top level must be a key/value map");

  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed_keys().count(key)) throw ValidationError(origin + ": unknown key '" + key + "'" + line_of(kv.first));
  }

  RunConfig c;
  if (root["preset"]) c = preset(root["preset"].as<std::string>());
  try {
    if (root["name"]) c.name = root["name"].as<std::string>();
    if (root["n_qubits"]) c.n_qubits = static_cast<int>(as_integer(root["n_qubits"], "n_qubits"));
    if (root["system_index"]) c.system_index = static_cast<NodeId>(as_integer(root["system_index"], "system_index"));
    if (root["system_nodes"]) c.system_nodes = as_node_list(root["system_nodes"], "system_nodes");
    if (root["omega"]) {
      const YAML::Node w = root["omega"];
      c.omega.clear();
      if (w.IsSequence()) {
        for (const YAML::Node& item : w) c.omega.push_back(as_param(item, "omega"));
      } else {
        c.omega.push_back(as_param(w, "omega"));
      }
    } else if (c.omega.empty()) {
      c.omega = {ParamValue::literal(1.0)};
    }
    if (root["beta"]) c.beta = as_param(root["beta"], "beta");
    if (root["edges"]) c.edges = as_edges(root["edges"]);
    if (root["dephasing"]) c.dephasing = as_rates(root["dephasing"], "dephasing");
    if (root["thermal"]) c.thermal = as_rates(root["thermal"], "thermal");
    if (root["params"]) {
      const YAML::Node p = root["params"];
      if (!p.IsMap()) fail(p, "'params' must be a map of name: value");
      for (const auto& kv : p) c.params[kv.first.as<std::string>()] = as_double(kv.second, "params");
    }
    if (root["grid"]) c.grid = as_grid(root["grid"], c.grid_name);
    if (root["seed"]) c.seed = static_cast<std::uint64_t>(as_integer(root["seed"], "seed"));
    if (root["randomize"]) {
      const YAML::Node r = root["randomize"];
      if (!r.IsMap()) fail(r, "'randomize' must be a map of name: [min, max]");
      c.randomize.clear();
      for (const auto& kv : r) {
        const std::string key = kv.first.as<std::string>();
        if (!kv.second.IsSequence() || kv.second.size() != 2) fail(kv.second, "randomize." + key + " must be [min, max]");
        c.randomize[key] = {as_double(kv.second[0], "randomize." + key), as_double(kv.second[1], "randomize." + key)};
      }
    }
    if (root["outputs"]) {
      const YAML::Node o = root["outputs"];
      if (!o.IsMap()) fail(o, "'outputs' must be a map of flag: bool");
      for (const auto& kv : o) {
        const std::string key = kv.first.as<std::string>();
        const bool v = as_bool(kv.second, "outputs." + key);
        if (key == "states") {
          c.outputs.states = v;
        } else if (key == "observables") {
          c.outputs.observables = v;
        } else if (key == "spectra") {
          c.outputs.spectra = v;
        } else if (key == "features") {
          c.outputs.features = v;
        } else if (key == "diagnostics") {
          c.outputs.diagnostics = v;
        } else {
          fail(kv.first, "unknown key 'outputs." + key + "'");
        }
      }
    }
    if (root["bath_operator"]) {
      const std::string axis = root["bath_operator"].as<std::string>();
      if (axis == "x") {
        c.bath_axis = PauliAxis::X;
      } else if (axis == "y") {
        c.bath_axis = PauliAxis::Y;
      } else {
        fail(root["bath_operator"], "'bath_operator' must be x or y");
      }
    }
  } catch (const YAML::Exception& e) {
    throw ParseError(origin + ": line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }

  // Parameters that are only randomized still need a base value for single runs.
  for (const auto& [key, range] : c.randomize) {
    if (!c.params.count(key)) {
      c.params[key] = sampling_for(key) == Sampling::Log && range.min > 0.0 ? std::sqrt(range.min * range.max)
                                                                           : 0.5 * (range.min + range.max);
    }
  }
  c.validate();
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

RunConfig load_run_config(const std::string& preset_or_path) {
  if (has_preset(preset_or_path)) return preset(preset_or_path);
  if (std::filesystem::exists(preset_or_path)) return parse_config(preset_or_path);
  throw ValidationError("'" + preset_or_path + "' is neither a preset name nor an existing config file");
}

}  // namespace qbath
