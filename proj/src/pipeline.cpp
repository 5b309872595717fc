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

#include "qbath/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "qbath/io.hpp"
#include "qbath/nonhermitian.hpp"

namespace qbath {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string describe(const RunConfig& config, const ParamMap& values, long run_id) {
  std::ostringstream s;
  s << "run " << run_id << " of '" << config.name << "' with";
  for (const auto& [k, v] : values) s << ' ' << k << '=' << format_number(v);
  return s.str();
}

std::vector<double> real_column(const Trajectory& traj, int col) {
  std::vector<double> out(static_cast<std::size_t>(traj.expectations.rows()));
  for (Eigen::Index k = 0; k < traj.expectations.rows(); ++k) out[static_cast<std::size_t>(k)] = traj.expectations(k, col).real();
  return out;
}

ComplexMatrix bloch_state(double x, double y, double z) {
  ComplexMatrix r(2, 2);
  r(0, 0) = 0.5 * (1.0 + z);
  r(1, 1) = 0.5 * (1.0 - z);
  r(0, 1) = Complex{0.5 * x, -0.5 * y};
  r(1, 0) = Complex{0.5 * x, 0.5 * y};
  return r;
}

OperatorMatrix local_energy_operator(const BathTopology& topo, const std::vector<NodeId>& nodes) {
  OperatorMatrix e = OperatorMatrix::Zero(topo.dim(), topo.dim());
  for (NodeId n : nodes) e += 0.5 * topo.omega[static_cast<std::size_t>(n)] * lift_pauli(PauliAxis::Z, n, topo.n_qubits);
  return e;
}

// Tr[H D(rho)] = Tr[A rho] with A = sum_k (L^dagger H L - {L^dagger L, H} / 2).
OperatorMatrix dissipative_flow_operator(const OperatorMatrix& h, const std::vector<CollapseOperator>& collapse) {
  OperatorMatrix a = OperatorMatrix::Zero(h.rows(), h.cols());
  for (const CollapseOperator& c : collapse) {
    const OperatorMatrix ldl = c.op.adjoint() * c.op;
    a += c.op.adjoint() * h * c.op - 0.5 * (ldl * h + h * ldl);
  }
  return a;
}

double lookup(const ParamMap& values, const std::string& key, bool& flagged) {
  const auto it = values.find(key);
  flagged = it == values.end() || !std::isfinite(it->second);
  return flagged ? kNaN : it->second;
}

// Portable uniform double in [0, 1).
double unit_draw(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' ? ' ' : c);
  }
  return out + "\"";
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

RunRecord run_single(const RunConfig& config, const RunOptions& options) {
  return run_single(config, config.params, 0, options);
}

RunRecord run_single(const RunConfig& config, const ParamMap& values, long run_id, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.run_id = run_id;
  rec.config = config;
  rec.values = values;
  rec.topology = config.topology(values);
  const BathTopology& topo = rec.topology;
  topo.validate();
  const TimeGrid& grid = config.grid;
  grid.validate();
  rec.times = grid.times();

  const int n = topo.n_qubits;
  const NodeId sys = topo.system_index;
  const std::vector<NodeId> logical = topo.logical_nodes();
  rec.bath_nodes = topo.bath_nodes();

  const OperatorMatrix h = build_total_hamiltonian(topo);
  const std::vector<CollapseOperator> collapse = build_collapse_operators(topo);

  std::vector<Observable> obs;
  for (PauliAxis a : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) obs.push_back({"sys", lift_pauli(a, sys, n)});
  for (NodeId b : rec.bath_nodes) {
    for (PauliAxis a : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) obs.push_back({"bath", lift_pauli(a, b, n)});
  }
  const int energy_col = static_cast<int>(obs.size());
  obs.push_back({"energy_system", local_energy_operator(topo, logical)});
  obs.push_back({"energy_bath", local_energy_operator(topo, rec.bath_nodes)});
  obs.push_back({"energy_interaction", build_interaction_hamiltonian(topo)});
  obs.push_back({"dissipative_flow", dissipative_flow_operator(h, collapse)});

  EvolveOptions ev;
  ev.step_factor = options.step_factor;
  ev.substeps = options.substeps;
  ev.omega_max = topo.max_omega();
  ev.positivity_stride = options.positivity_stride;

  try {
    const DensityMatrix rho0 = initial_product_state(plus_state(), topo);
    ComplexMatrix last;
    EvolveOptions main_ev = ev;
    main_ev.on_sample = [&](int k, double, const ComplexMatrix& rho) {
      if (k == grid.n_points - 1) last = rho;
    };
    const Trajectory traj = evolve(h, collapse, rho0, grid, obs, main_ev);
    rec.substeps = traj.substeps;
    rec.step = traj.step;
    rec.final_state = last;
    rec.trace_error = traj.trace_error;
    rec.min_eigenvalue = traj.min_eigenvalue;
    for (int a = 0; a < 3; ++a) rec.system[static_cast<std::size_t>(a)] = real_column(traj, a);
    for (std::size_t b = 0; b < rec.bath_nodes.size(); ++b) {
      std::array<std::vector<double>, 3> s;
      for (int a = 0; a < 3; ++a) s[static_cast<std::size_t>(a)] = real_column(traj, 3 + 3 * static_cast<int>(b) + a);
      rec.bath.push_back(std::move(s));
    }
    rec.energy_system = real_column(traj, energy_col);
    rec.energy_bath = real_column(traj, energy_col + 1);
    rec.energy_interaction = real_column(traj, energy_col + 2);
    rec.dissipative_flow = real_column(traj, energy_col + 3);

    const DensityMatrix target = thermal_qubit_state(topo.beta, topo.omega[static_cast<std::size_t>(sys)]);
    rec.thermal_entropy = von_neumann_entropy(target);
    rec.entropy.resize(rec.times.size());
    rec.fidelity.resize(rec.times.size());
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      const ComplexMatrix r = bloch_state(rec.system[0][k], rec.system[1][k], rec.system[2][k]);
      rec.entropy[k] = von_neumann_entropy(r);
      rec.fidelity[k] = uhlmann_fidelity(r, target.matrix());
    }

    if (options.backflow) {
      std::array<std::vector<ComplexMatrix>, 2> reduced;
      for (int s = 0; s < 2; ++s) {
        EvolveOptions pair_ev = ev;
        auto& store = reduced[static_cast<std::size_t>(s)];
        store.reserve(rec.times.size());
        pair_ev.on_sample = [&](int, double, const ComplexMatrix& rho) { store.push_back(partial_trace(rho, logical, n)); };
        evolve(h, collapse, initial_product_state(basis_state(2, s), topo), grid, {}, pair_ev);
      }
      rec.trace_distance.resize(rec.times.size());
      for (std::size_t k = 0; k < rec.times.size(); ++k) {
        rec.trace_distance[k] = trace_distance(reduced[0][k], reduced[1][k]);
      }
      rec.backflow = blp_backflow(rec.trace_distance, grid, options.backflow_options);
    }

    if (options.correlator && !rec.bath_nodes.empty()) {
      CorrelatorOptions co;
      co.axis = config.bath_axis;
      co.evolve = ev;
      rec.correlator = bath_correlator(topo, rho0, grid, co);
      rec.spectral_density = spectral_density(rec.correlator, grid);
      rec.sharpness = peak_sharpness(rec.spectral_density);
    }
  } catch (const IntegrationError& e) {
    throw IntegrationError(std::string(e.what()) + " [" + describe(config, values, run_id) + "]", e.step());
  }

  rec.sx_spectrum = real_spectrum(rec.system[0], grid);
  rec.dominant = dominant_frequency(rec.sx_spectrum);
  rec.features = fft_features(rec.system[0], rec.system[1], rec.system[2], grid);

  const EigenSystem es = eigensystem(effective_hamiltonian(h, collapse));
  rec.deps = deps(es.eigenvalues);
  rec.deps_degenerate = !(rec.deps > 0.0);
  const PetermannResult pk = petermann_factors(es);
  rec.k_max = pk.k_max;
  rec.k_flagged = pk.any_flagged();

  for (std::size_t i = 0; i < 4; ++i) {
    bool flagged = false;
    rec.targets[i] = lookup(values, kTargetNames[i], flagged);
    rec.target_flags[i] = flagged;
  }
  rec.targets[4] = options.backflow ? rec.backflow.rate : kNaN;
  rec.target_flags[4] = !options.backflow;
  rec.targets[5] = rec.deps_degenerate ? kNaN : std::log(rec.deps);
  rec.target_flags[5] = rec.deps_degenerate;
  rec.targets[6] = rec.dominant.value;
  rec.target_flags[6] = rec.dominant.degenerate;

  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<std::string> emit_outputs(const RunRecord& rec, const std::string& out_dir) {
  namespace fs = std::filesystem;
  ensure_directory(out_dir);
  std::vector<std::string> files;
  auto path = [&](const std::string& name) {
    files.push_back((fs::path(out_dir) / name).string());
    return files.back();
  };
  const OutputFlags& flags = rec.config.outputs;
  const std::vector<double>& t = rec.times;

  if (flags.observables) {
    write_columns(path("source_observables.csv"), {"t", "sx", "sy", "sz"},
                  {&t, &rec.system[0], &rec.system[1], &rec.system[2]});
    std::vector<std::string> pop_header{"t"};
    std::vector<const std::vector<double>*> pop_cols{&t};
    std::vector<std::string> coh_header{"t"};
    std::vector<const std::vector<double>*> coh_cols{&t};
    for (std::size_t b = 0; b < rec.bath_nodes.size(); ++b) {
      const std::string id = std::to_string(rec.bath_nodes[b]);
      pop_header.push_back("sz_" + id);
      pop_cols.push_back(&rec.bath[b][2]);
      coh_header.push_back("sx_" + id);
      coh_cols.push_back(&rec.bath[b][0]);
      coh_header.push_back("sy_" + id);
      coh_cols.push_back(&rec.bath[b][1]);
    }
    write_columns(path("bath_populations.csv"), pop_header, pop_cols);
    write_columns(path("bath_coherences.csv"), coh_header, coh_cols);
  }

  if (flags.features) {
    CsvTable f;
    f.header.push_back("run_id");
    for (std::size_t i = 0; i < rec.features.values.size(); ++i) f.header.push_back("f_" + std::to_string(i));
    std::vector<double> row{static_cast<double>(rec.run_id)};
    row.insert(row.end(), rec.features.values.begin(), rec.features.values.end());
    f.rows.push_back(std::move(row));
    write_csv(path("features.csv"), f);

    CsvTable tg;
    tg.header.push_back("run_id");
    tg.header.insert(tg.header.end(), kTargetNames.begin(), kTargetNames.end());
    std::vector<double> trow{static_cast<double>(rec.run_id)};
    trow.insert(trow.end(), rec.targets.begin(), rec.targets.end());
    tg.rows.push_back(std::move(trow));
    write_csv(path("targets.csv"), tg);
  }

  if (flags.spectra) {
    if (!rec.correlator.empty()) {
      std::vector<double> re, im, mag;
      for (const Complex& c : rec.correlator) {
        re.push_back(c.real());
        im.push_back(c.imag());
        mag.push_back(std::abs(c));
      }
      write_columns(path("correlator.csv"), {"t", "re", "im", "abs"}, {&t, &re, &im, &mag});
      write_columns(path("spectral_density.csv"), {"f", "magnitude"},
                    {&rec.spectral_density.freqs, &rec.spectral_density.mags});
    }
    write_columns(path("sx_spectrum.csv"), {"f", "magnitude"}, {&rec.sx_spectrum.freqs, &rec.sx_spectrum.mags});
  }

  if (flags.diagnostics) {
    std::vector<std::string> header{"t",           "entropy",          "fidelity",    "energy_system",
                                    "energy_bath", "energy_interaction", "dissipative_flow", "trace_error",
                                    "min_eigenvalue"};
    std::vector<const std::vector<double>*> cols{&t,
                                                 &rec.entropy,
                                                 &rec.fidelity,
                                                 &rec.energy_system,
                                                 &rec.energy_bath,
                                                 &rec.energy_interaction,
                                                 &rec.dissipative_flow,
                                                 &rec.trace_error,
                                                 &rec.min_eigenvalue};
    if (!rec.trace_distance.empty()) {
      header.insert(header.end(), {"trace_distance", "trace_distance_smoothed", "trace_distance_slope"});
      cols.insert(cols.end(), {&rec.trace_distance, &rec.backflow.smoothed, &rec.backflow.derivative});
    }
    write_columns(path("diagnostics.csv"), header, cols);

    const std::string plots = (fs::path(out_dir) / "plots").string();
    ensure_directory(plots);
    auto pair = [&](const std::string& name, const std::string& xn, const std::vector<double>& x,
                    const std::string& yn, const std::vector<double>& y) {
      write_columns(path("plots/" + name + ".csv"), {xn, yn}, {&x, &y});
    };
    pair("system_sx", "t", t, "sx", rec.system[0]);
    pair("system_sy", "t", t, "sy", rec.system[1]);
    pair("system_sz", "t", t, "sz", rec.system[2]);
    pair("system_entropy", "t", t, "entropy", rec.entropy);
    pair("thermal_fidelity", "t", t, "fidelity", rec.fidelity);
    pair("energy_system", "t", t, "energy", rec.energy_system);
    pair("energy_bath", "t", t, "energy", rec.energy_bath);
    pair("energy_interaction", "t", t, "energy", rec.energy_interaction);
    pair("heat_flow", "t", t, "dissipative_flow", rec.dissipative_flow);
    if (!rec.trace_distance.empty()) pair("trace_distance", "t", t, "D", rec.trace_distance);
    if (!rec.correlator.empty()) {
      std::vector<double> mag, re, im;
      for (const Complex& c : rec.correlator) {
        mag.push_back(std::abs(c));
        re.push_back(c.real());
        im.push_back(c.imag());
      }
      pair("correlator_abs", "t", t, "abs_C", mag);
      pair("correlator_re", "t", t, "re_C", re);
      pair("correlator_im", "t", t, "im_C", im);
      pair("spectral_density", "f", rec.spectral_density.freqs, "abs_J", rec.spectral_density.mags);
    }
    pair("sx_spectrum", "f", rec.sx_spectrum.freqs, "magnitude", rec.sx_spectrum.mags);
  }

  if (flags.states && rec.final_state.size() > 0) {
    CsvTable s;
    s.header = {"row", "col", "re", "im"};
    for (Eigen::Index i = 0; i < rec.final_state.rows(); ++i) {
      for (Eigen::Index j = 0; j < rec.final_state.cols(); ++j) {
        s.rows.push_back({static_cast<double>(i), static_cast<double>(j), rec.final_state(i, j).real(),
                          rec.final_state(i, j).imag()});
      }
    }
    write_csv(path("final_state.csv"), s);
  }

  nlohmann::json j;
  j["name"] = rec.config.name;
  j["citation"] = rec.config.citation;
  if (!rec.config.note.empty()) j["note"] = rec.config.note;
  j["run_id"] = rec.run_id;
  j["parameters"] = rec.values;
  j["n_qubits"] = rec.topology.n_qubits;
  j["beta"] = rec.topology.beta;
  j["grid"] = {{"name", rec.config.grid_name},
               {"t_start", rec.config.grid.t_start},
               {"t_end", rec.config.grid.t_end},
               {"n_points", rec.config.grid.n_points},
               {"dt", rec.config.grid.dt()},
               {"nyquist", rec.config.grid.nyquist()},
               {"resolution", rec.config.grid.resolution()}};
  j["integrator"] = {{"substeps", rec.substeps}, {"step", rec.step}};
  double max_trace = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  for (double v : rec.trace_error) max_trace = std::max(max_trace, v);
  for (double v : rec.min_eigenvalue) {
    if (std::isfinite(v)) min_eig = std::min(min_eig, v);
  }
  j["physicality"] = {{"max_trace_error", max_trace}, {"min_eigenvalue", finite_or_null(min_eig)}};
  j["thermal_entropy"] = rec.thermal_entropy;
  j["final_entropy"] = rec.entropy.empty() ? nlohmann::json(nullptr) : nlohmann::json(rec.entropy.back());
  j["final_fidelity"] = rec.fidelity.empty() ? nlohmann::json(nullptr) : nlohmann::json(rec.fidelity.back());
  if (!rec.trace_distance.empty()) {
    j["backflow"] = {{"total", rec.backflow.total},
                     {"rate", rec.backflow.rate},
                     {"threshold", rec.backflow.threshold},
                     {"intervals", rec.backflow.positive_intervals.size()}};
  }
  j["dominant_frequency"] = {{"value", rec.dominant.value}, {"degenerate", rec.dominant.degenerate}};
  j["peak_sharpness"] = rec.sharpness;
  j["deps"] = {{"value", rec.deps}, {"degenerate", rec.deps_degenerate}};
  j["k_max"] = {{"value", rec.k_max}, {"ep_flagged", rec.k_flagged}};
  j["feature_degenerate"] = {{"x", rec.features.degenerate[0]},
                             {"y", rec.features.degenerate[1]},
                             {"z", rec.features.degenerate[2]}};
  nlohmann::json targets;
  for (std::size_t i = 0; i < kTargetNames.size(); ++i) {
    targets[kTargetNames[i]] = {{"value", finite_or_null(rec.targets[i])}, {"flagged", rec.target_flags[i]}};
  }
  j["targets"] = targets;
  j["seconds"] = rec.seconds;
  j["files"] = files;
  write_text(path("summary.json"), j.dump(2) + "\n");
  return files;
}

std::vector<ParamMap> draw_parameters(const RunConfig& config, int n_runs) {
  if (n_runs < 1) throw ValidationError("n_runs must be >= 1");
  std::mt19937_64 gen(config.seed);
  std::vector<ParamMap> out;
  out.reserve(static_cast<std::size_t>(n_runs));
  for (int r = 0; r < n_runs; ++r) {
    ParamMap values = config.params;
    for (const auto& [key, range] : config.randomize) {
      const double u = unit_draw(gen);
      if (range.min == range.max) {
        values[key] = range.min;
      } else if (sampling_for(key) == Sampling::Log) {
        const double lo = std::log(range.min);
        values[key] = std::exp(lo + u * (std::log(range.max) - lo));
      } else {
        values[key] = range.min + u * (range.max - range.min);
      }
    }
    out.push_back(std::move(values));
  }
  return out;
}

std::size_t BatchResult::failures() const {
  std::size_t n = 0;
  for (const BatchRow& r : rows) n += r.ok ? 0 : 1;
  return n;
}

ml::Dataset BatchResult::dataset() const {
  ml::Dataset ds;
  ds.target_names.assign(kTargetNames.begin(), kTargetNames.end());
  std::vector<const BatchRow*> ok;
  for (const BatchRow& r : rows) {
    if (r.ok) ok.push_back(&r);
  }
  const Eigen::Index nf = ok.empty() ? 0 : static_cast<Eigen::Index>(ok.front()->features.size());
  ds.features.resize(static_cast<Eigen::Index>(ok.size()), nf);
  ds.targets.resize(static_cast<Eigen::Index>(ok.size()), static_cast<Eigen::Index>(kTargetNames.size()));
  for (std::size_t i = 0; i < ok.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index c = 0; c < nf; ++c) ds.features(row, c) = ok[i]->features[static_cast<std::size_t>(c)];
    for (std::size_t c = 0; c < kTargetNames.size(); ++c) ds.targets(row, static_cast<Eigen::Index>(c)) = ok[i]->targets[c];
    ds.run_ids.push_back(ok[i]->run_id);
  }
  return ds;
}

BatchResult run_batch(const RunConfig& config, const BatchOptions& options) {
  if (config.randomize.empty()) throw ValidationError("batch config has no 'randomize' ranges");
  if (options.workers < 1) throw ValidationError("workers must be >= 1");
  config.validate();
  const std::vector<ParamMap> draws = draw_parameters(config, options.n_runs);

  BatchResult result;
  result.rows.resize(draws.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= draws.size()) return;
      BatchRow& row = result.rows[i];
      row.run_id = static_cast<long>(i);
      row.values = draws[i];
      const auto start = std::chrono::steady_clock::now();
      try {
        const RunRecord rec = run_single(config, draws[i], row.run_id, options.run);
        row.features = rec.features.values;
        row.targets = rec.targets;
        row.target_flags = rec.target_flags;
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
        row.targets.fill(kNaN);
      }
      if (options.progress) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::lock_guard<std::mutex> lock(progress_mutex);
        options.progress(row.run_id, row.ok, secs);
      }
    }
  };

  const int n_threads = std::min<int>(options.workers, static_cast<int>(draws.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
  }
  return result;
}

std::vector<std::string> emit_batch(const BatchResult& result, const RunConfig& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  ensure_directory(out_dir);
  std::vector<std::string> files;
  auto path = [&](const std::string& name) {
    files.push_back((fs::path(out_dir) / name).string());
    return files.back();
  };

  const ml::Dataset ds = result.dataset();
  CsvTable f;
  f.header.push_back("run_id");
  for (Eigen::Index i = 0; i < ds.features.cols(); ++i) f.header.push_back("f_" + std::to_string(i));
  CsvTable tg;
  tg.header.push_back("run_id");
  tg.header.insert(tg.header.end(), kTargetNames.begin(), kTargetNames.end());
  for (Eigen::Index r = 0; r < ds.features.rows(); ++r) {
    std::vector<double> row{static_cast<double>(ds.run_ids[static_cast<std::size_t>(r)])};
    for (Eigen::Index c = 0; c < ds.features.cols(); ++c) row.push_back(ds.features(r, c));
    f.rows.push_back(std::move(row));
    std::vector<double> trow{static_cast<double>(ds.run_ids[static_cast<std::size_t>(r)])};
    for (Eigen::Index c = 0; c < ds.targets.cols(); ++c) trow.push_back(ds.targets(r, c));
    tg.rows.push_back(std::move(trow));
  }
  write_csv(path("features.csv"), f);
  write_csv(path("targets.csv"), tg);

  CsvTable runs;
  runs.header = {"run_id", "ok"};
  for (const auto& [key, v] : config.params) runs.header.push_back(key);
  for (const auto& [key, range] : config.randomize) {
    if (!config.params.count(key)) runs.header.push_back(key);
  }
  for (const std::string& name : kTargetNames) runs.header.push_back("flag_" + name);
  for (const BatchRow& r : result.rows) {
    std::vector<double> row{static_cast<double>(r.run_id), r.ok ? 1.0 : 0.0};
    for (std::size_t c = 2; c < runs.header.size() - kTargetNames.size(); ++c) {
      const auto it = r.values.find(runs.header[c]);
      row.push_back(it == r.values.end() ? kNaN : it->second);
    }
    for (bool flag : r.target_flags) row.push_back(flag ? 1.0 : 0.0);
    runs.rows.push_back(std::move(row));
  }
  write_csv(path("runs.csv"), runs);

  std::ostringstream failures;
  failures << "run_id,error\n";
  for (const BatchRow& r : result.rows) {
    if (!r.ok) failures << r.run_id << ',' << csv_quote(r.error) << '\n';
  }
  write_text(path("failures.csv"), failures.str());

  nlohmann::json j;
  j["name"] = config.name;
  j["seed"] = config.seed;
  j["n_runs"] = result.rows.size();
  j["failures"] = result.failures();
  j["dataset_rows"] = ds.features.rows();
  nlohmann::json ranges;
  for (const auto& [key, range] : config.randomize) {
    ranges[key] = {{"min", range.min},
                   {"max", range.max},
                   {"sampling", sampling_for(key) == Sampling::Log ? "log-uniform" : "uniform"}};
  }
  j["randomize"] = ranges;
  j["files"] = files;
  write_text(path("batch_summary.json"), j.dump(2) + "\n");
  return files;
}

}  // namespace qbath
