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

// Acceptance checks. `acceptance N` runs criterion N and prints one verdict line
// "criterion N: PASS|FAIL ..." preceded by indented detail lines; without arguments all nine run.
// The exit status is nonzero when the criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qbath/config.hpp"
#include "qbath/diagnostics.hpp"
#include "qbath/ml.hpp"
#include "qbath/nonhermitian.hpp"
#include "qbath/pipeline.hpp"
#include "qbath/spectral.hpp"

namespace {

using namespace qbath;

// Pinned tolerances.
constexpr double kThermalFidelity = 0.999;
constexpr double kSettleTime = 50.0;
constexpr double kBathEntropy = 0.582;
constexpr double kEntropyTolerance = 0.005;
constexpr double kCriterion1Seconds = 60.0;

constexpr double kTraceTolerance = 1e-8;
constexpr double kPositivityTolerance = -1e-8;
constexpr double kHalvingTolerance = 1e-6;
constexpr double kCriterion2Seconds = 15.0 * 60.0;

constexpr double kDetailedBalanceInfidelity = 1e-6;

constexpr double kExample1Max = 0.01;
constexpr double kExample2Min = 0.13;
constexpr double kExample2Max = 0.24;
constexpr double kExampleRatio = 20.0;

constexpr double kLongResolution = 6.67e-4;
constexpr double kResolutionTolerance = 1e-6;

constexpr double kHermitianPetermann = 1e-9;
constexpr double kEpDeps = 1e-10;

constexpr int kBatchRuns = 200;
constexpr int kPcaComponents = 4;
constexpr double kTrainFraction = 0.8;
constexpr std::uint64_t kModelSeed = 2024;
constexpr double kR2Couplings = 0.6;
constexpr double kR2LogDeps = 0.4;
constexpr int kDeterminismRuns = 4;
constexpr double kCriterion8Seconds = 90.0 * 60.0;

constexpr double kLarmorTolerance = 1e-6;
constexpr double kDampingTolerance = 1e-4;
constexpr double kCorrelatorTolerance = 1e-6;
constexpr double kBellTolerance = 1e-12;
constexpr double kReconstructionTolerance = 1e-9;

const double kTwoPi = 2.0 * std::numbers::pi;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void detail(const char* fmt, auto... args) {
  std::printf("  ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

bool verdict(int n, bool pass, const std::string& summary) {
  std::printf("criterion %d: %s %s\n", n, pass ? "PASS" : "FAIL", summary.c_str());
  std::fflush(stdout);
  return pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunOptions evolution_only() {
  RunOptions o;
  o.backflow = false;
  o.correlator = false;
  return o;
}

// ---------------------------------------------------------------------------------------------

bool criterion1() {
  Stopwatch clock;
  const RunConfig cfg = preset("triangle-weak");
  const RunRecord r = run_single(cfg);
  const double secs = clock.seconds();

  double worst_after = 1.0;
  double settle = -1.0;
  for (std::size_t k = r.times.size(); k-- > 0;) {
    if (r.fidelity[k] <= kThermalFidelity) break;
    settle = r.times[k];
  }
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    if (r.times[k] >= kSettleTime) worst_after = std::min(worst_after, r.fidelity[k]);
  }
  const double s_end = r.entropy.back();
  detail("fidelity > %.3f holds from t = %.2f to t_end = %.0f", kThermalFidelity, settle, r.times.back());
  detail("minimum fidelity for t >= %.0f: %.6f", kSettleTime, worst_after);
  detail("final system entropy %.6f nats (thermal %.6f)", s_end, r.thermal_entropy);
  detail("runtime %.1f s", secs);
  const bool ok_fid = worst_after > kThermalFidelity;
  const bool ok_s = std::abs(s_end - kBathEntropy) <= kEntropyTolerance;
  const bool ok_t = secs < kCriterion1Seconds;
  return verdict(1, ok_fid && ok_s && ok_t,
                 fmt("(min F(t>=50) = %.6f, S_end = %.4f, %.1f s)", worst_after, s_end, secs));
}

// ---------------------------------------------------------------------------------------------

struct PhysicalityResult {
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  double halving = 0.0;
  int substeps = 0;
};

PhysicalityResult physicality(const RunConfig& cfg) {
  const BathTopology topo = cfg.topology();
  const int n = topo.n_qubits;
  const OperatorMatrix h = build_total_hamiltonian(topo);
  const std::vector<CollapseOperator> ops = build_collapse_operators(topo);
  std::vector<Observable> obs;
  for (NodeId q = 0; q < n; ++q) {
    for (PauliAxis a : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) obs.push_back({"q", lift_pauli(a, q, n)});
  }
  const DensityMatrix rho0 = initial_product_state(plus_state(), topo);

  EvolveOptions ev;
  ev.omega_max = topo.max_omega();
  ev.trace_tolerance = 1.0;
  ev.positivity_tolerance = 1.0;
  const Trajectory base = evolve(h, ops, rho0, cfg.grid, obs, ev);

  EvolveOptions fine = ev;
  fine.substeps = 2 * base.substeps;
  fine.positivity_stride = 0;
  const Trajectory half = evolve(h, ops, rho0, cfg.grid, obs, fine);

  PhysicalityResult r;
  r.substeps = base.substeps;
  r.trace_error = *std::max_element(base.trace_error.begin(), base.trace_error.end());
  r.min_eigenvalue = *std::min_element(base.min_eigenvalue.begin(), base.min_eigenvalue.end());
  r.halving = (base.expectations - half.expectations).cwiseAbs().maxCoeff();
  return r;
}

bool criterion2() {
  Stopwatch clock;
  double worst_trace = 0.0;
  double worst_eig = std::numeric_limits<double>::infinity();
  double worst_halving = 0.0;
  for (const PresetInfo& p : list_presets()) {
    Stopwatch one;
    const RunConfig cfg = preset(p.name);
    const PhysicalityResult r = physicality(cfg);
    detail("%-22s grid %-5s substeps %2d  max|Tr-1| %.2e  min eig %+.2e  halving %.2e  (%.1f s)", p.name.c_str(),
           cfg.grid_name.c_str(), r.substeps, r.trace_error, r.min_eigenvalue, r.halving, one.seconds());
    worst_trace = std::max(worst_trace, r.trace_error);
    worst_eig = std::min(worst_eig, r.min_eigenvalue);
    worst_halving = std::max(worst_halving, r.halving);
  }
  const double secs = clock.seconds();
  detail("runtime %.1f s", secs);
  const bool ok = worst_trace < kTraceTolerance && worst_eig >= kPositivityTolerance &&
                  worst_halving < kHalvingTolerance && secs < kCriterion2Seconds;
  return verdict(2, ok,
                 fmt("(max|Tr-1| = %.2e, min eig = %.2e, max halving change = %.2e, %.0f s)", worst_trace, worst_eig,
                     worst_halving, secs));
}

// ---------------------------------------------------------------------------------------------

bool criterion3() {
  bool ok = true;
  double worst = 1.0;
  for (auto [beta, omega] : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}, std::pair{1.0, 2.0}}) {
    BathTopology t;
    t.n_qubits = 1;
    t.omega = {omega};
    t.beta = beta;
    const double gamma = 0.5;
    t.thermal = {{0, gamma}};
    EvolveOptions ev;
    ev.omega_max = omega;
    ComplexMatrix last;
    const TimeGrid grid{0.0, 20.0 / gamma, 801};
    ev.on_sample = [&](int k, double, const ComplexMatrix& rho) {
      if (k == grid.n_points - 1) last = rho;
    };
    evolve(build_total_hamiltonian(t), build_collapse_operators(t), plus_state(), grid, {}, ev);
    const double f = uhlmann_fidelity(last, thermal_qubit_state(beta, omega).matrix());
    detail("beta %.0f omega %.0f: fidelity to thermal state 1 - %.2e", beta, omega, 1.0 - f);
    worst = std::min(worst, f);
    ok = ok && f > 1.0 - kDetailedBalanceInfidelity;
  }
  return verdict(3, ok, fmt("(worst infidelity %.2e)", 1.0 - worst));
}

// ---------------------------------------------------------------------------------------------

bool criterion4() {
  RunOptions opts;
  opts.correlator = false;
  const RunRecord a = run_single(preset("backflow-example1"), opts);
  const RunRecord b = run_single(preset("backflow-example2"), opts);
  const double n1 = a.backflow.total;
  const double n2 = b.backflow.total;
  detail("example 1: backflow total %.6g (threshold %.3g, %zu intervals)", n1, a.backflow.threshold,
         a.backflow.positive_intervals.size());
  detail("example 2: backflow total %.6g (threshold %.3g, %zu intervals)", n2, b.backflow.threshold,
         b.backflow.positive_intervals.size());
  const bool ratio_ok = n2 >= kExampleRatio * n1;
  detail("ratio example2 / example1: %s", n1 > 0.0 ? fmt("%.1f", n2 / n1).c_str() : "unbounded");
  const bool ok = n1 < kExample1Max && n2 >= kExample2Min && n2 <= kExample2Max && ratio_ok;
  return verdict(4, ok, fmt("(N1 = %.4g, N2 = %.4g)", n1, n2));
}

// ---------------------------------------------------------------------------------------------

bool criterion5() {
  const double target = 1.0 / kTwoPi;
  const double long_df = named_grid("long").resolution();
  detail("long-grid resolution %.6e", long_df);
  bool ok = std::abs(long_df - kLongResolution) <= kResolutionTolerance;
  int checked = 0;
  int missed = 0;
  RunOptions opts = evolution_only();
  opts.positivity_stride = 0;
  for (const PresetInfo& p : list_presets()) {
    const RunConfig cfg = preset(p.name);
    const BathTopology topo = cfg.topology();
    if (!std::all_of(topo.omega.begin(), topo.omega.end(), [](double w) { return w == 1.0; })) continue;
    const RunRecord r = run_single(cfg, opts);
    const double df = cfg.grid.resolution();
    const bool hit = std::abs(r.dominant.value - target) <= df;
    detail("%-22s f_dom %.6f  |f_dom - 1/(2 pi)| %.2e  (df %.2e) %s", p.name.c_str(), r.dominant.value,
           std::abs(r.dominant.value - target), df, hit ? "ok" : "MISS");
    ++checked;
    if (!hit) ++missed;
  }
  ok = ok && missed == 0 && checked > 0;
  return verdict(5, ok, fmt("(%d of %d presets within df of 1/(2 pi); long df = %.4e)", checked - missed, checked,
                            long_df));
}

// ---------------------------------------------------------------------------------------------

int count_local_maxima(const std::vector<double>& v) {
  int count = 0;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    if (v[k] > v[k - 1] && v[k] >= v[k + 1]) ++count;
  }
  return count;
}

// Envelope of an oscillating |C(t)|: the values at its successive local maxima.
std::vector<double> peak_envelope(const std::vector<double>& v) {
  std::vector<double> peaks;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    if (v[k] > v[k - 1] && v[k] >= v[k + 1]) peaks.push_back(v[k]);
  }
  return peaks;
}

std::size_t envelope_increases(const std::vector<double>& v) {
  const std::vector<double> env = peak_envelope(v);
  std::size_t n = 0;
  for (std::size_t j = 1; j < env.size(); ++j) {
    if (env[j] > env[j - 1]) ++n;
  }
  return n;
}

bool criterion6() {
  RunOptions opts;
  opts.backflow = false;
  opts.positivity_stride = 0;
  double sharp[3];
  std::vector<double> env[3];
  const char* names[3] = {"non-markovian", "intermediate", "markovian"};
  for (int i = 0; i < 3; ++i) {
    const RunRecord r = run_single(preset(names[i]), opts);
    sharp[i] = r.sharpness;
    for (const Complex& c : r.correlator) env[i].push_back(std::abs(c));
    detail("%-14s peak sharpness %.3f  |C(t)| local maxima %d", names[i], sharp[i], count_local_maxima(env[i]));
  }
  const std::size_t violations = envelope_increases(env[2]);
  const bool mono = violations == 0;
  detail("markovian |C(t)| envelope: %zu peaks, %zu increases", peak_envelope(env[2]).size(), violations);
  const int maxima = count_local_maxima(env[0]);
  const bool ok = sharp[0] > sharp[1] && sharp[1] > sharp[2] && mono && maxima >= 3;
  return verdict(6, ok,
                 fmt("(sharpness %.2f > %.2f > %.2f; markovian monotone %s; non-markovian maxima %d)", sharp[0],
                     sharp[1], sharp[2], mono ? "yes" : "no", maxima));
}

// ---------------------------------------------------------------------------------------------

bool criterion7() {
  auto heff_of = [](const char* name) {
    const BathTopology t = preset(name).topology();
    return effective_hamiltonian(build_total_hamiltonian(t), build_collapse_operators(t));
  };
  const OperatorMatrix nm = heff_of("non-markovian");
  const OperatorMatrix mk = heff_of("markovian");
  const double deps_nm = deps(nm);
  const double deps_mk = deps(mk);
  const double k_nm = petermann_factors(nm).k_max;
  const double k_mk = petermann_factors(mk).k_max;
  detail("non-markovian: DEPS %.6g  K_max %.6g", deps_nm, k_nm);
  detail("markovian:     DEPS %.6g  K_max %.6g", deps_mk, k_mk);

  double worst_herm = 0.0;
  for (const char* name : {"non-markovian", "markovian", "triangle-weak", "two-logical-qubits"}) {
    const double k = petermann_factors(build_total_hamiltonian(preset(name).topology())).k_max;
    worst_herm = std::max(worst_herm, std::abs(k - 1.0));
  }
  detail("Hermitian limit: max |K_max - 1| = %.2e", worst_herm);

  double worst_ep = 0.0;
  for (double gamma : {0.2, 1.0, 3.0}) {
    OperatorMatrix m(2, 2);
    m << 0.0, gamma / 2.0, gamma / 2.0, Complex(0.0, -gamma);
    worst_ep = std::max(worst_ep, deps(m));
  }
  detail("2x2 model at g = gamma/2: max DEPS %.2e", worst_ep);
  const bool ok = deps_nm < deps_mk && k_nm > k_mk && worst_herm <= kHermitianPetermann && worst_ep <= kEpDeps;
  return verdict(7, ok, fmt("(DEPS %.3g < %.3g, K_max %.4g > %.4g)", deps_nm, deps_mk, k_nm, k_mk));
}

// ---------------------------------------------------------------------------------------------

bool criterion8() {
  Stopwatch clock;
  const RunConfig cfg = preset("batch-jsb");
  BatchOptions opts;
  opts.n_runs = kBatchRuns;
  opts.progress = [&](long id, bool ok, double secs) {
    if ((id + 1) % 20 == 0 || !ok) detail("run %ld %s (%.1f s, elapsed %.0f s)", id + 1, ok ? "ok" : "FAILED", secs,
                                          clock.seconds());
  };
  const BatchResult batch = run_batch(cfg, opts);
  detail("batch: %zu runs, %zu failed", batch.rows.size(), batch.failures());

  ml::Dataset ds = batch.dataset();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < ds.rows(); ++r) {
    if (ds.targets.row(r).allFinite()) keep.push_back(r);
  }
  ds = ds.subset(keep);
  const auto [train, test] = ml::train_test_split(ds, kTrainFraction, kModelSeed);
  const ml::Pipeline model = ml::fit_pipeline(train, kPcaComponents, ml::GbtHyper{}, kModelSeed);
  const RealMatrix pred = model.predict(test.features);
  const std::vector<ml::TargetScore> scores = ml::evaluate(pred, test.targets);
  auto r2 = [&](const char* name) {
    const int i = ds.target_index(name);
    return i < 0 ? std::nan("") : scores[static_cast<std::size_t>(i)].r2;
  };
  for (std::size_t i = 0; i < scores.size(); ++i) {
    detail("%-14s test R2 %8.4f  MSE %.4g", ds.target_names[i].c_str(), scores[i].r2, scores[i].mse);
  }

  // Determinism: refit on the same data, and rerun the first runs of the batch.
  const ml::Pipeline again = ml::fit_pipeline(train, kPcaComponents, ml::GbtHyper{}, kModelSeed);
  bool deterministic = (again.predict(test.features) - pred).cwiseAbs().maxCoeff() == 0.0;
  BatchOptions small = opts;
  small.n_runs = kDeterminismRuns;
  small.progress = nullptr;
  const BatchResult rerun = run_batch(cfg, small);
  for (int k = 0; k < kDeterminismRuns; ++k) {
    const BatchRow& a = batch.rows[static_cast<std::size_t>(k)];
    const BatchRow& b = rerun.rows[static_cast<std::size_t>(k)];
    deterministic = deterministic && a.values == b.values && a.features == b.features;
    for (std::size_t t = 0; t < a.targets.size(); ++t) {
      const bool same = a.targets[t] == b.targets[t] || (std::isnan(a.targets[t]) && std::isnan(b.targets[t]));
      deterministic = deterministic && same;
    }
  }
  const double secs = clock.seconds();
  detail("bit-deterministic refit and rerun: %s", deterministic ? "yes" : "no");
  detail("runtime %.0f s", secs);
  const double r_jsb = r2("J_sb");
  const double r_jl12 = r2("J_L12");
  const double r_deps = r2("log_deps");
  const bool ok = r_jsb > kR2Couplings && r_jl12 > kR2Couplings && r_deps > kR2LogDeps && deterministic &&
                  secs < kCriterion8Seconds;
  return verdict(8, ok,
                 fmt("(R2 J_sb %.3f, J_L12 %.3f, log_deps %.3f; deterministic %s; %.0f s)", r_jsb, r_jl12, r_deps,
                     deterministic ? "yes" : "no", secs));
}

// ---------------------------------------------------------------------------------------------

bool criterion9() {
  bool all = true;
  auto check = [&](const char* what, double err, double tol) {
    const bool ok = err <= tol;
    detail("%-34s error %.2e (tolerance %.0e) %s", what, err, tol, ok ? "ok" : "FAIL");
    all = all && ok;
  };

  {
    BathTopology t;
    t.n_qubits = 1;
    t.omega = {1.0};
    EvolveOptions ev;
    ev.omega_max = 1.0;
    const TimeGrid grid{0.0, 10.0, 201};
    const std::vector<Observable> obs = {{"sx", pauli_matrix(PauliAxis::X)}};
    const Trajectory tr = evolve(build_total_hamiltonian(t), {}, plus_state(), grid, obs, ev);
    double err = 0.0;
    for (int k = 0; k < grid.n_points; ++k) {
      err = std::max(err, std::abs(tr.expectations(k, 0).real() - std::cos(grid.time(k))));
    }
    check("Larmor precession <sx> = cos t", err, kLarmorTolerance);
  }
  {
    BathTopology t;
    t.n_qubits = 1;
    t.omega = {1.0};
    t.beta = 1000.0;
    t.thermal = {{0, 0.1}};
    EvolveOptions ev;
    ev.omega_max = 1.0;
    const std::vector<Observable> obs = {
        {"p", 0.5 * (ComplexMatrix::Identity(2, 2) + pauli_matrix(PauliAxis::Z))}};
    const Trajectory tr =
        evolve(build_total_hamiltonian(t), build_collapse_operators(t), basis_state(2, 0), {0.0, 10.0, 101}, obs, ev);
    check("amplitude damping p(10) = e^-1", std::abs(tr.expectations(100, 0).real() - std::exp(-1.0)),
          kDampingTolerance);
  }
  {
    BathTopology t;
    t.n_qubits = 2;
    t.omega = {1.0, 1.0};
    const TimeGrid grid{0.0, 20.0, 401};
    const std::vector<Complex> c = bath_correlator(t, grid);
    const double sz = -std::tanh(0.5);
    double err = 0.0;
    for (int k = 0; k < grid.n_points; ++k) {
      const Complex want(std::cos(grid.time(k)), sz * std::sin(grid.time(k)));
      err = std::max(err, std::abs(c[static_cast<std::size_t>(k)] - want));
    }
    check("single-qubit C(t) closed form", err, kCorrelatorTolerance);
  }
  {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
    const DensityMatrix bell(m);
    check("Bell negativity 0.5", std::abs(negativity(bell, {0}, 2) - 0.5), kBellTolerance);
    check("Bell mutual information 2 ln 2", std::abs(mutual_information(bell, {0}, 2) - 2.0 * std::numbers::ln2),
          kBellTolerance);
  }
  {
    std::mt19937_64 gen(9);
    std::normal_distribution<double> g;
    RealMatrix x(50, 6);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = g(gen);
    const ml::PcaModel p = ml::pca_fit(x, 6);
    check("PCA full-rank reconstruction", (ml::pca_inverse_transform(p, ml::pca_transform(p, x)) - x).cwiseAbs().maxCoeff(),
          kReconstructionTolerance);
  }
  {
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RealMatrix x(40, 1);
    RealMatrix y(40, 1);
    for (int i = 0; i < 40; ++i) {
      x(i, 0) = u(gen);
      y(i, 0) = x(i, 0) <= 0.37 ? 1.0 : 4.0;
    }
    std::vector<double> s(x.data(), x.data() + 40);
    std::sort(s.begin(), s.end());
    const auto cut = std::upper_bound(s.begin(), s.end(), 0.37) - s.begin();
    const double want = s[static_cast<std::size_t>(cut - 1)] +
                        0.5 * (s[static_cast<std::size_t>(cut)] - s[static_cast<std::size_t>(cut - 1)]);
    const ml::GbtModel m = ml::gbt_fit(x, y, {1, 1, 1.0, 1.0}, 0);
    const double thr = m.ensembles[0].trees[0].nodes[0].threshold;
    const double mse = (ml::gbt_predict(m, x) - y).squaredNorm() / 40.0;
    check("GBT single-split threshold", std::abs(thr - want), 0.0);
    check("GBT single-split training MSE", mse, 1e-20);
  }
  return verdict(9, all, all ? "(all oracle equivalences hold)" : "(an oracle equivalence failed)");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<bool()>> criteria = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (int n = 1; n <= 9; ++n) which.push_back(n);
  }
  bool all = true;
  for (int n : which) {
    if (n < 1 || n > 9) {
      std::fprintf(stderr, "unknown criterion %d\n", n);
      return 2;
    }
    try {
      all = criteria[static_cast<std::size_t>(n - 1)]() && all;
    } catch (const std::exception& e) {
      all = verdict(n, false, std::string("(error: ") + e.what() + ")") && all;
    }
  }
  return all ? 0 : 1;
}
