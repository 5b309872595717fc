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

#include "qbath/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include <fftw3.h>

namespace qbath {
namespace {

// Serializes FFTW planner calls.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kLogEpsilon = 1e-12;
constexpr double kFlatTolerance = 1e-12;

void check_length(std::size_t n, const TimeGrid& grid) {
  grid.validate();
  if (static_cast<int>(n) != grid.n_points) {
    throw DomainError("series length " + std::to_string(n) + " does not match grid n_points " +
                      std::to_string(grid.n_points));
  }
}

std::vector<double> bin_frequencies(int n, double dt) {
  std::vector<double> f(static_cast<std::size_t>(n / 2 + 1));
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k) / (n * dt);
  return f;
}

bool is_flat(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double scale = std::max({1.0, std::abs(*lo), std::abs(*hi)});
  return (*hi - *lo) <= kFlatTolerance * scale;
}

}  // namespace

std::vector<Complex> dft(std::span<const Complex> x, int sign) {
  const int n = static_cast<int>(x.size());
  if (n == 0) return {};
  std::vector<Complex> in(x.begin(), x.end());
  std::vector<Complex> out(x.size());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()),
                            sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

OperatorMatrix bath_operator(const BathTopology& topo, PauliAxis axis) {
  topo.validate();
  const std::vector<NodeId> bath = topo.bath_nodes();
  if (bath.empty()) throw DomainError("topology has no bath nodes");
  OperatorMatrix b = OperatorMatrix::Zero(topo.dim(), topo.dim());
  for (NodeId node : bath) b += lift_pauli(axis, node, topo.n_qubits);
  return b;
}

std::vector<Complex> bath_correlator(const BathTopology& topo, const DensityMatrix& rho0, const TimeGrid& grid,
                                     const CorrelatorOptions& options) {
  const OperatorMatrix b = bath_operator(topo, options.axis);
  if (rho0.dim() != b.rows()) throw DomainError("initial state dimension does not match the topology");
  const OperatorMatrix h = build_total_hamiltonian(topo);
  const std::vector<CollapseOperator> collapse = build_collapse_operators(topo);
  const LindbladGenerator gen(h, collapse);
  EvolveOptions evolve = options.evolve;
  if (evolve.omega_max <= 0.0) evolve.omega_max = topo.max_omega();

  // Tr[B X] as a coefficient-wise sum against B^T.
  const ComplexMatrix bt = b.transpose();
  std::vector<Complex> c(static_cast<std::size_t>(grid.n_points));
  propagate_operator(gen, b * rho0.matrix(), grid, evolve, [&](int k, double, const ComplexMatrix& x) {
    c[static_cast<std::size_t>(k)] = x.cwiseProduct(bt).sum();
  });
  return c;
}

std::vector<Complex> bath_correlator(const BathTopology& topo, const TimeGrid& grid, const CorrelatorOptions& options) {
  return bath_correlator(topo, initial_product_state(plus_state(), topo), grid, options);
}

Spectrum spectral_density(std::span<const Complex> c, const TimeGrid& grid) {
  check_length(c.size(), grid);
  const Complex mean = std::accumulate(c.begin(), c.end(), Complex{0.0, 0.0}) / static_cast<double>(c.size());
  std::vector<Complex> centered(c.size());
  std::transform(c.begin(), c.end(), centered.begin(), [&](Complex v) { return v - mean; });
  const std::vector<Complex> f = dft(centered, +1);
  Spectrum s;
  s.freqs = bin_frequencies(grid.n_points, grid.dt());
  s.mags.resize(s.freqs.size());
  for (std::size_t k = 0; k < s.mags.size(); ++k) s.mags[k] = std::abs(f[k]);
  return s;
}

Spectrum real_spectrum(std::span<const double> x, const TimeGrid& grid) {
  check_length(x.size(), grid);
  const int n = grid.n_points;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  std::vector<double> in(x.size());
  std::transform(x.begin(), x.end(), in.begin(), [&](double v) { return v - mean; });
  std::vector<Complex> out(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  Spectrum s;
  s.freqs = bin_frequencies(n, grid.dt());
  s.mags.resize(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) s.mags[k] = std::abs(out[k]);
  return s;
}

DominantFrequency dominant_frequency(const Spectrum& spec) {
  if (spec.mags.empty() || spec.mags.size() != spec.freqs.size()) {
    throw DomainError("spectrum must be nonempty with matching freqs and mags");
  }
  DominantFrequency d;
  if (spec.mags.size() < 2) {
    d.degenerate = true;
    return d;
  }
  const auto peak = std::max_element(spec.mags.begin() + 1, spec.mags.end());
  if (!(*peak > 0.0)) {
    d.degenerate = true;
    return d;
  }
  d.value = spec.freqs[static_cast<std::size_t>(peak - spec.mags.begin())];
  return d;
}

double peak_sharpness(const Spectrum& spec) {
  if (spec.mags.size() < 2) return 0.0;
  const auto first = spec.mags.begin() + 1;
  const double peak = *std::max_element(first, spec.mags.end());
  const double mean = std::accumulate(first, spec.mags.end(), 0.0) / static_cast<double>(spec.mags.size() - 1);
  return mean > 0.0 ? peak / mean : 0.0;
}

std::vector<double> log_normalized_magnitudes(std::span<const double> x, bool* degenerate) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw DomainError("feature series needs at least 2 samples");
  const std::size_t bins = static_cast<std::size_t>(n / 2 + 1);
  if (is_flat(x)) {
    if (degenerate) *degenerate = true;
    return std::vector<double>(bins, 0.0);
  }
  const Spectrum s = real_spectrum(x, TimeGrid{0.0, 1.0, n});
  std::vector<double> a(bins);
  for (std::size_t k = 0; k < bins; ++k) a[k] = std::log10(s.mags[k] + kLogEpsilon);
  const bool scaled = minmax_scale(a);
  if (degenerate) *degenerate = !scaled;
  return a;
}

bool minmax_scale(std::span<double> block) {
  if (block.empty()) return false;
  const auto [lo, hi] = std::minmax_element(block.begin(), block.end());
  const double min = *lo;
  const double range = *hi - *lo;
  if (!(range > 0.0)) {
    std::fill(block.begin(), block.end(), 0.0);
    return false;
  }
  for (double& v : block) v = std::clamp((v - min) / range, 0.0, 1.0);
  return true;
}

FeatureVector fft_features(std::span<const double> sx, std::span<const double> sy, std::span<const double> sz,
                           const TimeGrid& grid) {
  if (sx.size() != sy.size() || sx.size() != sz.size()) throw DomainError("feature series differ in length");
  check_length(sx.size(), grid);
  FeatureVector f;
  f.bins_per_axis = grid.n_points / 2 + 1;
  f.values.reserve(static_cast<std::size_t>(3 * f.bins_per_axis));
  const std::array<std::span<const double>, 3> axes{sx, sy, sz};
  for (std::size_t a = 0; a < 3; ++a) {
    bool flat = false;
    const std::vector<double> block = log_normalized_magnitudes(axes[a], &flat);
    f.degenerate[a] = flat;
    f.values.insert(f.values.end(), block.begin(), block.end());
  }
  return f;
}

}  // namespace qbath
