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

#ifndef QBATH_SPECTRAL_HPP
#define QBATH_SPECTRAL_HPP

#include <array>
#include <span>
#include <vector>

#include "qbath/core.hpp"
#include "qbath/lindblad.hpp"
#include "qbath/qubit_algebra.hpp"
#include "qbath/states.hpp"

namespace qbath {

/// One-sided magnitude spectrum. Frequencies are in cycles per time unit, bins 0..floor(N/2).
struct Spectrum {
  std::vector<double> freqs;
  std::vector<double> mags;
};

/// Discrete Fourier transform with kernel exp(sign * 2 pi i k n / N), unnormalized.
std::vector<Complex> dft(std::span<const Complex> x, int sign);

/// Bath operator sum_{bath nodes} sigma_axis.
OperatorMatrix bath_operator(const BathTopology& topo, PauliAxis axis = PauliAxis::X);

struct CorrelatorOptions {
  PauliAxis axis = PauliAxis::X;
  EvolveOptions evolve;
};

/// C(t_k) = Tr[B X(t_k)] with X(0) = B rho0 propagated by the Lindblad generator of `topo`.
std::vector<Complex> bath_correlator(const BathTopology& topo, const DensityMatrix& rho0, const TimeGrid& grid,
                                     const CorrelatorOptions& options = {});

/// Same, starting from the |+> system state with thermal bath nodes.
std::vector<Complex> bath_correlator(const BathTopology& topo, const TimeGrid& grid,
                                     const CorrelatorOptions& options = {});

/// |J(f)|: magnitude of sum_n (C_n - mean C) exp(+2 pi i k n / N) on the non-negative bins, so a
/// component exp(-i 2 pi f t) appears at +f.
Spectrum spectral_density(std::span<const Complex> c, const TimeGrid& grid);

/// One-sided magnitude spectrum of a mean-removed real series.
Spectrum real_spectrum(std::span<const double> x, const TimeGrid& grid);

struct DominantFrequency {
  double value = 0.0;
  bool degenerate = false;  ///< set when every nonzero bin is zero; value is then 0
};

/// Frequency of the largest bin, skipping the zero bin.
DominantFrequency dominant_frequency(const Spectrum& spec);

/// Peak magnitude over the mean magnitude, zero bin excluded; 0 for a flat-zero spectrum.
double peak_sharpness(const Spectrum& spec);

/// Concatenated log-normalized magnitude blocks in (x, y, z) order.
struct FeatureVector {
  std::vector<double> values;
  int bins_per_axis = 0;
  std::array<bool, 3> degenerate{};
};

/// Per axis: remove the mean, transform, A = |FFT| on bins 0..floor(N/2), log10(A + 1e-12), then
/// min-max scale to [0, 1]. A flat axis yields an all-zero block.
FeatureVector fft_features(std::span<const double> sx, std::span<const double> sy, std::span<const double> sz,
                           const TimeGrid& grid);

/// Log-normalized block for one real series.
std::vector<double> log_normalized_magnitudes(std::span<const double> x, bool* degenerate = nullptr);

/// Maps a block onto [0, 1] in place; a block without spread becomes all zeros and false is returned.
bool minmax_scale(std::span<double> block);

}  // namespace qbath

#endif  // QBATH_SPECTRAL_HPP
