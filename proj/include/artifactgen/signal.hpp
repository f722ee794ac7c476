// Copyright 2026 The ArtifactGen Authors.
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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace artifactgen {

/// Dense row-major matrix of doubles. Multi-channel signals are stored
/// channel-major (one row per channel).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

namespace signal {

enum class Taper { hann, boxcar };

struct WelchOptions {
  std::size_t nperseg = 256;
  double overlap_frac = 0.5;
  Taper taper = Taper::hann;
  bool detrend = true;  // per-segment mean removal
};

/// Default Welch settings for a signal of length L: nperseg = min(L, 256).
WelchOptions welch_defaults(std::size_t length);

/// One-sided power spectral density. freqs[k] = k * fs / nperseg.
struct Psd {
  std::vector<double> freqs;
  std::vector<double> power;
  std::size_t nperseg = 0;
  std::size_t noverlap = 0;

  double bin_width() const { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

/// Averaged, density-scaled periodogram over tapered segments.
Psd welch_psd(std::span<const double> x, double fs, const WelchOptions& opt);

struct BandSpec {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

/// delta [0.5,4), theta [4,8), alpha [8,13), beta [13,30), gamma [30,100),
/// upper edges clipped to Nyquist.
std::vector<BandSpec> canonical_bands(double fs);

struct BandPower {
  double value = 0.0;
  bool empty = false;  // no PSD bins fell inside the band
};

/// Rectangle-rule integral of psd.power over bins with lo <= f < hi.
BandPower band_power(const Psd& psd, const BandSpec& band);

struct Acf {
  std::vector<double> r;  // length max_lag + 1
  bool degenerate = false;  // zero-variance input
};

/// Biased, variance-normalized autocorrelation; r[0] == 1.
Acf autocorrelation(std::span<const double> x, std::size_t max_lag);

/// Sample covariance across time of a C x L signal (divisor L - 1).
Matrix channel_covariance(const Matrix& window);

/// Hann-windowed magnitude STFT; result is frames x (nfft/2 + 1).
Matrix stft_magnitude(std::span<const double> x, std::size_t nfft, std::size_t hop);

/// Periodic Hann taper of length n.
std::vector<double> hann(std::size_t n);

}  // namespace signal
}  // namespace artifactgen
