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

#include "artifactgen/signal.hpp"

#include "artifactgen/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace artifactgen::signal {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Real-to-complex FFT of a fixed size with its own buffers. FFTW_ESTIMATE keeps
// the chosen algorithm independent of timing so results are reproducible.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::span<double> input() { return {in_, n_}; }
  std::size_t bins() const { return n_ / 2 + 1; }
  void execute() { fftw_execute(plan_); }
  double power(std::size_t k) const { return out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1]; }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

RealFft& fft_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<RealFft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealFft>(n);
  return *slot;
}

std::vector<double> taper_for(Taper t, std::size_t n) {
  if (t == Taper::hann) return hann(n);
  return std::vector<double>(n, 1.0);
}

}  // namespace

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n <= 1) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

WelchOptions welch_defaults(std::size_t length) {
  WelchOptions opt;
  opt.nperseg = std::min<std::size_t>(length, 256);
  return opt;
}

Psd welch_psd(std::span<const double> x, double fs, const WelchOptions& opt) {
  require(fs > 0.0, ErrorKind::invalid_argument, "welch_psd: sampling rate must be positive");
  require(opt.nperseg > 0, ErrorKind::invalid_argument, "welch_psd: nperseg must be positive");
  require(opt.nperseg <= x.size(), ErrorKind::invalid_argument, "welch_psd: segment longer than signal");
  require(opt.overlap_frac >= 0.0 && opt.overlap_frac < 1.0, ErrorKind::invalid_argument,
          "welch_psd: overlap_frac must be in [0,1)");

  const std::size_t n = opt.nperseg;
  const auto stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor((1.0 - opt.overlap_frac) * static_cast<double>(n))));
  const std::vector<double> w = taper_for(opt.taper, n);
  double u = 0.0;
  for (double v : w) u += v * v;

  RealFft& fft = fft_for(n);
  const std::size_t nb = fft.bins();
  std::vector<double> acc(nb, 0.0);
  std::size_t segments = 0;

  for (std::size_t start = 0; start + n <= x.size(); start += stride) {
    double mean = 0.0;
    if (opt.detrend) {
      for (std::size_t i = 0; i < n; ++i) mean += x[start + i];
      mean /= static_cast<double>(n);
    }
    auto in = fft.input();
    for (std::size_t i = 0; i < n; ++i) in[i] = (x[start + i] - mean) * w[i];
    fft.execute();
    for (std::size_t k = 0; k < nb; ++k) acc[k] += fft.power(k);
    ++segments;
  }

  const double scale = 1.0 / (fs * u * static_cast<double>(segments));
  Psd out;
  out.nperseg = n;
  out.noverlap = n - std::min(n, stride);
  out.freqs.resize(nb);
  out.power.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    out.freqs[k] = static_cast<double>(k) * fs / static_cast<double>(n);
    const bool edge = (k == 0) || (n % 2 == 0 && k == n / 2);
    out.power[k] = acc[k] * scale * (edge ? 1.0 : 2.0);
  }
  return out;
}

std::vector<BandSpec> canonical_bands(double fs) {
  const double nyq = fs / 2.0;
  std::vector<BandSpec> bands = {
      {"delta", 0.5, 4.0}, {"theta", 4.0, 8.0}, {"alpha", 8.0, 13.0},
      {"beta", 13.0, 30.0}, {"gamma", 30.0, 100.0},
  };
  for (auto& b : bands) b.hi = std::min(b.hi, nyq);
  return bands;
}

BandPower band_power(const Psd& psd, const BandSpec& band) {
  require(band.lo < band.hi, ErrorKind::invalid_argument,
          "band_power: band '" + band.name + "' has lo >= hi");
  const double df = psd.bin_width();
  BandPower out;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < psd.freqs.size(); ++k) {
    const double f = psd.freqs[k];
    if (f >= band.lo && f < band.hi) {
      out.value += psd.power[k] * df;
      ++hits;
    }
  }
  out.empty = hits == 0;
  return out;
}

Acf autocorrelation(std::span<const double> x, std::size_t max_lag) {
  require(max_lag < x.size(), ErrorKind::invalid_argument, "autocorrelation: max_lag must be < L");
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> c(n);
  double denom = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    c[t] = x[t] - mean;
    denom += c[t] * c[t];
  }
  Acf out;
  out.r.assign(max_lag + 1, 0.0);
  out.r[0] = 1.0;
  if (denom == 0.0) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double s = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) s += c[t] * c[t + lag];
    out.r[lag] = s / denom;
  }
  return out;
}

Matrix channel_covariance(const Matrix& window) {
  require(window.cols >= 2, ErrorKind::invalid_argument, "channel_covariance: need L >= 2");
  const std::size_t nc = window.rows;
  const std::size_t len = window.cols;
  Matrix centered = window;
  for (std::size_t c = 0; c < nc; ++c) {
    auto row = centered.row(c);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(len);
    for (double& v : row) v -= mean;
  }
  Matrix cov(nc, nc);
  const double div = static_cast<double>(len - 1);
  for (std::size_t a = 0; a < nc; ++a) {
    for (std::size_t b = a; b < nc; ++b) {
      auto ra = centered.row(a);
      auto rb = centered.row(b);
      double s = 0.0;
      for (std::size_t t = 0; t < len; ++t) s += ra[t] * rb[t];
      cov(a, b) = cov(b, a) = s / div;
    }
  }
  return cov;
}

Matrix stft_magnitude(std::span<const double> x, std::size_t nfft, std::size_t hop) {
  require(nfft > 0 && nfft <= x.size(), ErrorKind::invalid_argument, "stft_magnitude: nfft must be in [1, L]");
  require(hop >= 1, ErrorKind::invalid_argument, "stft_magnitude: hop must be >= 1");
  const std::size_t frames = (x.size() - nfft) / hop + 1;
  const std::vector<double> w = hann(nfft);
  RealFft& fft = fft_for(nfft);
  Matrix out(frames, fft.bins());
  for (std::size_t f = 0; f < frames; ++f) {
    auto in = fft.input();
    for (std::size_t i = 0; i < nfft; ++i) in[i] = x[f * hop + i] * w[i];
    fft.execute();
    for (std::size_t k = 0; k < fft.bins(); ++k) out(f, k) = std::sqrt(fft.power(k));
  }
  return out;
}

}  // namespace artifactgen::signal
