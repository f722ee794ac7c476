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

// Test-side oracles shared by the unit tests and the acceptance runner. Nothing
// here calls into the library's numerics.

#include "artifactgen/autodiff.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testing {

namespace ad = artifactgen::ad;

/// Naive one-sided density periodogram of a single segment with taper `w`,
/// optionally mean-removed first. scale: 1 / (fs * sum w^2), doubled off DC/Nyquist.
inline std::vector<double> dft_periodogram(std::vector<double> x, const std::vector<double>& w, double fs,
                                           bool detrend) {
  const std::size_t n = x.size();
  if (detrend) {
    double mu = 0.0;
    for (double v : x) mu += v;
    mu /= static_cast<double>(n);
    for (double& v : x) v -= mu;
  }
  double s2 = 0.0;
  for (double v : w) s2 += v * v;
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t)
      acc += x[t] * w[t] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(k * t) / static_cast<double>(n));
    double p = std::norm(acc) / (fs * s2);
    if (k != 0 && !(n % 2 == 0 && k == n / 2)) p *= 2.0;
    out[k] = p;
  }
  return out;
}

inline std::vector<double> periodic_hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / n);
  return w;
}

inline std::vector<double> sine(std::size_t n, double f, double fs, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * M_PI * f * static_cast<double>(i) / fs + phase);
  return x;
}

inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, sd);
  std::vector<double> x(n);
  for (double& v : x) v = nd(rng);
  return x;
}

inline ad::Tensor random_tensor(ad::Shape shape, std::uint64_t seed, double sd = 1.0, bool trainable = true) {
  auto v = gaussian(ad::numel(shape), seed, sd);
  auto t = ad::Tensor::from(std::move(shape), std::move(v));
  if (trainable) t.set_requires_grad(true);
  return t;
}

/// Norm-wise relative error ||analytic - numeric|| / ||numeric|| of the gradient of
/// scalar f() with respect to leaf `x`, numeric by central differences.
inline double gradcheck(const std::function<ad::Tensor()>& f, ad::Tensor x, double h = 1e-5) {
  const auto analytic = ad::grad(f(), {x})[0];
  double num2 = 0.0, diff2 = 0.0;
  auto vals = x.mutable_values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double keep = vals[i];
    vals[i] = keep + h;
    const double up = f().item();
    vals[i] = keep - h;
    const double down = f().item();
    vals[i] = keep;
    const double numeric = (up - down) / (2.0 * h);
    num2 += numeric * numeric;
    const double d = analytic.at(i) - numeric;
    diff2 += d * d;
  }
  return std::sqrt(diff2) / std::max(std::sqrt(num2), 1e-12);
}

/// Same measure over the concatenation of several leaves (e.g. all parameters of a
/// model), so a leaf whose true gradient is zero does not divide noise by noise.
inline double gradcheck(const std::function<ad::Tensor()>& f, const std::vector<ad::Tensor>& leaves,
                        double h = 1e-5) {
  const auto analytic = ad::grad(f(), leaves);
  double num2 = 0.0, diff2 = 0.0;
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    auto x = leaves[l];
    auto vals = x.mutable_values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double keep = vals[i];
      vals[i] = keep + h;
      const double up = f().item();
      vals[i] = keep - h;
      const double down = f().item();
      vals[i] = keep;
      const double numeric = (up - down) / (2.0 * h);
      num2 += numeric * numeric;
      const double d = analytic[l].at(i) - numeric;
      diff2 += d * d;
    }
  }
  return std::sqrt(diff2) / std::max(std::sqrt(num2), 1e-12);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("artifactgen-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
