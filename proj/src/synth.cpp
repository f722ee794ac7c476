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

#include "artifactgen/synth.hpp"

#include "artifactgen/error.hpp"
#include "artifactgen/hash.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace artifactgen::synth {

namespace {

using Rng = std::mt19937_64;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Montage order: Fp1 Fp2 C3 C4 O1 O2 T3 T4
std::vector<ArtifactTemplate> make_templates() {
  return {
      {"muscle", 30.0, 100.0, Envelope::burst, {0.1, 0.1, 0.3, 0.3, 0.1, 0.1, 1.0, 1.0},
       {0, 0, 0, 0, 0, 0, -30, 30}, 20.0},
      {"eye", 1.0, 4.0, Envelope::slow_wave, {1.0, -1.0, 0.2, -0.2, 0.05, -0.05, 0.3, -0.3},
       {30, 30, 0, 0, 0, 0, 0, 0}, 40.0},
      {"electrode", 0.5, 4.0, Envelope::step, {0, 0, 0, 0, 0, 0, 0, 0},
       {0, 0, 0, 0, 0, 0, 0, 0}, 60.0},
      {"chewing", 20.0, 40.0, Envelope::rhythmic, {0.4, 0.4, 0.3, 0.3, 0.1, 0.1, 1.0, 1.0},
       {0, 0, -15, -15, 0, 0, 25, 25}, 30.0},
      {"shiver", 8.0, 12.0, Envelope::tremor, {0.8, 0.8, 1.0, 1.0, 0.9, 0.9, 0.8, 0.8},
       {0, 0, 15, 15, -25, -25, 0, 0}, 20.0},
  };
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Sum of random-phase sinusoids with frequencies drawn from [lo, hi], unit RMS.
std::vector<double> band_noise(std::size_t n, double fs, double lo, double hi, std::size_t components, Rng& rng) {
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < components; ++k) {
    const double f = uniform(rng, lo, hi);
    const double ph = uniform(rng, 0.0, kTwoPi);
    for (std::size_t t = 0; t < n; ++t) out[t] += std::sin(kTwoPi * f * static_cast<double>(t) / fs + ph);
  }
  const double scale = std::sqrt(2.0 / static_cast<double>(components));
  for (double& v : out) v *= scale;
  return out;
}

double gaussian_bump(double t, double centre, double width) {
  const double z = (t - centre) / width;
  return std::exp(-0.5 * z * z);
}

}  // namespace

const std::vector<ArtifactTemplate>& templates() {
  static const std::vector<ArtifactTemplate> t = make_templates();
  return t;
}

std::vector<double> pink_noise(std::size_t n, Rng& rng) {
  // Paul Kellett's refined 1/f filter over white noise.
  std::normal_distribution<double> white(0.0, 1.0);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  auto next = [&] {
    const double w = white(rng);
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    const double out = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
    return out;
  };
  for (int i = 0; i < 2000; ++i) next();  // settle the slow poles
  std::vector<double> out(n);
  double mean = 0.0;
  for (auto& v : out) {
    v = next();
    mean += v;
  }
  mean /= static_cast<double>(std::max<std::size_t>(n, 1));
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  const double sd = n > 1 ? std::sqrt(var / static_cast<double>(n)) : 1.0;
  for (double& v : out) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  return out;
}

Matrix synthesize_artifact(std::size_t cls, std::size_t length, double fs, Rng& rng) {
  const auto& all = templates();
  require(cls < all.size(), ErrorKind::invalid_argument, "synth: unknown class index " + std::to_string(cls));
  const auto& tpl = all[cls];
  const std::size_t nc = tpl.topography.size();
  Matrix out(nc, length);
  const double dur = static_cast<double>(length) / fs;
  std::vector<double> s(length, 0.0);

  switch (tpl.envelope) {
    case Envelope::burst: {  // muscle: band-limited noise under 1-3 Gaussian bursts
      const auto carrier = band_noise(length, fs, tpl.carrier_lo, std::min(tpl.carrier_hi, 0.49 * fs), 24, rng);
      const int bursts = std::uniform_int_distribution<int>(1, 3)(rng);
      std::vector<double> env(length, 0.0);
      for (int b = 0; b < bursts; ++b) {
        const double c = uniform(rng, 0.15, 0.85) * dur;
        const double w = uniform(rng, 0.08, 0.2) * dur;
        for (std::size_t t = 0; t < length; ++t) env[t] += gaussian_bump(static_cast<double>(t) / fs, c, w);
      }
      for (std::size_t t = 0; t < length; ++t) s[t] = tpl.amplitude_uv * std::min(env[t], 1.5) * carrier[t];
      break;
    }
    case Envelope::slow_wave: {  // eye: slow deflection, random polarity
      const double f = uniform(rng, tpl.carrier_lo, tpl.carrier_hi);
      const double ph = uniform(rng, 0.0, kTwoPi);
      const double sign = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
      const double a = tpl.amplitude_uv * uniform(rng, 0.7, 1.3) * sign;
      for (std::size_t t = 0; t < length; ++t) s[t] = a * std::sin(kTwoPi * f * static_cast<double>(t) / fs + ph);
      break;
    }
    case Envelope::step: {  // electrode pop: one channel, step + exponential decay + spike
      const std::size_t ch = std::uniform_int_distribution<std::size_t>(0, nc - 1)(rng);
      const auto t0 = static_cast<std::size_t>(uniform(rng, 0.1, 0.6) * static_cast<double>(length));
      const double tau = uniform(rng, 0.2, 0.5);
      const double sign = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
      const double a = tpl.amplitude_uv * uniform(rng, 0.8, 1.4) * sign;
      for (std::size_t t = t0; t < length; ++t) {
        const double dt = static_cast<double>(t - t0) / fs;
        double v = a * std::exp(-dt / tau);
        if (t - t0 < 3) v += 1.5 * a * (1.0 - static_cast<double>(t - t0) / 3.0);
        out(ch, t) = v;
      }
      return out;
    }
    case Envelope::rhythmic: {  // chewing: 1-2 Hz train of 20-40 Hz bursts
      const double rate = uniform(rng, 1.0, 2.0);
      const double ph = uniform(rng, 0.0, 1.0 / rate);
      const auto carrier = band_noise(length, fs, tpl.carrier_lo, tpl.carrier_hi, 12, rng);
      for (std::size_t t = 0; t < length; ++t) {
        const double tt = static_cast<double>(t) / fs;
        const double cyc = std::fmod(tt + ph, 1.0 / rate) * rate;  // [0,1)
        s[t] = tpl.amplitude_uv * gaussian_bump(cyc, 0.5, 0.15) * carrier[t];
      }
      break;
    }
    case Envelope::tremor: {  // shiver: sustained narrow-band oscillation
      const double f = uniform(rng, tpl.carrier_lo, tpl.carrier_hi);
      const double ph = uniform(rng, 0.0, kTwoPi);
      const double a = tpl.amplitude_uv * uniform(rng, 0.8, 1.2);
      const double wobble = uniform(rng, 0.0, 0.3);
      for (std::size_t t = 0; t < length; ++t) {
        const double tt = static_cast<double>(t) / fs;
        s[t] = a * (1.0 + wobble * std::sin(kTwoPi * 0.7 * tt)) * std::sin(kTwoPi * f * tt + ph);
      }
      break;
    }
  }
  for (std::size_t c = 0; c < nc; ++c) {
    const double gain = tpl.topography[c] * uniform(rng, 0.85, 1.15);
    for (std::size_t t = 0; t < length; ++t) out(c, t) = gain * s[t] + tpl.offset_uv[c];
  }
  return out;
}

std::vector<data::Recording> generate_corpus(const SynthConfig& cfg) {
  require(cfg.n_per_class >= 1, ErrorKind::invalid_argument, "synth: n_per_class must be >= 1");
  require(cfg.sample_rate > 0.0 && cfg.window_seconds > 0.0, ErrorKind::invalid_argument,
          "synth: sample rate and window length must be positive");
  require(cfg.subjects >= 1, ErrorKind::invalid_argument, "synth: at least one subject required");
  const auto& tpls = templates();
  const auto& montage = data::canonical_montage();
  const std::size_t nc = montage.size();
  const auto length = static_cast<std::size_t>(std::floor(cfg.window_seconds * cfg.sample_rate));
  const auto gap = static_cast<std::size_t>(std::floor(cfg.gap_seconds * cfg.sample_rate));
  require(length >= 2, ErrorKind::invalid_argument, "synth: window shorter than two samples");

  // (class, index) events dealt round-robin to subjects, then shuffled per subject.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> events(cfg.subjects);
  for (std::size_t k = 0; k < tpls.size(); ++k)
    for (std::size_t i = 0; i < cfg.n_per_class; ++i) events[(k * cfg.n_per_class + i) % cfg.subjects].push_back({k, i});

  std::vector<data::Recording> out;
  for (std::size_t s = 0; s < cfg.subjects; ++s) {
    if (events[s].empty()) continue;
    Rng rng(mix_seed(cfg.seed, s));
    std::shuffle(events[s].begin(), events[s].end(), rng);

    data::Recording rec;
    char id[32];
    std::snprintf(id, sizeof id, "synth-s%03zu", s);
    rec.id = std::string(id) + "-r0";
    rec.subject_id = id;
    rec.fs = cfg.sample_rate;
    rec.channel_names = montage;
    const std::size_t total = gap + events[s].size() * (length + gap);
    rec.data = Matrix(nc, total);

    // Background: per-channel pink noise with a shared component.
    const auto common = pink_noise(total, rng);
    for (std::size_t c = 0; c < nc; ++c) {
      const auto own = pink_noise(total, rng);
      for (std::size_t t = 0; t < total; ++t)
        rec.data(c, t) = cfg.background_uv * (0.8 * own[t] + 0.6 * common[t]);
    }
    std::size_t pos = gap;
    for (const auto& [k, i] : events[s]) {
      Rng ev(mix_seed(mix_seed(cfg.seed, 1000003 + k), i));
      const Matrix a = synthesize_artifact(k, length, cfg.sample_rate, ev);
      for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t t = 0; t < length; ++t) rec.data(c, pos + t) += a(c, t);
      rec.annotations.push_back({pos, pos + length, tpls[k].label});
      pos += length + gap;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<data::Window> generate_windows(const SynthConfig& cfg) {
  const auto corpus = generate_corpus(cfg);
  const auto classes = data::ClassMap::canonical();
  std::vector<data::Window> out;
  for (const auto& rec : corpus) {
    auto w = data::extract_windows(rec, cfg.window_seconds, 0.0, classes, data::canonical_montage());
    for (auto& x : w) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace artifactgen::synth
