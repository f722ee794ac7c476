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

#include "artifactgen/dataset.hpp"
#include "artifactgen/signal.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace artifactgen::synth {

enum class Envelope { burst, step, tremor, rhythmic, slow_wave };

struct ArtifactTemplate {
  std::string label;
  double carrier_lo = 0.0;  // Hz
  double carrier_hi = 0.0;
  Envelope envelope = Envelope::burst;
  std::vector<double> topography;  // per montage channel
  std::vector<double> offset_uv;   // class-specific DC pattern, per channel
  double amplitude_uv = 0.0;
};

/// Templates in canonical class order, for the canonical eight-channel montage.
const std::vector<ArtifactTemplate>& templates();

struct SynthConfig {
  std::size_t n_per_class = 20;
  double window_seconds = 1.0;
  double sample_rate = 250.0;
  std::uint64_t seed = 0;
  std::size_t subjects = 10;
  double gap_seconds = 0.5;      // background between events
  double background_uv = 5.0;    // pink-noise standard deviation
};

/// Unit-variance 1/f noise.
std::vector<double> pink_noise(std::size_t n, std::mt19937_64& rng);

/// Artifact component only (no background): C x L microvolts.
Matrix synthesize_artifact(std::size_t cls, std::size_t length, double fs, std::mt19937_64& rng);

/// One recording per subject; each event occupies one window-length annotation.
std::vector<data::Recording> generate_corpus(const SynthConfig& cfg);

/// Raw (unnormalized) windows cut from generate_corpus.
std::vector<data::Window> generate_windows(const SynthConfig& cfg);

}  // namespace artifactgen::synth
