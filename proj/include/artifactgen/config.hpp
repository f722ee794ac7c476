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
#include "artifactgen/ddpm.hpp"
#include "artifactgen/signal.hpp"
#include "artifactgen/wgan.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace artifactgen {

struct SyntheticBlock {
  std::size_t n_per_class = 20;
  std::size_t subjects = 10;
  double gap_seconds = 0.5;
  double background_uv = 5.0;
};

struct DataConfig {
  std::vector<std::string> channels = data::canonical_montage();
  double sample_rate = 250.0;
  double window_seconds = 1.0;
  double overlap = 0.5;
  data::NormScheme normalization = data::NormScheme::minmax_window;
  std::string filtering = "raw";
  std::string input_dir;  // recordings for curate (ignored with --synthetic)
  std::string split_csv;  // optional subject,split table
  std::string class_map;  // optional label_name,index table
  SyntheticBlock synthetic;
};

struct GanBlock {
  std::size_t latent_dim = 128;
  std::vector<std::size_t> generator_widths = {128, 128, 64, 32};
  std::vector<std::size_t> critic_widths = {32, 64, 128, 128};
  gan::CriticNorm critic_norm = gan::CriticNorm::none;
  gan::TrainConfig train;  // seed is filled from RunConfig::seed
  std::string checkpoint = "last";  // which checkpoint sampling uses: last | best
};

struct DdpmBlock {
  diffusion::UNetConfig unet;  // channels/classes are taken from the data
  std::size_t timesteps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  std::string prediction = "epsilon";
  diffusion::DiffusionTrainConfig train;
  diffusion::SamplerConfig sampler;
  std::string checkpoint = "last";
};

struct EvalBlock {
  std::vector<signal::BandSpec> bands;  // empty: canonical bands
  std::size_t welch_nperseg = 0;        // 0: min(L, 256)
  double welch_overlap = 0.5;
  bool welch_detrend = true;
  std::string kernel = "rbf_median";
  std::size_t max_lag = 50;
  std::size_t knn_k = 5;
  std::string real_split = "test";  // or "all"
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "runs/default";
  DataConfig data;
  GanBlock gan;
  DdpmBlock ddpm;
  EvalBlock eval;
};

/// Strict parse: unknown keys, wrong types and out-of-range values are config errors.
RunConfig parse_config(const std::string& yaml_text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON (sorted keys, every field explicit).
std::string config_to_json(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

/// ARTIFACTGEN_SEED, when set, replaces cfg.seed. Returns true if applied.
bool apply_env_overrides(RunConfig& cfg);

}  // namespace artifactgen
