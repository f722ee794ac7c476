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

#include "artifactgen/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace artifactgen::commands {

namespace fs = std::filesystem;

// Output layout of curate:
//   config.json  class_map.csv  splits.csv  manifest.json  split_report.json  run.json
//   windows/<split>/w<index>.agw
struct CurateResult {
  fs::path manifest;
  std::size_t windows = 0;
  std::string config_hash;
};
/// `input_dir` empty: synthetic corpus from data.synthetic.
CurateResult curate(const RunConfig& cfg, const fs::path& input_dir, const fs::path& out_dir);

// Output layout of train:
//   config.json  loss.csv  run.json  last.agck  best.agck  model.agck (copy of the selected one)
struct TrainOutcome {
  fs::path model;
  std::size_t steps = 0;
  bool early_stopped = false;
};
TrainOutcome train(const RunConfig& cfg, const std::string& model, const fs::path& manifest, const fs::path& out_dir);

struct SampleOptions {
  fs::path checkpoint;
  int label = 0;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> steps;   // ddpm only
  std::optional<double> guidance;     // ddpm only
  bool conditional_only = false;      // ddpm only: never evaluate the null branch
  bool live_weights = false;          // ddpm only: skip the EMA shadow
  std::size_t batch = 32;
  fs::path out_dir;
};
// Writes c<label>_<index>.agw and provenance_c<label>.json; several classes may share a directory.
std::vector<fs::path> sample(const SampleOptions& opt);

struct FakeSource {
  std::string name;  // "ddpm", "wgan", ...
  fs::path dir;
};
/// "name=dir" or a bare dir named after its provenance model kind (ddpm, wgan) or its basename.
FakeSource parse_fake_source(const std::string& spec);

// Writes report.json, report.txt and run.json.
struct EvaluateOutcome {
  fs::path report_json;
  fs::path report_txt;
};
EvaluateOutcome evaluate(const RunConfig& cfg, const fs::path& manifest, const std::vector<FakeSource>& fakes,
                         const fs::path& out_dir);

/// AGW1 files of a directory in name order.
std::vector<fs::path> window_files(const fs::path& dir);

const char* code_version();

}  // namespace artifactgen::commands
