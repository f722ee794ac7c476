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

#include "artifactgen/nn.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace artifactgen {

// Named-tensor container, little-endian:
//   "AGCK" u32 version | str kind | str meta_json | u64 step
//   u32 n_groups, per group: str name | u32 n_arrays,
//     per array: str name | u32 rank | u64 dims[rank] | f64 values[prod(dims)]
// Strings are u32 length + bytes.
struct NamedArray {
  std::string name;
  std::vector<std::uint64_t> shape;
  std::vector<double> values;
  bool operator==(const NamedArray&) const = default;
};

struct ArrayGroup {
  std::string name;
  std::vector<NamedArray> arrays;
  bool operator==(const ArrayGroup&) const = default;
};

struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;
  std::string kind;       // "gan" | "ddpm"
  std::string meta_json;  // architecture and training settings
  std::uint64_t step = 0;
  std::vector<ArrayGroup> groups;

  const ArrayGroup& group(const std::string& name) const;
  bool has_group(const std::string& name) const;
  bool operator==(const Checkpoint&) const = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// Adapters between model state and groups.
ArrayGroup params_group(const std::string& name, const nn::ModelParams& p);
/// Group with the parameter names and shapes of `p` but the given values (e.g. a saved snapshot).
ArrayGroup values_group(const std::string& name, const nn::ModelParams& p,
                        const std::vector<std::vector<double>>& values);
ArrayGroup ema_group(const std::string& name, const nn::ModelParams& p);
/// Two groups "<prefix>.m" and "<prefix>.v", plus the step count in a scalar array "<prefix>.step".
std::vector<ArrayGroup> optimizer_groups(const std::string& prefix, const nn::ModelParams& p, const nn::Adam& opt);

void load_params(const ArrayGroup& g, nn::ModelParams& p);
void load_ema(const ArrayGroup& g, nn::ModelParams& p);
void load_optimizer(const Checkpoint& ck, const std::string& prefix, nn::Adam& opt);

}  // namespace artifactgen
