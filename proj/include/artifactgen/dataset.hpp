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

#include "artifactgen/signal.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace artifactgen::data {

inline constexpr double kNormEps = 1e-8;

/// Canonical eight-channel montage.
const std::vector<std::string>& canonical_montage();

enum class NormScheme { minmax_window, zscore_recording, none };

std::string to_string(NormScheme scheme);
NormScheme parse_norm_scheme(const std::string& name);

struct NormMeta {
  NormScheme scheme = NormScheme::none;
  double min = 0.0;  // minmax: joint extrema over all channels and samples
  double max = 0.0;
  std::vector<double> mean;  // zscore: per channel
  std::vector<double> std;
  double eps = kNormEps;
  bool degenerate = false;  // constant window, or at least one constant channel

  bool operator==(const NormMeta&) const = default;
};

struct Annotation {
  std::size_t start = 0;  // sample index, inclusive
  std::size_t end = 0;    // exclusive
  std::string label;
};

struct Recording {
  std::string id;
  std::string subject_id;
  double fs = 250.0;
  std::vector<std::string> channel_names;
  Matrix data;  // C x T, microvolts
  std::vector<Annotation> annotations;
  NormMeta norm;
};

struct Window {
  Matrix data;  // C x L
  int label = 0;
  std::string subject_id;
  std::string recording_id;
  std::size_t start_sample = 0;
  NormMeta norm;

  std::size_t channels() const { return data.rows; }
  std::size_t length() const { return data.cols; }
};

/// Stable label <-> index mapping.
class ClassMap {
 public:
  ClassMap() = default;
  explicit ClassMap(std::vector<std::string> names);

  /// muscle, eye, electrode, chewing, shiver.
  static ClassMap canonical();

  std::size_t size() const { return names_.size(); }
  std::optional<int> index_of(const std::string& name) const;
  const std::string& name_of(int index) const;
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const ClassMap&) const = default;

 private:
  std::vector<std::string> names_;
};

ClassMap read_class_map_csv(const std::filesystem::path& path);
void write_class_map_csv(const std::filesystem::path& path, const ClassMap& map);

// Windowing arithmetic.
std::size_t window_length(double seconds, double fs);
std::size_t stride(std::size_t length, double overlap);
std::size_t window_count(std::size_t interval, std::size_t length, std::size_t stride);

struct RejectionLog {
  std::vector<std::string> entries;
};

/// Cuts every annotated interval into full windows; an interval too short for
/// one window yields a single right-zero-padded window. Channels are selected
/// by name in montage order. A recording lacking a montage channel yields no
/// windows.
std::vector<Window> extract_windows(const Recording& rec, double seconds, double overlap,
                                    const ClassMap& classes, std::span<const std::string> montage,
                                    RejectionLog* log = nullptr);

/// Per-window min-max to [-1, 1] with joint extrema; stores (m, M) in w.norm.
NormMeta minmax_normalize(Window& w);
/// Inverse of minmax_normalize using w.norm.
void minmax_denormalize(Window& w);

/// Per-recording, per-channel z-score (population std).
Recording zscore_normalize(const Recording& rec);

// AGW1 window files: "AGW1", u32 C, u32 L, u32 label, C*L float32, all little-endian.
std::vector<std::uint8_t> encode_window(const Window& w);
Window decode_window(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");
void write_window_file(const std::filesystem::path& path, const Window& w);
Window read_window_file(const std::filesystem::path& path);

struct ManifestEntry {
  std::string path;  // relative to the manifest directory
  int label = 0;
  std::string subject;
  std::string split;
  std::size_t length = 0;
  NormMeta norm;

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  int version = 1;
  std::string config_hash;
  std::uint64_t seed = 0;
  ClassMap class_map;
  double sample_rate = 250.0;
  std::vector<std::string> channels;
  NormScheme normalization = NormScheme::none;
  std::vector<ManifestEntry> entries;

  bool operator==(const Manifest&) const = default;
};

std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);
void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

/// Loads every window referenced by the manifest, restoring labels, subjects and norm metadata.
std::vector<Window> load_manifest_windows(const std::filesystem::path& manifest_path, const Manifest& m,
                                          const std::optional<std::string>& split = std::nullopt);

// Subject-wise splits.
inline const std::vector<std::string> kSplits = {"train", "val", "test"};

/// Reads "subject_id,split"; a subject listed under two splits is a leakage error.
std::map<std::string, std::string> read_split_csv(const std::filesystem::path& path);
void write_split_csv(const std::filesystem::path& path, const std::map<std::string, std::string>& splits);

/// Deterministic seeded subject assignment, roughly 70/15/15.
std::map<std::string, std::string> assign_splits(std::vector<std::string> subjects, std::uint64_t seed);

struct SplitStats {
  std::size_t subjects = 0;
  std::size_t windows = 0;
  std::vector<std::size_t> windows_per_class;
};

struct SplitReport {
  std::map<std::string, SplitStats> splits;
  std::vector<std::string> warnings;
};

/// Throws ErrorKind::leakage naming the subject if any subject spans two splits.
SplitReport validate_split(const Manifest& m);

// Raw recording interchange: <stem>.json descriptor + <stem>.f32 (C*T float32 LE, channel-major).
void write_recording(const std::filesystem::path& dir, const Recording& rec);
std::vector<Recording> read_recording_dir(const std::filesystem::path& dir);

}  // namespace artifactgen::data
