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

#include "artifactgen/dataset.hpp"

#include "artifactgen/error.hpp"
#include "bytes.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace artifactgen::data {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& canonical_montage() {
  static const std::vector<std::string> m = {"Fp1", "Fp2", "C3", "C4", "O1", "O2", "T3", "T4"};
  return m;
}

std::string to_string(NormScheme scheme) {
  switch (scheme) {
    case NormScheme::minmax_window: return "minmax_window";
    case NormScheme::zscore_recording: return "zscore_recording";
    case NormScheme::none: return "none";
  }
  return "none";
}

NormScheme parse_norm_scheme(const std::string& name) {
  if (name == "minmax_window") return NormScheme::minmax_window;
  if (name == "zscore_recording") return NormScheme::zscore_recording;
  if (name == "none") return NormScheme::none;
  fail(ErrorKind::config, "unknown normalization scheme '" + name + "'");
}

// ---------------------------------------------------------------- class map

ClassMap::ClassMap(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string> seen(names_.begin(), names_.end());
  require(seen.size() == names_.size(), ErrorKind::config, "class map has duplicate labels");
}

ClassMap ClassMap::canonical() { return ClassMap({"muscle", "eye", "electrode", "chewing", "shiver"}); }

std::optional<int> ClassMap::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<int>(it - names_.begin());
}

const std::string& ClassMap::name_of(int index) const {
  require(index >= 0 && static_cast<std::size_t>(index) < names_.size(), ErrorKind::invalid_argument,
          "class index " + std::to_string(index) + " out of range");
  return names_[static_cast<std::size_t>(index)];
}

namespace {

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  s.erase(s.find_last_not_of(ws) + 1);
  return s;
}

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& path, const std::vector<std::string>& header) {
  std::istringstream in(detail::read_text(path));
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
    if (!have_header) {
      if (cells != header) {
        fail(ErrorKind::config, path.string() + ": expected header '" + header[0] + "," + header[1] + "'");
      }
      have_header = true;
      continue;
    }
    if (cells.size() != header.size()) {
      fail(ErrorKind::config, path.string() + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(header.size()) + " columns");
    }
    rows.push_back(std::move(cells));
  }
  require(have_header, ErrorKind::config, path.string() + ": empty CSV");
  return rows;
}

}  // namespace

ClassMap read_class_map_csv(const fs::path& path) {
  auto rows = read_csv_rows(path, {"label_name", "index"});
  std::vector<std::string> names(rows.size());
  std::vector<bool> filled(rows.size(), false);
  for (const auto& r : rows) {
    std::size_t idx = 0;
    try {
      idx = std::stoul(r[1]);
    } catch (const std::exception&) {
      fail(ErrorKind::config, path.string() + ": bad index '" + r[1] + "'");
    }
    require(idx < rows.size() && !filled[idx], ErrorKind::config,
            path.string() + ": indices must be a permutation of 0..K-1");
    names[idx] = r[0];
    filled[idx] = true;
  }
  return ClassMap(std::move(names));
}

void write_class_map_csv(const fs::path& path, const ClassMap& map) {
  std::string out = "label_name,index\n";
  for (std::size_t i = 0; i < map.size(); ++i) out += map.names()[i] + "," + std::to_string(i) + "\n";
  detail::write_text(path, out);
}

// ---------------------------------------------------------------- windowing

std::size_t window_length(double seconds, double fs) {
  require(seconds > 0.0 && fs > 0.0, ErrorKind::invalid_argument, "window_length: S and fs must be positive");
  const auto len = static_cast<std::size_t>(std::floor(seconds * fs));
  require(len > 0, ErrorKind::invalid_argument, "window_length: window shorter than one sample");
  return len;
}

std::size_t stride(std::size_t length, double overlap) {
  require(overlap >= 0.0 && overlap < 1.0, ErrorKind::invalid_argument, "stride: overlap must be in [0,1)");
  const auto s = static_cast<std::size_t>(std::floor((1.0 - overlap) * static_cast<double>(length)));
  require(s >= 1, ErrorKind::invalid_argument, "overlap too high for L");
  return s;
}

std::size_t window_count(std::size_t interval, std::size_t length, std::size_t stride) {
  require(length >= 1 && stride >= 1, ErrorKind::invalid_argument, "window_count: L and s must be >= 1");
  if (interval < length) return 0;
  return (interval - length) / stride + 1;
}

std::vector<Window> extract_windows(const Recording& rec, double seconds, double overlap, const ClassMap& classes,
                                    std::span<const std::string> montage, RejectionLog* log) {
  std::vector<std::size_t> rows;
  for (const auto& ch : montage) {
    auto it = std::find(rec.channel_names.begin(), rec.channel_names.end(), ch);
    if (it == rec.channel_names.end()) {
      if (log) log->entries.push_back(rec.id + ": missing channel " + ch + "; recording rejected");
      return {};
    }
    rows.push_back(static_cast<std::size_t>(it - rec.channel_names.begin()));
  }

  const std::size_t len = window_length(seconds, rec.fs);
  const std::size_t step = stride(len, overlap);
  const std::size_t total = rec.data.cols;
  std::vector<Window> out;

  auto emit = [&](std::size_t start, std::size_t avail, int label) {
    Window w;
    w.data = Matrix(rows.size(), len, 0.0);
    const std::size_t n = std::min(avail, len);
    for (std::size_t c = 0; c < rows.size(); ++c) {
      for (std::size_t t = 0; t < n; ++t) w.data(c, t) = rec.data(rows[c], start + t);
    }
    w.label = label;
    w.subject_id = rec.subject_id;
    w.recording_id = rec.id;
    w.start_sample = start;
    w.norm = rec.norm;
    if (!w.norm.mean.empty()) {
      // keep per-channel stats in montage order
      NormMeta m = w.norm;
      for (std::size_t c = 0; c < rows.size(); ++c) {
        m.mean[c] = rec.norm.mean[rows[c]];
        m.std[c] = rec.norm.std[rows[c]];
      }
      m.mean.resize(rows.size());
      m.std.resize(rows.size());
      w.norm = std::move(m);
    }
    out.push_back(std::move(w));
  };

  for (const auto& ann : rec.annotations) {
    auto label = classes.index_of(ann.label);
    if (!label) {
      if (log) log->entries.push_back(rec.id + ": unknown label '" + ann.label + "' skipped");
      continue;
    }
    const std::size_t begin = std::min(ann.start, total);
    const std::size_t end = std::min(ann.end, total);
    if (end <= begin) continue;
    const std::size_t interval = end - begin;
    const std::size_t n = window_count(interval, len, step);
    if (n == 0) {
      emit(begin, interval, *label);
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) emit(begin + i * step, len, *label);
  }
  return out;
}

// ------------------------------------------------------------ normalization

NormMeta minmax_normalize(Window& w) {
  const auto [lo, hi] = std::minmax_element(w.data.data.begin(), w.data.data.end());
  NormMeta meta;
  meta.scheme = NormScheme::minmax_window;
  meta.min = w.data.data.empty() ? 0.0 : *lo;
  meta.max = w.data.data.empty() ? 0.0 : *hi;
  meta.degenerate = meta.max - meta.min <= meta.eps;
  const double denom = std::max(meta.max - meta.min, meta.eps);
  for (double& v : w.data.data) v = 2.0 * (v - meta.min) / denom - 1.0;
  w.norm = meta;
  return meta;
}

void minmax_denormalize(Window& w) {
  require(w.norm.scheme == NormScheme::minmax_window, ErrorKind::invalid_argument,
          "minmax_denormalize: window is not min-max normalized");
  const double denom = std::max(w.norm.max - w.norm.min, w.norm.eps);
  for (double& v : w.data.data) v = (v + 1.0) * 0.5 * denom + w.norm.min;
  w.norm = NormMeta{};
}

Recording zscore_normalize(const Recording& rec) {
  require(rec.data.cols >= 2, ErrorKind::invalid_argument, "zscore_normalize: need T >= 2");
  Recording out = rec;
  NormMeta meta;
  meta.scheme = NormScheme::zscore_recording;
  const auto n = static_cast<double>(rec.data.cols);
  for (std::size_t c = 0; c < rec.data.rows; ++c) {
    auto src = rec.data.row(c);
    double mu = 0.0;
    for (double v : src) mu += v;
    mu /= n;
    double var = 0.0;
    for (double v : src) var += (v - mu) * (v - mu);
    const double sigma = std::sqrt(var / n);
    if (sigma == 0.0) meta.degenerate = true;
    meta.mean.push_back(mu);
    meta.std.push_back(sigma);
    auto dst = out.data.row(c);
    for (std::size_t t = 0; t < dst.size(); ++t) dst[t] = (src[t] - mu) / (sigma + meta.eps);
  }
  out.norm = std::move(meta);
  return out;
}

// ---------------------------------------------------------------- AGW1 I/O

std::vector<std::uint8_t> encode_window(const Window& w) {
  require(w.label >= 0, ErrorKind::invalid_argument, "encode_window: negative label");
  detail::ByteWriter out;
  out.raw("AGW1");
  out.u32(static_cast<std::uint32_t>(w.data.rows));
  out.u32(static_cast<std::uint32_t>(w.data.cols));
  out.u32(static_cast<std::uint32_t>(w.label));
  for (double v : w.data.data) out.f32(static_cast<float>(v));
  return std::move(out.bytes());
}

Window decode_window(std::span<const std::uint8_t> bytes, const std::string& origin) {
  detail::ByteReader in(bytes, origin);
  if (in.raw(4) != "AGW1") fail(ErrorKind::format, origin + ": bad magic, expected AGW1");
  const std::uint32_t nc = in.u32();
  const std::uint32_t len = in.u32();
  const std::uint32_t label = in.u32();
  if (in.remaining() != static_cast<std::size_t>(nc) * len * 4) {
    fail(ErrorKind::format, origin + ": payload size does not match header " + std::to_string(nc) + "x" +
                                std::to_string(len));
  }
  Window w;
  w.data = Matrix(nc, len);
  w.label = static_cast<int>(label);
  for (double& v : w.data.data) {
    v = in.f32();
    if (!std::isfinite(v)) fail(ErrorKind::format, origin + ": non-finite sample");
  }
  return w;
}

void write_window_file(const fs::path& path, const Window& w) { detail::write_file_bytes(path, encode_window(w)); }

Window read_window_file(const fs::path& path) {
  auto bytes = detail::read_file_bytes(path);
  return decode_window(bytes, path.string());
}

// ---------------------------------------------------------------- manifest

namespace {

json norm_to_json(const NormMeta& n) {
  json stats = json::object();
  if (n.scheme == NormScheme::minmax_window) {
    stats["min"] = n.min;
    stats["max"] = n.max;
  } else if (n.scheme == NormScheme::zscore_recording) {
    stats["mean"] = n.mean;
    stats["std"] = n.std;
  }
  if (n.scheme != NormScheme::none) stats["eps"] = n.eps;
  return {{"scheme", to_string(n.scheme)}, {"stats", stats}, {"degenerate", n.degenerate}};
}

NormMeta norm_from_json(const json& j) {
  NormMeta n;
  n.scheme = parse_norm_scheme(j.at("scheme").get<std::string>());
  const json& s = j.at("stats");
  if (n.scheme == NormScheme::minmax_window) {
    n.min = s.at("min").get<double>();
    n.max = s.at("max").get<double>();
  } else if (n.scheme == NormScheme::zscore_recording) {
    n.mean = s.at("mean").get<std::vector<double>>();
    n.std = s.at("std").get<std::vector<double>>();
  }
  if (s.contains("eps")) n.eps = s.at("eps").get<double>();
  n.degenerate = j.value("degenerate", false);
  return n;
}

}  // namespace

std::string manifest_to_json(const Manifest& m) {
  json j;
  j["version"] = m.version;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["sample_rate"] = m.sample_rate;
  j["channels"] = m.channels;
  j["normalization"] = to_string(m.normalization);
  json cm = json::array();
  for (std::size_t i = 0; i < m.class_map.size(); ++i) {
    cm.push_back({{"label_name", m.class_map.names()[i]}, {"index", i}});
  }
  j["class_map"] = cm;
  json entries = json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"path", e.path},
                       {"label", e.label},
                       {"subject", e.subject},
                       {"split", e.split},
                       {"L", e.length},
                       {"norm", norm_to_json(e.norm)}});
  }
  j["entries"] = entries;
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::format, std::string("manifest: ") + e.what());
  }
  try {
    Manifest m;
    m.version = j.at("version").get<int>();
    require(m.version == 1, ErrorKind::format, "manifest: unsupported version " + std::to_string(m.version));
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.sample_rate = j.value("sample_rate", 250.0);
    m.channels = j.value("channels", std::vector<std::string>{});
    m.normalization = parse_norm_scheme(j.value("normalization", std::string("none")));
    std::vector<std::string> names(j.at("class_map").size());
    for (const auto& c : j.at("class_map")) {
      const auto idx = c.at("index").get<std::size_t>();
      require(idx < names.size(), ErrorKind::format, "manifest: class index out of range");
      names[idx] = c.at("label_name").get<std::string>();
    }
    m.class_map = ClassMap(std::move(names));
    for (const auto& e : j.at("entries")) {
      ManifestEntry me;
      me.path = e.at("path").get<std::string>();
      me.label = e.at("label").get<int>();
      me.subject = e.at("subject").get<std::string>();
      me.split = e.at("split").get<std::string>();
      me.length = e.at("L").get<std::size_t>();
      me.norm = norm_from_json(e.at("norm"));
      m.entries.push_back(std::move(me));
    }
    return m;
  } catch (const json::exception& e) {
    fail(ErrorKind::format, std::string("manifest: ") + e.what());
  }
}

void write_manifest(const fs::path& path, const Manifest& m) {
  if (!m.entries.empty()) {
    const std::size_t len = m.entries.front().length;
    for (const auto& e : m.entries) {
      require(e.length == len, ErrorKind::invalid_argument, "manifest: window length must be uniform");
    }
  }
  detail::write_text(path, manifest_to_json(m));
}

Manifest read_manifest(const fs::path& path) { return manifest_from_json(detail::read_text(path)); }

std::vector<Window> load_manifest_windows(const fs::path& manifest_path, const Manifest& m,
                                          const std::optional<std::string>& split) {
  const fs::path base = manifest_path.parent_path();
  std::vector<Window> out;
  for (const auto& e : m.entries) {
    if (split && e.split != *split) continue;
    Window w = read_window_file(base / e.path);
    if (w.label != e.label) fail(ErrorKind::format, e.path + ": label differs from manifest");
    if (w.length() != e.length) fail(ErrorKind::format, e.path + ": length differs from manifest");
    w.subject_id = e.subject;
    w.norm = e.norm;
    out.push_back(std::move(w));
  }
  return out;
}

// ---------------------------------------------------------------- splits

std::map<std::string, std::string> read_split_csv(const fs::path& path) {
  auto rows = read_csv_rows(path, {"subject_id", "split"});
  std::map<std::string, std::string> out;
  for (const auto& r : rows) {
    if (std::find(kSplits.begin(), kSplits.end(), r[1]) == kSplits.end()) {
      fail(ErrorKind::config, path.string() + ": unknown split '" + r[1] + "' for subject " + r[0]);
    }
    auto [it, inserted] = out.emplace(r[0], r[1]);
    if (!inserted && it->second != r[1]) {
      fail(ErrorKind::leakage, "subject " + r[0] + " assigned to both " + it->second + " and " + r[1]);
    }
  }
  return out;
}

void write_split_csv(const fs::path& path, const std::map<std::string, std::string>& splits) {
  std::string out = "subject_id,split\n";
  for (const auto& [subject, split] : splits) out += subject + "," + split + "\n";
  detail::write_text(path, out);
}

std::map<std::string, std::string> assign_splits(std::vector<std::string> subjects, std::uint64_t seed) {
  std::sort(subjects.begin(), subjects.end());
  subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
  std::mt19937_64 rng(seed);
  std::shuffle(subjects.begin(), subjects.end(), rng);
  const std::size_t n = subjects.size();
  auto n_val = static_cast<std::size_t>(std::round(0.15 * static_cast<double>(n)));
  auto n_test = n_val;
  if (n >= 3) {
    n_val = std::max<std::size_t>(n_val, 1);
    n_test = std::max<std::size_t>(n_test, 1);
  } else {
    n_val = n_test = 0;
  }
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    const char* split = i < n_test ? "test" : (i < n_test + n_val ? "val" : "train");
    out[subjects[i]] = split;
  }
  return out;
}

SplitReport validate_split(const Manifest& m) {
  std::map<std::string, std::string> owner;
  std::map<std::string, std::set<std::string>> subjects;
  SplitReport report;
  for (const auto& s : kSplits) {
    report.splits[s].windows_per_class.assign(m.class_map.size(), 0);
  }
  for (const auto& e : m.entries) {
    auto [it, inserted] = owner.emplace(e.subject, e.split);
    if (!inserted && it->second != e.split) {
      fail(ErrorKind::leakage, "subject " + e.subject + " appears in both " + it->second + " and " + e.split);
    }
    auto& st = report.splits[e.split];
    if (st.windows_per_class.size() < m.class_map.size()) st.windows_per_class.assign(m.class_map.size(), 0);
    st.windows += 1;
    if (e.label >= 0 && static_cast<std::size_t>(e.label) < st.windows_per_class.size()) {
      st.windows_per_class[static_cast<std::size_t>(e.label)] += 1;
    }
    subjects[e.split].insert(e.subject);
  }
  for (auto& [name, st] : report.splits) {
    st.subjects = subjects[name].size();
    if (st.windows == 0) report.warnings.push_back("split '" + name + "' is empty");
  }
  return report;
}

// ---------------------------------------------------------------- recordings

void write_recording(const fs::path& dir, const Recording& rec) {
  fs::create_directories(dir);
  json j;
  j["id"] = rec.id;
  j["subject_id"] = rec.subject_id;
  j["fs"] = rec.fs;
  j["channel_names"] = rec.channel_names;
  j["samples"] = rec.data.cols;
  json anns = json::array();
  for (const auto& a : rec.annotations) anns.push_back({{"start", a.start}, {"end", a.end}, {"label", a.label}});
  j["annotations"] = anns;
  j["data_file"] = rec.id + ".f32";
  detail::write_text(dir / (rec.id + ".json"), j.dump(2) + "\n");
  detail::ByteWriter w;
  for (double v : rec.data.data) w.f32(static_cast<float>(v));
  detail::write_file_bytes(dir / (rec.id + ".f32"), w.bytes());
}

std::vector<Recording> read_recording_dir(const fs::path& dir) {
  require(fs::is_directory(dir), ErrorKind::io, "recording directory not found: " + dir.string());
  std::vector<fs::path> descriptors;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") descriptors.push_back(e.path());
  }
  std::sort(descriptors.begin(), descriptors.end());
  std::vector<Recording> out;
  for (const auto& p : descriptors) {
    try {
      const json j = json::parse(detail::read_text(p));
      Recording r;
      r.id = j.at("id").get<std::string>();
      r.subject_id = j.at("subject_id").get<std::string>();
      r.fs = j.at("fs").get<double>();
      r.channel_names = j.at("channel_names").get<std::vector<std::string>>();
      const auto samples = j.at("samples").get<std::size_t>();
      for (const auto& a : j.at("annotations")) {
        r.annotations.push_back({a.at("start").get<std::size_t>(), a.at("end").get<std::size_t>(),
                                 a.at("label").get<std::string>()});
      }
      const auto bytes = detail::read_file_bytes(dir / j.at("data_file").get<std::string>());
      detail::ByteReader in(bytes, p.string());
      require(bytes.size() == r.channel_names.size() * samples * 4, ErrorKind::format,
              p.string() + ": data file size does not match channels x samples");
      r.data = Matrix(r.channel_names.size(), samples);
      for (double& v : r.data.data) v = in.f32();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::format, p.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace artifactgen::data
