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

#include "artifactgen/config.hpp"

#include "artifactgen/error.hpp"
#include "artifactgen/hash.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace artifactgen {

using nlohmann::json;

namespace {

// A mapping node whose keys must all be consumed.
class Block {
 public:
  Block(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(ErrorKind::config, where() + "expected a mapping");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const YAML::Node v = node_[key];
    if (!v) return;
    out = convert<T>(v, path_.empty() ? key : path_ + "." + key);
  }

  Block child(const std::string& key) {
    seen_.insert(key);
    YAML::Node v = (node_ && node_.IsMap()) ? node_[key] : YAML::Node();
    return Block(v, path_.empty() ? key : path_ + "." + key);
  }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return (node_ && node_.IsMap()) ? node_[key] : YAML::Node();
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) {
        std::string allowed;
        for (const auto& s : seen_) allowed += (allowed.empty() ? "" : ", ") + s;
        fail(ErrorKind::config,
             "unknown key '" + (path_.empty() ? key : path_ + "." + key) + "' (allowed: " + allowed + ")");
      }
    }
  }

 private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }

  template <typename T>
  static T convert(const YAML::Node& v, const std::string& path) {
    try {
      if constexpr (std::is_same_v<T, bool> || std::is_same_v<T, double> || std::is_same_v<T, std::string>) {
        if (!v.IsScalar()) fail(ErrorKind::config, path + ": expected a scalar");
        return v.as<T>();
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!v.IsScalar()) fail(ErrorKind::config, path + ": expected a scalar");
        const auto s = v.as<long long>();
        if (s < 0) fail(ErrorKind::config, path + ": must be non-negative");
        return static_cast<T>(s);
      } else if constexpr (std::is_same_v<T, std::vector<std::string>> ||
                           std::is_same_v<T, std::vector<std::size_t>> || std::is_same_v<T, std::vector<double>>) {
        if (!v.IsSequence()) fail(ErrorKind::config, path + ": expected a list");
        T out;
        for (std::size_t i = 0; i < v.size(); ++i)
          out.push_back(convert<typename T::value_type>(v[i], path + "[" + std::to_string(i) + "]"));
        return out;
      } else {
        static_assert(sizeof(T) == 0, "unsupported config type");
      }
    } catch (const YAML::Exception& e) {
      fail(ErrorKind::config, path + ": wrong type (" + e.msg + ")");
    }
  }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& what) { require(ok, ErrorKind::config, what); }

void check_widths(const std::vector<std::size_t>& w, std::size_t count, const std::string& key) {
  check(count == 0 ? !w.empty() : w.size() == count,
        key + ": expected " + (count == 0 ? std::string("a non-empty list") : std::to_string(count) + " entries"));
  for (auto v : w) check(v > 0, key + ": widths must be positive");
}

void parse_gan(Block b, GanBlock& g) {
  b.get("latent_dim", g.latent_dim);
  b.get("generator_widths", g.generator_widths);
  b.get("critic_widths", g.critic_widths);
  std::string norm = g.critic_norm == gan::CriticNorm::none ? "none" : "group_norm";
  b.get("critic_norm", norm);
  check(norm == "none" || norm == "group_norm", "model.gan.critic_norm: expected none or group_norm");
  g.critic_norm = norm == "none" ? gan::CriticNorm::none : gan::CriticNorm::group_norm;
  auto& t = g.train;
  b.get("lambda_gp", t.lambda_gp);
  b.get("n_critic", t.n_critic);
  b.get("batch_size", t.batch);
  b.get("lr", t.lr);
  std::vector<double> betas = {t.beta1, t.beta2};
  b.get("betas", betas);
  check(betas.size() == 2, "model.gan.betas: expected two values");
  t.beta1 = betas[0];
  t.beta2 = betas[1];
  b.get("spectral_weight", t.spectral_weight);
  b.get("spectral_nfft", t.spectral.nfft);
  b.get("spectral_hop", t.spectral.hop);
  b.get("epochs", t.epochs);
  b.get("max_steps", t.max_steps);
  b.get("patience", t.patience);
  b.get("smooth_window", t.smooth_window);
  b.get("checkpoint", g.checkpoint);
  b.finish();

  check(g.latent_dim > 0, "model.gan.latent_dim must be positive");
  check_widths(g.generator_widths, 4, "model.gan.generator_widths");
  check_widths(g.critic_widths, 4, "model.gan.critic_widths");
  check(t.lambda_gp >= 0.0, "model.gan.lambda_gp must be >= 0");
  check(t.n_critic >= 1, "model.gan.n_critic must be >= 1");
  check(t.batch >= 1, "model.gan.batch_size must be >= 1");
  check(t.lr > 0.0, "model.gan.lr must be positive");
  check(t.beta1 >= 0.0 && t.beta1 < 1.0 && t.beta2 >= 0.0 && t.beta2 < 1.0, "model.gan.betas must lie in [0, 1)");
  check(t.spectral_weight >= 0.0, "model.gan.spectral_weight must be >= 0");
  check(t.spectral.nfft >= 2 && t.spectral.hop >= 1, "model.gan.spectral_nfft/hop out of range");
  check(t.epochs >= 1 || t.max_steps >= 1, "model.gan: epochs or max_steps must be positive");
  check(g.checkpoint == "last" || g.checkpoint == "best", "model.gan.checkpoint: expected last or best");
}

void parse_ddpm(Block b, DdpmBlock& d) {
  b.get("widths", d.unet.widths);
  b.get("embed_dim", d.unet.embed_dim);
  b.get("groups", d.unet.groups);
  b.get("timesteps", d.timesteps);
  b.get("beta_start", d.beta_start);
  b.get("beta_end", d.beta_end);
  b.get("prediction", d.prediction);
  auto& t = d.train;
  b.get("lr", t.lr);
  std::vector<double> betas = {t.beta1, t.beta2};
  b.get("betas", betas);
  check(betas.size() == 2, "model.ddpm.betas: expected two values");
  t.beta1 = betas[0];
  t.beta2 = betas[1];
  b.get("weight_decay", t.weight_decay);
  b.get("label_dropout", t.label_dropout);
  b.get("batch_size", t.batch);
  b.get("epochs", t.epochs);
  b.get("max_steps", t.max_steps);
  b.get("patience", t.patience);
  b.get("smooth_window", t.smooth_window);
  b.get("ema_decay", t.ema_decay);
  b.get("ema_warmup", t.ema_warmup);
  b.get("checkpoint", d.checkpoint);
  Block s = b.child("sampler");
  s.get("steps", d.sampler.num_steps);
  s.get("guidance", d.sampler.guidance);
  s.finish();
  b.finish();

  check_widths(d.unet.widths, 0, "model.ddpm.widths");
  check(d.unet.embed_dim >= 2 && d.unet.embed_dim % 2 == 0, "model.ddpm.embed_dim must be even and >= 2");
  check(d.unet.groups >= 1, "model.ddpm.groups must be >= 1");
  check(d.timesteps >= 1, "model.ddpm.timesteps must be >= 1");
  check(d.beta_start > 0.0 && d.beta_start <= d.beta_end && d.beta_end < 1.0,
        "model.ddpm: need 0 < beta_start <= beta_end < 1");
  check(d.prediction == "epsilon", "model.ddpm.prediction: only 'epsilon' is implemented");
  check(t.lr > 0.0, "model.ddpm.lr must be positive");
  check(t.beta1 >= 0.0 && t.beta1 < 1.0 && t.beta2 >= 0.0 && t.beta2 < 1.0, "model.ddpm.betas must lie in [0, 1)");
  check(t.weight_decay >= 0.0, "model.ddpm.weight_decay must be >= 0");
  check(t.label_dropout >= 0.0 && t.label_dropout < 1.0, "model.ddpm.label_dropout must lie in [0, 1)");
  check(t.batch >= 1, "model.ddpm.batch_size must be >= 1");
  check(t.epochs >= 1 || t.max_steps >= 1, "model.ddpm: epochs or max_steps must be positive");
  check(t.ema_decay >= 0.0 && t.ema_decay < 1.0, "model.ddpm.ema_decay must lie in [0, 1)");
  check(d.sampler.num_steps >= 1 && d.sampler.num_steps <= d.timesteps,
        "model.ddpm.sampler.steps must lie in [1, timesteps]");
  check(d.checkpoint == "last" || d.checkpoint == "best", "model.ddpm.checkpoint: expected last or best");
}

void parse_eval(Block b, EvalBlock& e) {
  const YAML::Node bands = b.raw("bands");
  if (bands && !bands.IsNull()) {
    check(bands.IsSequence(), "eval.bands: expected a list");
    e.bands.clear();
    for (std::size_t i = 0; i < bands.size(); ++i) {
      Block bb(bands[i], "eval.bands[" + std::to_string(i) + "]");
      signal::BandSpec spec;
      bb.get("name", spec.name);
      bb.get("lo", spec.lo);
      bb.get("hi", spec.hi);
      bb.finish();
      check(!spec.name.empty() && spec.lo >= 0.0 && spec.lo < spec.hi,
            "eval.bands[" + std::to_string(i) + "]: need a name and 0 <= lo < hi");
      e.bands.push_back(spec);
    }
  }
  Block w = b.child("welch");
  w.get("nperseg", e.welch_nperseg);
  w.get("overlap", e.welch_overlap);
  w.get("detrend", e.welch_detrend);
  w.finish();
  b.get("kernel", e.kernel);
  b.get("max_lag", e.max_lag);
  b.get("knn_k", e.knn_k);
  b.get("real_split", e.real_split);
  b.finish();
  check(e.welch_overlap >= 0.0 && e.welch_overlap < 1.0, "eval.welch.overlap must lie in [0, 1)");
  check(e.kernel == "rbf_median", "eval.kernel: only 'rbf_median' is supported");
  check(e.knn_k >= 1, "eval.knn_k must be >= 1");
  check(e.real_split == "train" || e.real_split == "val" || e.real_split == "test" || e.real_split == "all",
        "eval.real_split: expected train, val, test or all");
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    fail(ErrorKind::config, source + ": invalid YAML: " + e.what());
  }
  RunConfig cfg;
  try {
    Block top(root, "");
    top.get("seed", cfg.seed);
    top.get("output_dir", cfg.output_dir);

    Block d = top.child("data");
    auto& dc = cfg.data;
    d.get("channels", dc.channels);
    d.get("sample_rate", dc.sample_rate);
    d.get("window_seconds", dc.window_seconds);
    d.get("overlap", dc.overlap);
    std::string norm = data::to_string(dc.normalization);
    d.get("normalization", norm);
    dc.normalization = data::parse_norm_scheme(norm);
    d.get("filtering", dc.filtering);
    d.get("input_dir", dc.input_dir);
    d.get("split_csv", dc.split_csv);
    d.get("class_map", dc.class_map);
    Block syn = d.child("synthetic");
    syn.get("n_per_class", dc.synthetic.n_per_class);
    syn.get("subjects", dc.synthetic.subjects);
    syn.get("gap_seconds", dc.synthetic.gap_seconds);
    syn.get("background_uv", dc.synthetic.background_uv);
    syn.finish();
    d.finish();

    Block m = top.child("model");
    parse_gan(m.child("gan"), cfg.gan);
    parse_ddpm(m.child("ddpm"), cfg.ddpm);
    m.finish();
    parse_eval(top.child("eval"), cfg.eval);
    top.finish();

    check(!dc.channels.empty(), "data.channels must not be empty");
    check(dc.sample_rate > 0.0, "data.sample_rate must be positive");
    check(dc.window_seconds > 0.0 && dc.window_seconds * dc.sample_rate >= 2.0,
          "data.window_seconds must give at least two samples");
    check(dc.overlap >= 0.0 && dc.overlap < 1.0, "data.overlap must lie in [0, 1)");
    check(dc.filtering == "raw", "data.filtering: only 'raw' is supported (signals are not filtered)");
    check(dc.synthetic.n_per_class >= 1 && dc.synthetic.subjects >= 1,
          "data.synthetic: n_per_class and subjects must be >= 1");
    check(dc.synthetic.gap_seconds >= 0.0 && dc.synthetic.background_uv >= 0.0,
          "data.synthetic: gap_seconds and background_uv must be >= 0");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) fail(ErrorKind::config, source + ": " + e.what());
    if (e.kind() == ErrorKind::invalid_argument) fail(ErrorKind::config, source + ": " + e.what());
    throw;
  }
  cfg.gan.train.seed = cfg.seed;
  cfg.ddpm.train.seed = cfg.seed;
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string config_to_json(const RunConfig& c) {
  const auto& g = c.gan;
  const auto& d = c.ddpm;
  json bands = json::array();
  for (const auto& b : c.eval.bands) bands.push_back({{"name", b.name}, {"lo", b.lo}, {"hi", b.hi}});
  json j{
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"data",
       {{"channels", c.data.channels},
        {"sample_rate", c.data.sample_rate},
        {"window_seconds", c.data.window_seconds},
        {"overlap", c.data.overlap},
        {"normalization", data::to_string(c.data.normalization)},
        {"filtering", c.data.filtering},
        {"input_dir", c.data.input_dir},
        {"split_csv", c.data.split_csv},
        {"class_map", c.data.class_map},
        {"synthetic",
         {{"n_per_class", c.data.synthetic.n_per_class},
          {"subjects", c.data.synthetic.subjects},
          {"gap_seconds", c.data.synthetic.gap_seconds},
          {"background_uv", c.data.synthetic.background_uv}}}}},
      {"model",
       {{"gan",
         {{"latent_dim", g.latent_dim},
          {"generator_widths", g.generator_widths},
          {"critic_widths", g.critic_widths},
          {"critic_norm", g.critic_norm == gan::CriticNorm::none ? "none" : "group_norm"},
          {"lambda_gp", g.train.lambda_gp},
          {"n_critic", g.train.n_critic},
          {"batch_size", g.train.batch},
          {"lr", g.train.lr},
          {"betas", {g.train.beta1, g.train.beta2}},
          {"spectral_weight", g.train.spectral_weight},
          {"spectral_nfft", g.train.spectral.nfft},
          {"spectral_hop", g.train.spectral.hop},
          {"epochs", g.train.epochs},
          {"max_steps", g.train.max_steps},
          {"patience", g.train.patience},
          {"smooth_window", g.train.smooth_window},
          {"checkpoint", g.checkpoint}}},
        {"ddpm",
         {{"widths", d.unet.widths},
          {"embed_dim", d.unet.embed_dim},
          {"groups", d.unet.groups},
          {"timesteps", d.timesteps},
          {"beta_start", d.beta_start},
          {"beta_end", d.beta_end},
          {"prediction", d.prediction},
          {"lr", d.train.lr},
          {"betas", {d.train.beta1, d.train.beta2}},
          {"weight_decay", d.train.weight_decay},
          {"label_dropout", d.train.label_dropout},
          {"batch_size", d.train.batch},
          {"epochs", d.train.epochs},
          {"max_steps", d.train.max_steps},
          {"patience", d.train.patience},
          {"smooth_window", d.train.smooth_window},
          {"ema_decay", d.train.ema_decay},
          {"ema_warmup", d.train.ema_warmup},
          {"checkpoint", d.checkpoint},
          {"sampler", {{"steps", d.sampler.num_steps}, {"guidance", d.sampler.guidance}}}}}}},
      {"eval",
       {{"bands", bands},
        {"welch",
         {{"nperseg", c.eval.welch_nperseg}, {"overlap", c.eval.welch_overlap}, {"detrend", c.eval.welch_detrend}}},
        {"kernel", c.eval.kernel},
        {"max_lag", c.eval.max_lag},
        {"knn_k", c.eval.knn_k},
        {"real_split", c.eval.real_split}}}};
  return j.dump();
}

std::string config_hash(const RunConfig& cfg) { return sha256_hex(config_to_json(cfg)); }

bool apply_env_overrides(RunConfig& cfg) {
  const char* env = std::getenv("ARTIFACTGEN_SEED");
  if (!env || !*env) return false;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  require(errno == 0 && end && *end == '\0' && env[0] != '-', ErrorKind::config,
          std::string("ARTIFACTGEN_SEED must be a non-negative integer, got '") + env + "'");
  cfg.seed = v;
  cfg.gan.train.seed = v;
  cfg.ddpm.train.seed = v;
  return true;
}

}  // namespace artifactgen
