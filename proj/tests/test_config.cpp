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

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>

using namespace artifactgen;

namespace {

std::string config_error(const std::string& yaml) {
  try {
    parse_config(yaml, "t.yaml");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    return e.what();
  }
  FAIL("expected a config error for: " << yaml);
  return {};
}

bool mentions(const std::string& msg, const std::string& what) { return msg.find(what) != std::string::npos; }

}  // namespace

TEST_CASE("empty document gives defaults") {
  const auto c = parse_config("", "t.yaml");
  CHECK(c.seed == 0);
  CHECK(c.data.sample_rate == 250.0);
  CHECK(c.data.window_seconds == 1.0);
  CHECK(c.data.overlap == 0.5);
  CHECK(c.data.channels.size() == 8);
  CHECK(c.gan.train.lambda_gp == 10.0);
  CHECK(c.gan.train.n_critic == 5);
  CHECK(c.gan.train.beta1 == 0.5);
  CHECK(c.ddpm.timesteps == 1000);
  CHECK(c.ddpm.sampler.num_steps == 80);
  CHECK(c.ddpm.sampler.guidance == 1.5);
  CHECK(c.ddpm.train.ema_decay == 0.999);
  CHECK(c.eval.kernel == "rbf_median");
}

TEST_CASE("values are read into every block") {
  const auto c = parse_config(R"(
seed: 42
output_dir: out/x
data:
  normalization: zscore_recording
  overlap: 0.25
  synthetic: {n_per_class: 7, subjects: 4}
model:
  gan: {latent_dim: 16, n_critic: 3, betas: [0.0, 0.99], checkpoint: best}
  ddpm:
    widths: [8, 16]
    sampler: {steps: 10, guidance: 2.0}
eval:
  bands: [{name: low, lo: 1, hi: 10}]
  welch: {nperseg: 128}
  real_split: all
)",
                              "t.yaml");
  CHECK(c.seed == 42);
  CHECK(c.gan.train.seed == 42);
  CHECK(c.ddpm.train.seed == 42);
  CHECK(c.output_dir == "out/x");
  CHECK(c.data.normalization == data::NormScheme::zscore_recording);
  CHECK(c.data.overlap == 0.25);
  CHECK(c.data.synthetic.n_per_class == 7);
  CHECK(c.gan.latent_dim == 16);
  CHECK(c.gan.train.n_critic == 3);
  CHECK(c.gan.train.beta2 == 0.99);
  CHECK(c.gan.checkpoint == "best");
  CHECK(c.ddpm.unet.widths == std::vector<std::size_t>{8, 16});
  CHECK(c.ddpm.sampler.num_steps == 10);
  REQUIRE(c.eval.bands.size() == 1);
  CHECK(c.eval.bands[0].hi == 10.0);
  CHECK(c.eval.welch_nperseg == 128);
  CHECK(c.eval.real_split == "all");
}

TEST_CASE("strict parsing names the offending key") {
  CHECK(mentions(config_error("sed: 1"), "sed"));
  CHECK(mentions(config_error("data: {overlapp: 0.5}"), "data.overlapp"));
  CHECK(mentions(config_error("model: {gan: {lamda_gp: 5}}"), "model.gan.lamda_gp"));
  CHECK(mentions(config_error("model: {ddpm: {sampler: {stepz: 5}}}"), "model.ddpm.sampler.stepz"));
  CHECK(mentions(config_error("eval: {welch: {nperseg: 1, taper: hann}}"), "eval.welch.taper"));
}

TEST_CASE("types and ranges are checked") {
  CHECK(mentions(config_error("seed: abc"), "seed"));
  CHECK(mentions(config_error("seed: -3"), "seed"));
  CHECK(mentions(config_error("data: {overlap: 1.0}"), "data.overlap"));
  CHECK(mentions(config_error("data: {channels: Fp1}"), "data.channels"));
  CHECK(mentions(config_error("data: {filtering: bandpass}"), "data.filtering"));
  CHECK(mentions(config_error("data: {normalization: robust}"), "robust"));
  CHECK(mentions(config_error("model: {gan: {generator_widths: [1, 2]}}"), "generator_widths"));
  CHECK(mentions(config_error("model: {gan: {checkpoint: fid}}"), "checkpoint"));
  CHECK(mentions(config_error("model: {ddpm: {prediction: v}}"), "prediction"));
  CHECK(mentions(config_error("model: {ddpm: {timesteps: 10, sampler: {steps: 11}}}"), "sampler.steps"));
  CHECK(mentions(config_error("model: {ddpm: {label_dropout: 1.5}}"), "label_dropout"));
  CHECK(mentions(config_error("eval: {kernel: linear}"), "kernel"));
  CHECK(mentions(config_error("eval: {bands: [{name: x, lo: 5, hi: 1}]}"), "bands[0]"));
  CHECK(mentions(config_error("[1, 2]"), "mapping"));
  CHECK(mentions(config_error("data: {overlap: [}"), "invalid YAML"));
}

TEST_CASE("canonical json and hash") {
  const auto a = parse_config("seed: 1\ndata: {overlap: 0.5}", "a.yaml");
  const auto b = parse_config("data:\n  overlap: 0.50\nseed: 1\n", "b.yaml");
  CHECK(config_to_json(a) == config_to_json(b));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 64);
  const auto c = parse_config("seed: 2", "c.yaml");
  CHECK(config_hash(a) != config_hash(c));
  const auto j = nlohmann::json::parse(config_to_json(a));
  CHECK(j.at("model").at("gan").at("lambda_gp") == 10.0);
}

TEST_CASE("seed override from the environment") {
  auto c = parse_config("seed: 1", "t.yaml");
  unsetenv("ARTIFACTGEN_SEED");
  CHECK(!apply_env_overrides(c));
  setenv("ARTIFACTGEN_SEED", "123", 1);
  CHECK(apply_env_overrides(c));
  CHECK(c.seed == 123);
  CHECK(c.gan.train.seed == 123);
  setenv("ARTIFACTGEN_SEED", "12x", 1);
  CHECK_THROWS_AS(apply_env_overrides(c), Error);
  unsetenv("ARTIFACTGEN_SEED");
}

TEST_CASE("missing file") { CHECK_THROWS_AS(load_config("/nonexistent/cfg.yaml"), Error); }
