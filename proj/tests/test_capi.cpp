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

#include "artifactgen/artifactgen.h"
#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* kTiny = R"(
seed: 3
data:
  synthetic: {n_per_class: 6, subjects: 6}
model:
  gan: {latent_dim: 8, generator_widths: [8, 8, 8, 8], critic_widths: [4, 4, 8, 8], batch_size: 4, max_steps: 2, n_critic: 1}
)";

}  // namespace

TEST_CASE("status names and exit codes") {
  CHECK(ag_exit_code(AG_OK) == 0);
  for (ag_status s : {AG_ERR_INVALID_ARGUMENT, AG_ERR_CONFIG, AG_ERR_IO, AG_ERR_FORMAT, AG_ERR_LEAKAGE})
    CHECK(ag_exit_code(s) == 2);
  CHECK(ag_exit_code(AG_ERR_NUMERIC) == 1);
  CHECK(ag_exit_code(AG_ERR_INTERNAL) == 1);
  CHECK(std::string(ag_status_name(AG_ERR_LEAKAGE)) == "leakage");
  CHECK(std::string(ag_version()).size() > 0);
}

TEST_CASE("config handle") {
  ag_config* cfg = nullptr;
  REQUIRE(ag_config_parse(kTiny, &cfg) == AG_OK);
  uint64_t seed = 0;
  CHECK(ag_config_seed(cfg, &seed) == AG_OK);
  CHECK(seed == 3);
  const char* hash = nullptr;
  CHECK(ag_config_hash(cfg, &hash) == AG_OK);
  const std::string h1 = hash;
  CHECK(h1.size() == 64);
  CHECK(ag_config_set_seed(cfg, 4) == AG_OK);
  CHECK(ag_config_hash(cfg, &hash) == AG_OK);
  CHECK(h1 != hash);
  const char* json = nullptr;
  CHECK(ag_config_json(cfg, &json) == AG_OK);
  CHECK(std::string(json).find("\"seed\":4") != std::string::npos);

  setenv("ARTIFACTGEN_SEED", "99", 1);
  int applied = 0;
  CHECK(ag_config_apply_env(cfg, &applied) == AG_OK);
  CHECK(applied == 1);
  CHECK(ag_config_seed(cfg, &seed) == AG_OK);
  CHECK(seed == 99);
  unsetenv("ARTIFACTGEN_SEED");
  ag_config_free(cfg);

  ag_config* bad = nullptr;
  CHECK(ag_config_parse("model: {gan: {bogus: 1}}", &bad) == AG_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(std::string(ag_last_error()).find("model.gan.bogus") != std::string::npos);
  CHECK(ag_config_load("/nonexistent.yaml", &bad) == AG_ERR_IO);
  CHECK(ag_config_parse(nullptr, &bad) == AG_ERR_INVALID_ARGUMENT);
  ag_config_free(nullptr);
}

TEST_CASE("commands through the C interface") {
  const auto d = testing::scratch("capi_run");
  ag_config* cfg = nullptr;
  REQUIRE(ag_config_parse(kTiny, &cfg) == AG_OK);
  size_t windows = 0;
  REQUIRE(ag_curate(cfg, nullptr, (d / "data").c_str(), &windows) == AG_OK);
  CHECK(windows == 30);
  const auto manifest = (d / "data" / "manifest.json").string();

  CHECK(ag_train(cfg, "ddpm", manifest.c_str(), (d / "ddpm").c_str()) == AG_ERR_CONFIG);
  CHECK(std::string(ag_last_error()).find("zscore_recording") != std::string::npos);
  REQUIRE(ag_train(cfg, "gan", manifest.c_str(), (d / "gan").c_str()) == AG_OK);

  ag_sample_options opt;
  ag_sample_options_init(&opt);
  CHECK(opt.count == 1);
  const auto ckpt = (d / "gan" / "model.agck").string();
  const auto fake = (d / "fake").string();
  opt.checkpoint = ckpt.c_str();
  opt.out_dir = fake.c_str();
  opt.label = 1;
  opt.count = 4;
  size_t written = 0;
  REQUIRE(ag_sample(&opt, &written) == AG_OK);
  CHECK(written == 4);
  opt.label = 7;
  CHECK(ag_sample(&opt, &written) == AG_ERR_INVALID_ARGUMENT);

  ag_window* w = nullptr;
  REQUIRE(ag_window_read((d / "fake" / "c1_000000.agw").c_str(), &w) == AG_OK);
  size_t c = 0, l = 0;
  int label = -1;
  CHECK(ag_window_shape(w, &c, &l, &label) == AG_OK);
  CHECK(c == 8);
  CHECK(l == 250);
  CHECK(label == 1);
  const double* data = nullptr;
  CHECK(ag_window_data(w, &data) == AG_OK);
  for (size_t i = 0; i < c * l; ++i) CHECK(std::abs(data[i]) <= 1.0);
  ag_window_free(w);
  CHECK(ag_window_read(manifest.c_str(), &w) == AG_ERR_FORMAT);

  const char* fakes[] = {fake.c_str()};
  CHECK(ag_evaluate(cfg, manifest.c_str(), fakes, 1, (d / "eval").c_str()) == AG_OK);
  CHECK(fs::exists(d / "eval" / "report.json"));
  const char* missing[] = {"x=/nonexistent/fakes"};
  CHECK(ag_evaluate(cfg, manifest.c_str(), missing, 1, (d / "eval2").c_str()) == AG_ERR_IO);
  ag_config_free(cfg);
}
