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

#include "artifactgen/commands.hpp"
#include "artifactgen/config.hpp"
#include "artifactgen/dataset.hpp"
#include "artifactgen/error.hpp"
#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

using namespace artifactgen;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kTiny = R"(
seed: 7
data:
  normalization: minmax_window
  synthetic: {n_per_class: 20, subjects: 6}
model:
  gan: {latent_dim: 8, generator_widths: [8, 8, 8, 8], critic_widths: [4, 4, 8, 8], batch_size: 8, max_steps: 3, n_critic: 1}
  ddpm: {widths: [8, 8], embed_dim: 8, groups: 4, timesteps: 50, batch_size: 8, max_steps: 3, sampler: {steps: 4}}
)";

RunConfig tiny(const std::string& extra = "") { return parse_config(std::string(kTiny) + extra, "tiny.yaml"); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::internal;
}

// One curated corpus shared by the slower cases.
const fs::path& shared_data() {
  static const fs::path dir = [] {
    const auto d = testing::scratch("cmd_shared");
    commands::curate(tiny(), {}, d / "data");
    return d / "data";
  }();
  return dir;
}

}  // namespace

TEST_CASE("curate writes the documented layout") {
  const auto& d = shared_data();
  for (const char* f : {"config.json", "class_map.csv", "splits.csv", "manifest.json", "split_report.json", "run.json"})
    CHECK_MESSAGE(fs::exists(d / f), f);
  const auto m = data::read_manifest(d / "manifest.json");
  CHECK(m.entries.size() == 100);
  CHECK(m.class_map == data::ClassMap::canonical());
  CHECK(m.normalization == data::NormScheme::minmax_window);
  std::set<std::string> splits;
  for (const auto& e : m.entries) {
    splits.insert(e.split);
    CHECK(e.length == 250);
  }
  CHECK(splits == std::set<std::string>{"train", "val", "test"});
  const auto w = data::read_window_file(d / m.entries.front().path);
  CHECK(w.channels() == 8);
  CHECK(w.length() == 250);
}

TEST_CASE("curate is reproducible") {
  const auto d = testing::scratch("cmd_repro");
  const auto a = commands::curate(tiny(), {}, d / "a");
  const auto b = commands::curate(tiny(), {}, d / "b");
  CHECK(a.windows == b.windows);
  CHECK(a.config_hash == b.config_hash);
  CHECK(slurp(a.manifest) == slurp(b.manifest));
  CHECK(slurp(d / "a" / "splits.csv") == slurp(d / "b" / "splits.csv"));
}

TEST_CASE("curate split table problems") {
  const auto d = testing::scratch("cmd_splits");
  {
    std::ofstream f(d / "leak.csv");
    f << "subject_id,split\nS00,train\nS00,test\n";
  }
  auto cfg = tiny();
  cfg.data.split_csv = (d / "leak.csv").string();
  CHECK(kind_of([&] { commands::curate(cfg, {}, d / "out1"); }) == ErrorKind::leakage);
  {
    std::ofstream f(d / "partial.csv");
    f << "subject_id,split\nS00,train\n";
  }
  cfg.data.split_csv = (d / "partial.csv").string();
  CHECK(kind_of([&] { commands::curate(cfg, {}, d / "out2"); }) == ErrorKind::config);
}

TEST_CASE("normalization must match the model") {
  const auto d = testing::scratch("cmd_pairing");
  const auto cfg = tiny();
  CHECK(kind_of([&] { commands::train(cfg, "ddpm", shared_data() / "manifest.json", d / "ddpm"); }) ==
        ErrorKind::config);
  CHECK(kind_of([&] { commands::train(cfg, "vae", shared_data() / "manifest.json", d / "vae"); }) ==
        ErrorKind::invalid_argument);
  CHECK(kind_of([&] { commands::train(cfg, "gan", d / "missing.json", d / "gan"); }) == ErrorKind::io);
}

TEST_CASE("gan train, sample and evaluate") {
  const auto d = testing::scratch("cmd_gan");
  const auto cfg = tiny();
  const auto m = shared_data() / "manifest.json";
  const auto a = commands::train(cfg, "gan", m, d / "a");
  const auto b = commands::train(cfg, "gan", m, d / "b");
  CHECK(a.steps == 3);
  for (const char* f : {"config.json", "loss.csv", "last.agck", "best.agck", "model.agck", "run.json"})
    CHECK_MESSAGE(fs::exists(d / "a" / f), f);

  // header plus one row per step
  const auto loss = slurp(d / "a" / "loss.csv");
  CHECK(std::count(loss.begin(), loss.end(), '\n') == 4);
  CHECK(loss == slurp(d / "b" / "loss.csv"));
  CHECK(slurp(a.model) == slurp(b.model));

  commands::SampleOptions opt;
  opt.checkpoint = a.model;
  opt.label = 2;
  opt.count = 10;
  opt.seed = 5;
  opt.out_dir = d / "fake";
  const auto files = commands::sample(opt);
  REQUIRE(files.size() == 10);
  for (const auto& f : files) {
    const auto w = data::read_window_file(f);
    CHECK(w.label == 2);
    CHECK(w.channels() == 8);
    CHECK(w.length() == 250);
  }
  const auto prov = json::parse(slurp(d / "fake" / "provenance_c2.json"));
  CHECK(prov.at("model") == "gan");
  CHECK(prov.at("class_name") == "electrode");
  CHECK(prov.at("count") == 10);
  CHECK(prov.at("seed") == 5);

  opt.out_dir = d / "fake2";
  const auto again = commands::sample(opt);
  CHECK(slurp(files[3]) == slurp(again[3]));

  opt.steps = 5;
  CHECK(kind_of([&] { commands::sample(opt); }) == ErrorKind::invalid_argument);
  opt.steps.reset();
  opt.label = 5;
  CHECK(kind_of([&] { commands::sample(opt); }) == ErrorKind::invalid_argument);

  const auto src = commands::parse_fake_source((d / "fake").string());
  CHECK(src.name == "wgan");
  const auto out = commands::evaluate(cfg, m, {src}, d / "eval");
  const auto rep = json::parse(slurp(out.report_json));
  CHECK(rep.at("meta").at("models") == json::array({"wgan"}));
  CHECK(rep.at("meta").at("seeds").at("wgan.c2") == 5);
  CHECK(rep.at("metrics").contains("mmd_r_wgan"));
  CHECK(fs::exists(out.report_txt));

  CHECK(kind_of([&] { commands::evaluate(cfg, m, {{"x", d / "nowhere"}}, d / "eval2"); }) == ErrorKind::io);
}

TEST_CASE("fake source naming") {
  const auto s = commands::parse_fake_source("mine=/tmp/abc");
  CHECK(s.name == "mine");
  CHECK(s.dir == fs::path("/tmp/abc"));
  const auto d = testing::scratch("cmd_naming") / "some_dir";
  fs::create_directories(d);
  CHECK(commands::parse_fake_source(d.string()).name == "some_dir");
  CHECK(kind_of([] { commands::parse_fake_source("/nonexistent/dir"); }) == ErrorKind::io);
}

TEST_CASE("ddpm train and guided sampling") {
  const auto d = testing::scratch("cmd_ddpm");
  auto cfg = tiny("");
  cfg.data.normalization = data::NormScheme::zscore_recording;
  const auto cur = commands::curate(cfg, {}, d / "data");
  const auto t = commands::train(cfg, "ddpm", cur.manifest, d / "ddpm");
  CHECK(t.steps == 3);
  CHECK(kind_of([&] { commands::train(cfg, "gan", cur.manifest, d / "gan"); }) == ErrorKind::config);

  commands::SampleOptions opt;
  opt.checkpoint = t.model;
  opt.label = 1;
  opt.count = 3;
  opt.seed = 9;
  opt.guidance = 1.0;
  opt.out_dir = d / "w1";
  const auto w1 = commands::sample(opt);
  opt.guidance.reset();
  opt.conditional_only = true;
  opt.out_dir = d / "cond";
  const auto cond = commands::sample(opt);
  REQUIRE(w1.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(slurp(w1[i]) == slurp(cond[i]));

  const auto prov = json::parse(slurp(d / "w1" / "provenance_c1.json"));
  CHECK(prov.at("sampler").at("steps") == 4);
  CHECK(prov.at("sampler").at("guidance") == 1.0);
  CHECK(prov.at("normalization") == "zscore_recording");

  opt.conditional_only = false;
  opt.steps = 1000;
  CHECK(kind_of([&] { commands::sample(opt); }) == ErrorKind::invalid_argument);
}

TEST_CASE("real vs real evaluation is null") {
  const auto d = testing::scratch("cmd_null");
  const auto cfg = tiny();
  const auto m = data::read_manifest(shared_data() / "manifest.json");
  // copy the test split into a fake directory
  fs::create_directories(d / "fake");
  std::size_t i = 0;
  for (const auto& e : m.entries)
    if (e.split == "test") {
      char name[32];
      std::snprintf(name, sizeof name, "c%d_%06zu.agw", e.label, i++);
      fs::copy_file(shared_data() / e.path, d / "fake" / name);
    }
  const auto out = commands::evaluate(cfg, shared_data() / "manifest.json", {{"copy", d / "fake"}}, d / "eval");
  const auto rep = json::parse(slurp(out.report_json));
  const auto& mt = rep.at("metrics");
  // unbiased estimate on identical sets: 2 (mean off-diagonal kernel - 1) / n, in [-2/n, 0]
  const double mmd = mt.at("mmd_r_copy").get<double>();
  CHECK(mmd <= 0.0);
  CHECK(mmd >= -2.0 / double(i));
  CHECK(mt.at("psd_l2").at("copy").get<double>() <= 1e-12);
  CHECK(mt.at("rel_err_alpha").at("copy").get<double>() <= 1e-9);
  CHECK(mt.at("cov_frob").at("copy").get<double>() <= 1e-12);
}
