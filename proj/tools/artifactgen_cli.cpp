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

// Command-line front end. Links only the C API.

#include "artifactgen/artifactgen.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct ConfigDeleter {
  void operator()(ag_config* c) const { ag_config_free(c); }
};
using ConfigPtr = std::unique_ptr<ag_config, ConfigDeleter>;

struct Failure {
  ag_status status;
};

void check(ag_status s) {
  if (s != AG_OK) throw Failure{s};
}

ConfigPtr load(const std::string& path) {
  ag_config* c = nullptr;
  check(path.empty() ? ag_config_default(&c) : ag_config_load(path.c_str(), &c));
  ConfigPtr cfg(c);
  int applied = 0;
  check(ag_config_apply_env(cfg.get(), &applied));
  return cfg;
}

std::string output_dir(const ag_config* cfg, const std::string& flag, const char* sub) {
  if (!flag.empty()) return flag;
  const char* base = nullptr;
  check(ag_config_output_dir(cfg, &base));
  return std::string(base) + "/" + sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional WGAN-GP and DDPM synthesis of multi-channel artifact windows"};
  app.set_version_flag("--version", std::string(ag_version()));
  app.require_subcommand(1);

  std::string config_path, input_dir, out_dir, model, manifest, checkpoint;
  bool synthetic = false;

  auto* curate = app.add_subcommand("curate", "window, normalize and split recordings into a manifest");
  curate->add_option("-c,--config", config_path, "run configuration (YAML)")->required()->check(CLI::ExistingFile);
  auto* in_opt = curate->add_option("-i,--input", input_dir, "directory of recordings");
  auto* syn_opt = curate->add_flag("--synthetic", synthetic, "use the built-in artifact simulator");
  in_opt->excludes(syn_opt);
  curate->add_option("-o,--out", out_dir, "output directory (default: <output_dir>/data)");

  auto* train = app.add_subcommand("train", "train a model on the train split of a manifest");
  train->add_option("-c,--config", config_path, "run configuration (YAML)")->required()->check(CLI::ExistingFile);
  train->add_option("-m,--model", model, "gan or ddpm")->required()->check(CLI::IsMember({"gan", "ddpm"}));
  train->add_option("--manifest", manifest, "manifest.json written by curate")->required();
  train->add_option("-o,--out", out_dir, "output directory (default: <output_dir>/<model>)");

  ag_sample_options sopt;
  ag_sample_options_init(&sopt);
  std::optional<std::uint64_t> seed;
  std::optional<double> guidance;
  std::size_t steps = 0;
  bool no_null = false, live = false;
  auto* sample = app.add_subcommand("sample", "draw class-conditional windows from a checkpoint");
  sample->add_option("--checkpoint", checkpoint, "checkpoint file (.agck)")->required();
  sample->add_option("--class", sopt.label, "class index")->required();
  sample->add_option("-n,--num", sopt.count, "number of windows")->required()->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "sampling seed (default: $ARTIFACTGEN_SEED or 0)");
  sample->add_option("--steps", steps, "ddpm sampling steps (default: from training config)");
  sample->add_option("--guidance", guidance, "ddpm guidance scale w");
  sample->add_flag("--no-null-branch", no_null, "ddpm: conditional prediction only");
  sample->add_flag("--live", live, "ddpm: use live weights instead of the EMA shadow");
  sample->add_option("--batch", sopt.batch, "batch size")->check(CLI::PositiveNumber);
  sample->add_option("-o,--out", out_dir, "output directory")->required();

  std::vector<std::string> fakes;
  bool quiet = false;
  auto* evaluate = app.add_subcommand("evaluate", "compare synthetic window sets against real data");
  evaluate->add_option("-c,--config", config_path, "run configuration (YAML)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--manifest", manifest, "real manifest.json")->required();
  evaluate->add_option("--fake", fakes, "synthetic window directory, optionally name=dir")->required();
  evaluate->add_option("-o,--out", out_dir, "output directory (default: <output_dir>/eval)");
  evaluate->add_flag("-q,--quiet", quiet, "do not print the table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (curate->parsed()) {
      if (input_dir.empty() && !synthetic) {
        std::cerr << "error: curate needs --input DIR or --synthetic\n";
        return 2;
      }
      auto cfg = load(config_path);
      const auto out = output_dir(cfg.get(), out_dir, "data");
      std::size_t n = 0;
      check(ag_curate(cfg.get(), synthetic ? nullptr : input_dir.c_str(), out.c_str(), &n));
      const char* hash = nullptr;
      check(ag_config_hash(cfg.get(), &hash));
      std::cout << "wrote " << n << " windows to " << out << "/manifest.json (config " << hash << ")\n";
    } else if (train->parsed()) {
      auto cfg = load(config_path);
      const auto out = output_dir(cfg.get(), out_dir, model.c_str());
      check(ag_train(cfg.get(), model.c_str(), manifest.c_str(), out.c_str()));
      std::cout << "wrote " << out << "/model.agck\n";
    } else if (sample->parsed()) {
      if (seed) {
        sopt.seed = *seed;
      } else {
        auto cfg = load("");
        check(ag_config_seed(cfg.get(), &sopt.seed));
      }
      sopt.checkpoint = checkpoint.c_str();
      sopt.out_dir = out_dir.c_str();
      sopt.steps = steps;
      sopt.has_guidance = guidance.has_value();
      sopt.guidance = guidance.value_or(0.0);
      sopt.conditional_only = no_null;
      sopt.live_weights = live;
      std::size_t n = 0;
      check(ag_sample(&sopt, &n));
      std::cout << "wrote " << n << " windows to " << out_dir << "\n";
    } else if (evaluate->parsed()) {
      auto cfg = load(config_path);
      const auto out = output_dir(cfg.get(), out_dir, "eval");
      std::vector<const char*> raw;
      for (const auto& f : fakes) raw.push_back(f.c_str());
      check(ag_evaluate(cfg.get(), manifest.c_str(), raw.data(), raw.size(), out.c_str()));
      if (!quiet) {
        std::ifstream in(out + "/report.txt");
        std::cout << in.rdbuf();
      }
      std::cout << "wrote " << out << "/report.json\n";
    }
  } catch (const Failure& f) {
    std::cerr << "error (" << ag_status_name(f.status) << "): " << ag_last_error() << "\n";
    return ag_exit_code(f.status);
  }
  return 0;
}
