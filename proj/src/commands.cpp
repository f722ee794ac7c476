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

#include "artifactgen/checkpoint.hpp"
#include "artifactgen/dataset.hpp"
#include "artifactgen/ddpm.hpp"
#include "artifactgen/error.hpp"
#include "artifactgen/hash.hpp"
#include "artifactgen/metrics.hpp"
#include "artifactgen/synth.hpp"
#include "artifactgen/training.hpp"
#include "artifactgen/wgan.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>

#ifndef ARTIFACTGEN_VERSION
#define ARTIFACTGEN_VERSION "0.0.0"
#endif

namespace artifactgen::commands {

using nlohmann::json;

const char* code_version() { return ARTIFACTGEN_VERSION; }

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path.string());
  out << text;
  out.close();
  require(static_cast<bool>(out), ErrorKind::io, "write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::io, "cannot create directory " + dir.string() + ": " + ec.message());
}

// Timestamps live here and nowhere else.
class RunRecord {
 public:
  RunRecord(std::string command, std::string config_hash, std::uint64_t seed)
      : j_{{"command", std::move(command)},
           {"config_hash", std::move(config_hash)},
           {"seed", seed},
           {"code_version", code_version()},
           {"started_at", utc_now()}},
        start_(std::chrono::steady_clock::now()) {}

  json& extra() { return j_; }

  void write(const fs::path& path) {
    j_["finished_at"] = utc_now();
    j_["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_text(path, j_.dump(2) + "\n");
  }

 private:
  json j_;
  std::chrono::steady_clock::time_point start_;
};

json data_meta(const data::Manifest& m) {
  return {{"class_names", m.class_map.names()},
          {"channels", m.channels},
          {"sample_rate", m.sample_rate},
          {"normalization", data::to_string(m.normalization)},
          {"manifest_config_hash", m.config_hash}};
}

json parse_meta(const Checkpoint& ck, const fs::path& origin) {
  try {
    return json::parse(ck.meta_json);
  } catch (const json::exception& e) {
    fail(ErrorKind::format, origin.string() + ": checkpoint metadata: " + e.what());
  }
}

void annotate(Checkpoint& ck, const json& extra) {
  json meta = json::parse(ck.meta_json);
  for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
  ck.meta_json = meta.dump();
}

std::string fmt_index(const char* prefix, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%06zu.agw", prefix, i);
  return buf;
}

}  // namespace

CurateResult curate(const RunConfig& cfg, const fs::path& input_dir, const fs::path& out_dir) {
  const auto& dc = cfg.data;
  const data::ClassMap classes =
      dc.class_map.empty() ? data::ClassMap::canonical() : data::read_class_map_csv(dc.class_map);

  std::vector<data::Recording> recordings;
  if (input_dir.empty()) {
    synth::SynthConfig sc;
    sc.n_per_class = dc.synthetic.n_per_class;
    sc.window_seconds = dc.window_seconds;
    sc.sample_rate = dc.sample_rate;
    sc.seed = cfg.seed;
    sc.subjects = dc.synthetic.subjects;
    sc.gap_seconds = dc.synthetic.gap_seconds;
    sc.background_uv = dc.synthetic.background_uv;
    recordings = synth::generate_corpus(sc);
  } else {
    recordings = data::read_recording_dir(input_dir);
    require(!recordings.empty(), ErrorKind::io, "no recordings in " + input_dir.string());
  }
  for (const auto& r : recordings)
    require(std::abs(r.fs - dc.sample_rate) < 1e-9, ErrorKind::config,
            "recording " + r.id + " has fs=" + std::to_string(r.fs) + " but data.sample_rate=" +
                std::to_string(dc.sample_rate) + " (resampling is not supported)");

  std::set<std::string> subject_set;
  for (const auto& r : recordings) subject_set.insert(r.subject_id);
  std::map<std::string, std::string> splits =
      dc.split_csv.empty() ? data::assign_splits({subject_set.begin(), subject_set.end()}, cfg.seed)
                           : data::read_split_csv(dc.split_csv);
  for (const auto& s : subject_set)
    require(splits.count(s) > 0, ErrorKind::config, "subject " + s + " has no entry in the split table");

  make_dir(out_dir);
  for (const auto& s : data::kSplits) make_dir(out_dir / "windows" / s);

  data::Manifest m;
  m.config_hash = config_hash(cfg);
  m.seed = cfg.seed;
  m.class_map = classes;
  m.sample_rate = dc.sample_rate;
  m.channels = dc.channels;
  m.normalization = dc.normalization;

  data::RejectionLog rejections;
  std::size_t index = 0;
  for (const auto& raw : recordings) {
    const data::Recording rec =
        dc.normalization == data::NormScheme::zscore_recording ? data::zscore_normalize(raw) : raw;
    auto windows = data::extract_windows(rec, dc.window_seconds, dc.overlap, classes, dc.channels, &rejections);
    const std::string& split = splits.at(rec.subject_id);
    for (auto& w : windows) {
      if (dc.normalization == data::NormScheme::minmax_window) data::minmax_normalize(w);
      const std::string rel = "windows/" + split + "/" + fmt_index("w", index++);
      data::write_window_file(out_dir / rel, w);
      data::ManifestEntry e;
      e.path = rel;
      e.label = w.label;
      e.subject = w.subject_id;
      e.split = split;
      e.length = w.length();
      e.norm = w.norm;
      m.entries.push_back(std::move(e));
    }
  }
  require(!m.entries.empty(), ErrorKind::config, "no windows were extracted (check channels and class map)");

  const data::SplitReport report = data::validate_split(m);
  json jr{{"splits", json::object()}, {"warnings", report.warnings}, {"rejections", rejections.entries}};
  for (const auto& [name, st] : report.splits) {
    json per_class = json::object();
    for (std::size_t k = 0; k < st.windows_per_class.size() && k < classes.size(); ++k)
      per_class[classes.name_of(static_cast<int>(k))] = st.windows_per_class[k];
    jr["splits"][name] = {{"subjects", st.subjects}, {"windows", st.windows}, {"windows_per_class", per_class}};
  }

  RunRecord run("curate", m.config_hash, cfg.seed);
  write_text(out_dir / "config.json", config_to_json(cfg) + "\n");
  data::write_class_map_csv(out_dir / "class_map.csv", classes);
  data::write_split_csv(out_dir / "splits.csv", splits);
  data::write_manifest(out_dir / "manifest.json", m);
  write_text(out_dir / "split_report.json", jr.dump(2) + "\n");
  run.extra()["source"] = input_dir.empty() ? "synthetic" : input_dir.string();
  run.extra()["windows"] = m.entries.size();
  run.write(out_dir / "run.json");
  return {out_dir / "manifest.json", m.entries.size(), m.config_hash};
}

TrainOutcome train(const RunConfig& cfg, const std::string& model, const fs::path& manifest_path,
                   const fs::path& out_dir) {
  require(model == "gan" || model == "ddpm", ErrorKind::invalid_argument,
          "unknown model '" + model + "' (expected gan or ddpm)");
  const data::Manifest m = data::read_manifest(manifest_path);
  const auto want = model == "gan" ? data::NormScheme::minmax_window : data::NormScheme::zscore_recording;
  require(m.normalization == want, ErrorKind::config,
          "manifest is normalized with " + data::to_string(m.normalization) + " but " + model +
              " requires " + data::to_string(want) +
              ": the WGAN generator ends in tanh and trains on per-window min-max data in [-1, 1], "
              "while the diffusion model trains on per-recording z-scored data");
  const auto windows = data::load_manifest_windows(manifest_path, m, std::string("train"));
  require(!windows.empty(), ErrorKind::config, "manifest has no train windows");
  const WindowBank bank = make_bank(windows, m.class_map.size());

  make_dir(out_dir);
  const std::string hash = config_hash(cfg);
  RunRecord run("train", hash, cfg.seed);
  json extra = {{"data", data_meta(m)}, {"config_hash", hash}};

  Checkpoint last, best;
  std::string csv;
  TrainOutcome outcome;
  std::string selected;
  if (model == "gan") {
    require(bank.length() % 10 == 0, ErrorKind::config,
            "gan needs a window length divisible by 10, got " + std::to_string(bank.length()));
    gan::GeneratorConfig g;
    g.latent_dim = cfg.gan.latent_dim;
    g.classes = bank.classes;
    g.channels = bank.channels();
    g.length = bank.length();
    g.widths = cfg.gan.generator_widths;
    gan::CriticConfig d;
    d.classes = bank.classes;
    d.channels = bank.channels();
    d.length = bank.length();
    d.widths = cfg.gan.critic_widths;
    d.norm = cfg.gan.critic_norm;
    auto r = gan::train(bank, g, d, cfg.gan.train);
    csv = gan::log_to_csv(r.log);
    last = std::move(r.last);
    best = std::move(r.best);
    outcome.steps = r.log.size();
    outcome.early_stopped = r.early_stopped;
    selected = cfg.gan.checkpoint;
  } else {
    diffusion::UNetConfig u = cfg.ddpm.unet;
    u.channels = bank.channels();
    u.classes = bank.classes;
    const diffusion::BetaSchedule sched(cfg.ddpm.timesteps, cfg.ddpm.beta_start, cfg.ddpm.beta_end);
    auto r = diffusion::train(bank, u, sched, cfg.ddpm.train);
    csv = diffusion::log_to_csv(r.log, cfg.ddpm.train.track_ema_loss);
    last = std::move(r.last);
    best = std::move(r.best);
    outcome.steps = r.log.size();
    outcome.early_stopped = r.early_stopped;
    selected = cfg.ddpm.checkpoint;
    extra["sampler"] = {{"steps", cfg.ddpm.sampler.num_steps}, {"guidance", cfg.ddpm.sampler.guidance}};
  }
  annotate(last, extra);
  annotate(best, extra);

  write_text(out_dir / "config.json", config_to_json(cfg) + "\n");
  write_text(out_dir / "loss.csv", csv);
  write_checkpoint(out_dir / "last.agck", last);
  write_checkpoint(out_dir / "best.agck", best);
  write_checkpoint(out_dir / "model.agck", selected == "best" ? best : last);
  outcome.model = out_dir / "model.agck";

  run.extra()["model"] = model;
  run.extra()["manifest"] = manifest_path.string();
  run.extra()["steps"] = outcome.steps;
  run.extra()["early_stopped"] = outcome.early_stopped;
  run.extra()["selected_checkpoint"] = selected;
  run.extra()["best_step"] = best.step;
  run.write(out_dir / "run.json");
  return outcome;
}

std::vector<fs::path> sample(const SampleOptions& opt) {
  require(opt.count >= 1, ErrorKind::invalid_argument, "--num must be at least 1");
  require(opt.batch >= 1, ErrorKind::invalid_argument, "batch must be at least 1");
  require(!opt.out_dir.empty(), ErrorKind::invalid_argument, "an output directory is required");
  const Checkpoint ck = read_checkpoint(opt.checkpoint);
  const json meta = parse_meta(ck, opt.checkpoint);
  const std::string model_hash = sha256_file(opt.checkpoint);

  std::size_t classes = 0;
  json sampler = json::object();
  ad::Tensor x;
  if (ck.kind == "gan") {
    require(!opt.steps && !opt.guidance && !opt.conditional_only && !opt.live_weights, ErrorKind::invalid_argument,
            "--steps, --guidance, --no-null-branch and --live apply to ddpm checkpoints only");
    const gan::Generator g = gan::load_generator(ck);
    classes = g.config().classes;
    require(opt.label >= 0 && static_cast<std::size_t>(opt.label) < classes, ErrorKind::invalid_argument,
            "class " + std::to_string(opt.label) + " out of range: model has K=" + std::to_string(classes));
    x = gan::sample(g, opt.label, opt.count, opt.seed, opt.batch);
  } else if (ck.kind == "ddpm") {
    const diffusion::LoadedModel lm = diffusion::load_model(ck, opt.live_weights);
    classes = lm.net.config().classes;
    require(opt.label >= 0 && static_cast<std::size_t>(opt.label) < classes, ErrorKind::invalid_argument,
            "class " + std::to_string(opt.label) + " out of range: model has K=" + std::to_string(classes));
    diffusion::SamplerConfig sc;
    if (meta.contains("sampler")) {
      sc.num_steps = meta["sampler"].at("steps").get<std::size_t>();
      sc.guidance = meta["sampler"].at("guidance").get<double>();
    }
    if (opt.steps) sc.num_steps = *opt.steps;
    if (opt.guidance) sc.guidance = *opt.guidance;
    sc.conditional_only = opt.conditional_only;
    require(sc.num_steps >= 1 && sc.num_steps <= lm.sched.steps(), ErrorKind::invalid_argument,
            "--steps must lie in [1, " + std::to_string(lm.sched.steps()) + "]");
    require(std::isfinite(sc.guidance), ErrorKind::invalid_argument, "--guidance must be finite");
    x = diffusion::sample(lm.net, opt.label, opt.count, lm.length, sc, lm.sched, opt.seed, opt.batch);
    sampler = {{"steps", sc.num_steps},
               {"guidance", sc.guidance},
               {"conditional_only", sc.conditional_only},
               {"weights", opt.live_weights || !ck.has_group("unet.ema") ? "live" : "ema"}};
  } else {
    fail(ErrorKind::format, opt.checkpoint.string() + ": unknown checkpoint kind '" + ck.kind + "'");
  }

  make_dir(opt.out_dir);
  const std::vector<int> labels(opt.count, opt.label);
  auto windows = to_windows(x, labels);
  data::NormMeta norm;
  if (meta.contains("normalization")) norm.scheme = data::parse_norm_scheme(meta["normalization"].get<std::string>());
  std::vector<fs::path> files;
  json names = json::array();
  const std::string prefix = "c" + std::to_string(opt.label) + "_";
  for (std::size_t i = 0; i < windows.size(); ++i) {
    windows[i].norm = norm;
    const std::string name = fmt_index(prefix.c_str(), i);
    data::write_window_file(opt.out_dir / name, windows[i]);
    files.push_back(opt.out_dir / name);
    names.push_back(name);
  }

  std::string class_name;
  if (meta.contains("data") && meta["data"].contains("class_names")) {
    const auto& cn = meta["data"]["class_names"];
    if (static_cast<std::size_t>(opt.label) < cn.size()) class_name = cn[opt.label].get<std::string>();
  }
  json prov{{"model", ck.kind},
            {"model_hash", model_hash},
            {"checkpoint_step", ck.step},
            {"class", opt.label},
            {"class_name", class_name},
            {"count", opt.count},
            {"seed", opt.seed},
            {"sampler", sampler},
            {"normalization", data::to_string(norm.scheme)},
            {"code_version", code_version()},
            {"files", names}};
  const std::string tag = "c" + std::to_string(opt.label);
  write_text(opt.out_dir / ("provenance_" + tag + ".json"), prov.dump(2) + "\n");
  RunRecord run("sample", sha256_hex(prov.dump()), opt.seed);
  run.extra()["checkpoint"] = opt.checkpoint.string();
  run.write(opt.out_dir / ("run_" + tag + ".json"));
  return files;
}

std::vector<fs::path> window_files(const fs::path& dir) {
  require(fs::is_directory(dir), ErrorKind::io, "directory not found: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".agw") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

FakeSource parse_fake_source(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq != std::string::npos) {
    require(eq > 0 && eq + 1 < spec.size(), ErrorKind::invalid_argument, "bad fake source '" + spec + "'");
    return {spec.substr(0, eq), spec.substr(eq + 1)};
  }
  const fs::path dir(spec);
  require(fs::is_directory(dir), ErrorKind::io, "fake directory not found: " + spec);
  std::set<std::string> kinds;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto fn = e.path().filename().string();
    if (fn.rfind("provenance_", 0) != 0 || e.path().extension() != ".json") continue;
    try {
      kinds.insert(json::parse(read_text(e.path())).at("model").get<std::string>());
    } catch (const json::exception&) {
    }
  }
  if (kinds.size() == 1) return {*kinds.begin() == "gan" ? "wgan" : *kinds.begin(), dir};
  auto base = dir.filename().string();
  if (base.empty()) base = dir.parent_path().filename().string();
  return {base, dir};
}

EvaluateOutcome evaluate(const RunConfig& cfg, const fs::path& manifest_path, const std::vector<FakeSource>& fakes,
                         const fs::path& out_dir) {
  require(!fakes.empty(), ErrorKind::invalid_argument, "at least one fake directory is required");
  const data::Manifest m = data::read_manifest(manifest_path);
  const std::optional<std::string> split =
      cfg.eval.real_split == "all" ? std::nullopt : std::optional<std::string>(cfg.eval.real_split);
  const auto real_windows = data::load_manifest_windows(manifest_path, m, split);
  require(!real_windows.empty(), ErrorKind::config, "no real windows in split '" + cfg.eval.real_split + "'");
  const metrics::WindowSet real = metrics::make_set("real", real_windows);
  const auto train_windows = data::load_manifest_windows(manifest_path, m, std::string("train"));
  const metrics::WindowSet real_train = metrics::make_set("real", train_windows);

  std::map<std::string, std::uint64_t> seeds;
  std::set<std::string> names;
  std::vector<metrics::WindowSet> sets;
  for (const auto& src : fakes) {
    require(src.name != "real" && names.insert(src.name).second, ErrorKind::invalid_argument,
            "duplicate or reserved model name '" + src.name + "'");
    const auto files = window_files(src.dir);
    require(!files.empty(), ErrorKind::io, "no .agw window files in " + src.dir.string());
    metrics::WindowSet s;
    s.origin = src.name;
    for (const auto& f : files) {
      data::Window w = data::read_window_file(f);
      require(w.channels() == real.channels() && w.length() == real.length(), ErrorKind::format,
              f.string() + ": shape " + std::to_string(w.channels()) + "x" + std::to_string(w.length()) +
                  " does not match the real set's " + std::to_string(real.channels()) + "x" +
                  std::to_string(real.length()));
      require(w.label >= 0 && static_cast<std::size_t>(w.label) < m.class_map.size(), ErrorKind::format,
              f.string() + ": label " + std::to_string(w.label) + " outside the class map");
      s.windows.push_back(std::move(w.data));
      s.labels.push_back(w.label);
    }
    for (const auto& e : fs::directory_iterator(src.dir)) {
      const auto fn = e.path().filename().string();
      if (fn.rfind("provenance_", 0) != 0 || e.path().extension() != ".json") continue;
      try {
        const json p = json::parse(read_text(e.path()));
        seeds[src.name + "." + e.path().stem().string().substr(11)] = p.at("seed").get<std::uint64_t>();
      } catch (const json::exception& ex) {
        fail(ErrorKind::format, e.path().string() + ": " + ex.what());
      }
    }
    sets.push_back(std::move(s));
  }

  metrics::EvalOptions opt;
  opt.sample_rate = m.sample_rate;
  signal::WelchOptions w = signal::welch_defaults(real.length());
  if (cfg.eval.welch_nperseg > 0) w.nperseg = cfg.eval.welch_nperseg;
  w.overlap_frac = cfg.eval.welch_overlap;
  w.detrend = cfg.eval.welch_detrend;
  require(w.nperseg <= real.length(), ErrorKind::config,
          "eval.welch.nperseg=" + std::to_string(w.nperseg) + " exceeds the window length " +
              std::to_string(real.length()));
  opt.welch = w;
  opt.bands = cfg.eval.bands;
  opt.max_lag = cfg.eval.max_lag;
  opt.knn_k = cfg.eval.knn_k;
  require(opt.max_lag < real.length(), ErrorKind::config, "eval.max_lag must be below the window length");

  metrics::MetricReport report =
      metrics::evaluate(real, sets, opt, train_windows.empty() ? nullptr : &real_train, m.class_map.size());
  report.normalization = data::to_string(m.normalization);
  report.class_names = m.class_map.names();
  report.channel_names = m.channels;
  report.seeds = seeds;
  report.seeds["config"] = cfg.seed;

  make_dir(out_dir);
  const std::string hash = config_hash(cfg);
  RunRecord run("evaluate", hash, cfg.seed);
  write_text(out_dir / "report.json", metrics::report_to_json(report));
  write_text(out_dir / "report.txt", metrics::report_table(report));
  run.extra()["manifest"] = manifest_path.string();
  json jf = json::array();
  for (const auto& f : fakes) jf.push_back({{"name", f.name}, {"dir", f.dir.string()}});
  run.extra()["fakes"] = jf;
  run.write(out_dir / "run.json");
  return {out_dir / "report.json", out_dir / "report.txt"};
}

}  // namespace artifactgen::commands
