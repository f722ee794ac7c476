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

#include "artifactgen/commands.hpp"
#include "artifactgen/config.hpp"
#include "artifactgen/dataset.hpp"
#include "artifactgen/error.hpp"

#include <exception>
#include <new>
#include <string>

using namespace artifactgen;

struct ag_config {
  RunConfig cfg;
  std::string json;
  std::string hash;
};

struct ag_window {
  data::Window w;
};

namespace {

thread_local std::string g_last_error;

ag_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument: return AG_ERR_INVALID_ARGUMENT;
    case ErrorKind::config: return AG_ERR_CONFIG;
    case ErrorKind::io: return AG_ERR_IO;
    case ErrorKind::format: return AG_ERR_FORMAT;
    case ErrorKind::leakage: return AG_ERR_LEAKAGE;
    case ErrorKind::numeric: return AG_ERR_NUMERIC;
    case ErrorKind::internal: return AG_ERR_INTERNAL;
  }
  return AG_ERR_INTERNAL;
}

template <typename F>
ag_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return AG_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return AG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return AG_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorKind::invalid_argument, std::string(what) + " must not be NULL");
}

ag_status make_config(RunConfig cfg, ag_config** out) {
  auto* h = new ag_config{std::move(cfg), {}, {}};
  *out = h;
  return AG_OK;
}

}  // namespace

extern "C" {

const char* ag_last_error(void) { return g_last_error.c_str(); }

const char* ag_status_name(ag_status s) {
  switch (s) {
    case AG_OK: return "ok";
    case AG_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case AG_ERR_CONFIG: return "config";
    case AG_ERR_IO: return "io";
    case AG_ERR_FORMAT: return "format";
    case AG_ERR_LEAKAGE: return "leakage";
    case AG_ERR_NUMERIC: return "numeric";
    case AG_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

int ag_exit_code(ag_status s) {
  switch (s) {
    case AG_OK: return 0;
    case AG_ERR_INVALID_ARGUMENT:
    case AG_ERR_CONFIG:
    case AG_ERR_IO:
    case AG_ERR_FORMAT:
    case AG_ERR_LEAKAGE: return 2;
    default: return 1;
  }
}

const char* ag_version(void) { return commands::code_version(); }

ag_status ag_config_load(const char* path, ag_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    make_config(load_config(path), out);
  });
}

ag_status ag_config_parse(const char* yaml, ag_config** out) {
  return guarded([&] {
    need(yaml, "yaml");
    need(out, "out");
    make_config(parse_config(yaml, "<string>"), out);
  });
}

ag_status ag_config_default(ag_config** out) {
  return guarded([&] {
    need(out, "out");
    make_config(parse_config("{}", "<defaults>"), out);
  });
}

void ag_config_free(ag_config* cfg) { delete cfg; }

ag_status ag_config_apply_env(ag_config* cfg, int* applied) {
  return guarded([&] {
    need(cfg, "cfg");
    const bool a = apply_env_overrides(cfg->cfg);
    if (applied) *applied = a ? 1 : 0;
  });
}

ag_status ag_config_set_seed(ag_config* cfg, uint64_t seed) {
  return guarded([&] {
    need(cfg, "cfg");
    cfg->cfg.seed = seed;
    cfg->cfg.gan.train.seed = seed;
    cfg->cfg.ddpm.train.seed = seed;
  });
}

ag_status ag_config_seed(const ag_config* cfg, uint64_t* seed) {
  return guarded([&] {
    need(cfg, "cfg");
    need(seed, "seed");
    *seed = cfg->cfg.seed;
  });
}

ag_status ag_config_output_dir(const ag_config* cfg, const char** dir) {
  return guarded([&] {
    need(cfg, "cfg");
    need(dir, "dir");
    *dir = cfg->cfg.output_dir.c_str();
  });
}

ag_status ag_config_json(ag_config* cfg, const char** json) {
  return guarded([&] {
    need(cfg, "cfg");
    need(json, "json");
    cfg->json = config_to_json(cfg->cfg);
    *json = cfg->json.c_str();
  });
}

ag_status ag_config_hash(ag_config* cfg, const char** hex) {
  return guarded([&] {
    need(cfg, "cfg");
    need(hex, "hex");
    cfg->hash = config_hash(cfg->cfg);
    *hex = cfg->hash.c_str();
  });
}

ag_status ag_curate(const ag_config* cfg, const char* input_dir, const char* out_dir, size_t* windows) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out_dir, "out_dir");
    const auto r = commands::curate(cfg->cfg, input_dir ? input_dir : "", out_dir);
    if (windows) *windows = r.windows;
  });
}

ag_status ag_train(const ag_config* cfg, const char* model, const char* manifest, const char* out_dir) {
  return guarded([&] {
    need(cfg, "cfg");
    need(model, "model");
    need(manifest, "manifest");
    need(out_dir, "out_dir");
    commands::train(cfg->cfg, model, manifest, out_dir);
  });
}

void ag_sample_options_init(ag_sample_options* opt) {
  if (!opt) return;
  *opt = ag_sample_options{};
  opt->count = 1;
  opt->batch = 32;
}

ag_status ag_sample(const ag_sample_options* opt, size_t* written) {
  return guarded([&] {
    need(opt, "opt");
    need(opt->checkpoint, "checkpoint");
    need(opt->out_dir, "out_dir");
    commands::SampleOptions o;
    o.checkpoint = opt->checkpoint;
    o.out_dir = opt->out_dir;
    o.label = opt->label;
    o.count = opt->count;
    o.seed = opt->seed;
    if (opt->steps > 0) o.steps = opt->steps;
    if (opt->has_guidance) o.guidance = opt->guidance;
    o.conditional_only = opt->conditional_only != 0;
    o.live_weights = opt->live_weights != 0;
    o.batch = opt->batch > 0 ? opt->batch : 32;
    const auto files = commands::sample(o);
    if (written) *written = files.size();
  });
}

ag_status ag_evaluate(const ag_config* cfg, const char* manifest, const char* const* fakes, size_t n_fakes,
                      const char* out_dir) {
  return guarded([&] {
    need(cfg, "cfg");
    need(manifest, "manifest");
    need(out_dir, "out_dir");
    if (n_fakes > 0) need(fakes, "fakes");
    std::vector<commands::FakeSource> sources;
    for (size_t i = 0; i < n_fakes; ++i) {
      need(fakes[i], "fake directory");
      sources.push_back(commands::parse_fake_source(fakes[i]));
    }
    commands::evaluate(cfg->cfg, manifest, sources, out_dir);
  });
}

ag_status ag_window_read(const char* path, ag_window** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new ag_window{data::read_window_file(path)};
  });
}

void ag_window_free(ag_window* w) { delete w; }

ag_status ag_window_shape(const ag_window* w, size_t* channels, size_t* length, int* label) {
  return guarded([&] {
    need(w, "window");
    if (channels) *channels = w->w.channels();
    if (length) *length = w->w.length();
    if (label) *label = w->w.label;
  });
}

ag_status ag_window_data(const ag_window* w, const double** data) {
  return guarded([&] {
    need(w, "window");
    need(data, "data");
    *data = w->w.data.data.data();
  });
}

}  // extern "C"
