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

/* C interface to artifactgen. All functions return an ag_status; on failure
 * ag_last_error() describes the problem (thread-local, valid until the next
 * call on the same thread). Strings returned through handles stay valid until
 * the handle is freed or the same accessor is called again. */
#ifndef ARTIFACTGEN_H_
#define ARTIFACTGEN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(AG_BUILDING_LIBRARY)
#define AG_API __attribute__((visibility("default")))
#else
#define AG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ag_status {
  AG_OK = 0,
  AG_ERR_INVALID_ARGUMENT = 1,
  AG_ERR_CONFIG = 2,
  AG_ERR_IO = 3,
  AG_ERR_FORMAT = 4,
  AG_ERR_LEAKAGE = 5,
  AG_ERR_NUMERIC = 6,
  AG_ERR_INTERNAL = 7
} ag_status;

AG_API const char* ag_last_error(void);
AG_API const char* ag_status_name(ag_status status);
/* Process exit code for a status: 0 success, 2 user/config error, 1 internal failure. */
AG_API int ag_exit_code(ag_status status);
AG_API const char* ag_version(void);

/* ---- run configuration */
typedef struct ag_config ag_config;

AG_API ag_status ag_config_load(const char* path, ag_config** out);
AG_API ag_status ag_config_parse(const char* yaml, ag_config** out);
/* Defaults only; equivalent to parsing an empty document. */
AG_API ag_status ag_config_default(ag_config** out);
AG_API void ag_config_free(ag_config* cfg);
/* Applies ARTIFACTGEN_SEED if set; *applied (optional) reports whether it was. */
AG_API ag_status ag_config_apply_env(ag_config* cfg, int* applied);
AG_API ag_status ag_config_set_seed(ag_config* cfg, uint64_t seed);
AG_API ag_status ag_config_seed(const ag_config* cfg, uint64_t* seed);
AG_API ag_status ag_config_output_dir(const ag_config* cfg, const char** dir);
AG_API ag_status ag_config_json(ag_config* cfg, const char** json);
AG_API ag_status ag_config_hash(ag_config* cfg, const char** hex);

/* ---- commands */

/* input_dir NULL or "": synthetic corpus. Writes manifest.json and friends into out_dir. */
AG_API ag_status ag_curate(const ag_config* cfg, const char* input_dir, const char* out_dir, size_t* windows);

/* model: "gan" or "ddpm". */
AG_API ag_status ag_train(const ag_config* cfg, const char* model, const char* manifest, const char* out_dir);

typedef struct ag_sample_options {
  const char* checkpoint;
  const char* out_dir;
  int label;
  size_t count;
  uint64_t seed;
  size_t steps;          /* 0: from the checkpoint */
  int has_guidance;
  double guidance;
  int conditional_only;  /* never evaluate the null branch */
  int live_weights;      /* ignore the EMA shadow */
  size_t batch;          /* 0: 32 */
} ag_sample_options;

AG_API void ag_sample_options_init(ag_sample_options* opt);
AG_API ag_status ag_sample(const ag_sample_options* opt, size_t* written);

/* fakes: "name=dir" or "dir" entries. */
AG_API ag_status ag_evaluate(const ag_config* cfg, const char* manifest, const char* const* fakes, size_t n_fakes,
                             const char* out_dir);

/* ---- window files */
typedef struct ag_window ag_window;

AG_API ag_status ag_window_read(const char* path, ag_window** out);
AG_API void ag_window_free(ag_window* w);
AG_API ag_status ag_window_shape(const ag_window* w, size_t* channels, size_t* length, int* label);
/* Row-major C x L samples. */
AG_API ag_status ag_window_data(const ag_window* w, const double** data);

#ifdef __cplusplus
}
#endif

#endif /* ARTIFACTGEN_H_ */
