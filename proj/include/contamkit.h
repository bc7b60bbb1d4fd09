/* Copyright 2026 The contamkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C API for the contamkit shared library.
 *
 * All functions return ck_status; CK_OK on success. Output strings are
 * heap-allocated and must be released with ck_string_free(). Handles are
 * opaque and must be released with their matching _close function.
 * The last error message for the calling thread is available via
 * ck_last_error_message().
 */

#ifndef CONTAMKIT_H_
#define CONTAMKIT_H_

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ck_status {
  CK_OK = 0,
  CK_ERR_ARGUMENT = 1,
  CK_ERR_PARSE = 2,
  CK_ERR_IO = 3,
  CK_ERR_CAPABILITY = 4,
  CK_ERR_TRANSPORT = 5,
  CK_ERR_RATE_LIMIT = 6,
  CK_ERR_PROTOCOL = 7,
  CK_ERR_DEGENERATE = 8,
  CK_ERR_INTEGRITY = 9,
  CK_ERR_SAMPLING = 10,
  CK_ERR_INTERNAL = 11
} ck_status;

const char* ck_status_name(ck_status status);
const char* ck_version(void);
const char* ck_last_error_message(void);
void ck_string_free(char* s);

/* ---- audit runs ---- */

typedef struct ck_run ck_run; /* opaque run session */

/* Loads a run configuration (JSON file). */
ck_status ck_run_open(const char* config_path, ck_run** out);
ck_status ck_run_set_seed(ck_run* run, uint64_t seed);
ck_status ck_run_set_out_dir(ck_run* run, const char* dir);
ck_status ck_run_set_workers(ck_run* run, int workers);
/* Comma-separated subset of {wpq,local_order,token_overlap,min_k,canonical_order};
 * NULL selects every detector named in the config. */
ck_status ck_run_select_methods(ck_run* run, const char* methods_csv);
ck_status ck_run_execute(ck_run* run);
/* Valid after a successful execute; owned by the handle. */
const char* ck_run_dir(const ck_run* run);
const char* ck_run_summary_json(const ck_run* run);
void ck_run_close(ck_run* run);

/* ---- reporting over a persisted result store ---- */

/* format: "markdown" | "csv" | "json". compare_run_dir may be NULL. */
ck_status ck_render_report(const char* run_dir, const char* format,
                           const char* compare_run_dir, char** out_doc);

/* orientation: "contamination-increasing" | "raw". */
ck_status ck_correlate(const char* run_dir, const char* orientation,
                       const char* format, char** out_doc);

/* ---- oracle fine-tuning dataset construction ---- */

ck_status ck_oracle_build(const char* config_path, const char* dataset,
                          const char* split, double proportion, int pack_size,
                          uint64_t seed, const char* out_dir,
                          char** out_manifest_json);

/* ---- journal replay ---- */

/* Re-executes the config persisted in run_dir, serving every model call
 * from the recorded journals; writes a fresh result store to out_dir. */
ck_status ck_replay(const char* run_dir, const char* out_dir,
                    char** out_summary_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CONTAMKIT_H_ */
