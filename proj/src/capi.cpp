// Copyright 2026 The contamkit Authors.
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

#include "contamkit.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include "backend.hpp"
#include "error.hpp"
#include "oracle.hpp"
#include "report.hpp"
#include "version.hpp"

using namespace contamkit;

namespace {

thread_local std::string g_last_error;

ck_status status_from(ErrorCode code) {
  switch (code) {
    case ErrorCode::Argument: return CK_ERR_ARGUMENT;
    case ErrorCode::Parse: return CK_ERR_PARSE;
    case ErrorCode::Io: return CK_ERR_IO;
    case ErrorCode::Capability: return CK_ERR_CAPABILITY;
    case ErrorCode::Transport: return CK_ERR_TRANSPORT;
    case ErrorCode::RateLimit: return CK_ERR_RATE_LIMIT;
    case ErrorCode::Protocol: return CK_ERR_PROTOCOL;
    case ErrorCode::DegenerateInput: return CK_ERR_DEGENERATE;
    case ErrorCode::Integrity: return CK_ERR_INTEGRITY;
    case ErrorCode::Sampling: return CK_ERR_SAMPLING;
    case ErrorCode::Internal: return CK_ERR_INTERNAL;
  }
  return CK_ERR_INTERNAL;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs the body, converting exceptions into status codes and recording the
// message for ck_last_error_message().
template <typename Fn>
ck_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CK_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CK_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CK_ERR_INTERNAL;
  }
}

}  // namespace

struct ck_run {
  RunConfig config;
  RunOptions options;
  std::string run_dir;
  std::string summary;
  bool executed = false;
};

extern "C" {

const char* ck_status_name(ck_status status) {
  switch (status) {
    case CK_OK: return "ok";
    case CK_ERR_ARGUMENT: return "argument";
    case CK_ERR_PARSE: return "parse";
    case CK_ERR_IO: return "io";
    case CK_ERR_CAPABILITY: return "capability";
    case CK_ERR_TRANSPORT: return "transport";
    case CK_ERR_RATE_LIMIT: return "rate-limit";
    case CK_ERR_PROTOCOL: return "protocol";
    case CK_ERR_DEGENERATE: return "degenerate-input";
    case CK_ERR_INTEGRITY: return "integrity";
    case CK_ERR_SAMPLING: return "sampling";
    case CK_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* ck_version(void) { return kVersion; }

const char* ck_last_error_message(void) { return g_last_error.c_str(); }

void ck_string_free(char* s) { std::free(s); }

ck_status ck_run_open(const char* config_path, ck_run** out) {
  return guarded([&] {
    if (!config_path || !out) {
      throw Error(ErrorCode::Argument, "config_path and out must be non-null");
    }
    auto run = std::make_unique<ck_run>();
    run->config = load_run_config(config_path);
    *out = run.release();
  });
}

ck_status ck_run_set_seed(ck_run* run, uint64_t seed) {
  return guarded([&] {
    if (!run) throw Error(ErrorCode::Argument, "null run handle");
    run->options.seed = seed;
  });
}

ck_status ck_run_set_out_dir(ck_run* run, const char* dir) {
  return guarded([&] {
    if (!run || !dir) throw Error(ErrorCode::Argument, "null run handle or dir");
    run->options.out_dir = std::filesystem::path(dir);
  });
}

ck_status ck_run_set_workers(ck_run* run, int workers) {
  return guarded([&] {
    if (!run) throw Error(ErrorCode::Argument, "null run handle");
    if (workers < 1) throw Error(ErrorCode::Argument, "workers must be >= 1");
    run->options.workers = workers;
  });
}

ck_status ck_run_select_methods(ck_run* run, const char* methods_csv) {
  return guarded([&] {
    if (!run) throw Error(ErrorCode::Argument, "null run handle");
    run->options.methods.clear();
    if (!methods_csv) return;
    std::stringstream ss(methods_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      if (std::find(kMethods.begin(), kMethods.end(), item) == kMethods.end()) {
        throw Error(ErrorCode::Argument, "unknown detector: " + item);
      }
      run->options.methods.push_back(item);
    }
  });
}

ck_status ck_run_execute(ck_run* run) {
  return guarded([&] {
    if (!run) throw Error(ErrorCode::Argument, "null run handle");
    RunOutcome outcome = execute_run(run->config, run->options);
    run->run_dir = outcome.run_dir.string();
    run->summary = outcome.summary.dump(2);
    run->executed = true;
  });
}

const char* ck_run_dir(const ck_run* run) {
  return run && run->executed ? run->run_dir.c_str() : nullptr;
}

const char* ck_run_summary_json(const ck_run* run) {
  return run && run->executed ? run->summary.c_str() : nullptr;
}

void ck_run_close(ck_run* run) { delete run; }

ck_status ck_render_report(const char* run_dir, const char* format,
                           const char* compare_run_dir, char** out_doc) {
  return guarded([&] {
    if (!run_dir || !out_doc) {
      throw Error(ErrorCode::Argument, "run_dir and out_doc must be non-null");
    }
    ReportFormat fmt = report_format_from_string(format ? format : "markdown");
    auto results = load_results(run_dir);
    std::string doc;
    if (compare_run_dir) {
      auto after = load_results(compare_run_dir);
      doc = render_compare(results, after, fmt);
    } else {
      doc = render_report(results, fmt);
    }
    *out_doc = dup_string(doc);
  });
}

ck_status ck_correlate(const char* run_dir, const char* orientation,
                       const char* format, char** out_doc) {
  return guarded([&] {
    if (!run_dir || !out_doc) {
      throw Error(ErrorCode::Argument, "run_dir and out_doc must be non-null");
    }
    Orientation orient = Orientation::ContaminationIncreasing;
    if (orientation) {
      std::string o = orientation;
      if (o == "raw") {
        orient = Orientation::Raw;
      } else if (o == "contamination-increasing") {
        orient = Orientation::ContaminationIncreasing;
      } else {
        throw Error(ErrorCode::Argument, "unknown orientation: " + o);
      }
    }
    ReportFormat fmt = report_format_from_string(format ? format : "markdown");
    auto results = load_results(run_dir);
    auto matrix = correlate_methods(results, orient);
    *out_doc = dup_string(render_correlation(matrix, fmt));
  });
}

ck_status ck_oracle_build(const char* config_path, const char* dataset,
                          const char* split, double proportion, int pack_size,
                          uint64_t seed, const char* out_dir,
                          char** out_manifest_json) {
  return guarded([&] {
    if (!config_path || !dataset || !split || !out_dir || !out_manifest_json) {
      throw Error(ErrorCode::Argument, "required argument is null");
    }
    RunConfig config = load_run_config(config_path);
    const DatasetRef* ref = nullptr;
    for (const auto& d : config.datasets) {
      if (d.name == dataset && d.split == split) {
        ref = &d;
        break;
      }
    }
    if (!ref) {
      throw Error(ErrorCode::Argument,
                  std::string("dataset not in config: ") + dataset + "/" + split);
    }
    // a dedicated solution generator when configured, else the shared one
    const char* role = config.backends.contains("oracle") ? "oracle" : "generator";
    if (!config.backends.contains(role) || config.backends[role].is_null()) {
      throw Error(ErrorCode::Argument,
                  "oracle construction requires backends.oracle or "
                  "backends.generator");
    }
    auto generator = make_backend(config.backends[role]);
    Dataset data = load_dataset(
        ref->path, DatasetMeta{ref->name, ref->split, ref->description});
    OracleManifest manifest = build_contaminated_set(
        data, proportion, pack_size, *generator, seed, out_dir);
    nlohmann::json obj{{"dataset", manifest.dataset},
                       {"split", manifest.split},
                       {"proportion", manifest.proportion},
                       {"pack_size", manifest.pack_size},
                       {"learning_rate", manifest.learning_rate},
                       {"epochs", manifest.epochs},
                       {"seed", manifest.seed},
                       {"generator_model", manifest.generator_model},
                       {"included_instances", manifest.included_instances},
                       {"records", manifest.records},
                       {"dropped_blocks", manifest.dropped_blocks},
                       {"training_file", manifest.training_file}};
    *out_manifest_json = dup_string(obj.dump(2));
  });
}

ck_status ck_replay(const char* run_dir, const char* out_dir,
                    char** out_summary_json) {
  return guarded([&] {
    if (!run_dir || !out_dir || !out_summary_json) {
      throw Error(ErrorCode::Argument, "required argument is null");
    }
    std::filesystem::path source(run_dir);
    RunConfig config = load_run_config(source / "config.json");
    RunOptions options;
    options.out_dir = std::filesystem::path(out_dir);
    options.replay = true;
    options.replay_source = source;
    RunOutcome outcome = execute_run(config, options);
    nlohmann::json summary{{"run_dir", outcome.run_dir.string()},
                           {"results", outcome.summary},
                           {"any_failed", outcome.any_failed}};
    *out_summary_json = dup_string(summary.dump(2));
  });
}

}  // extern "C"
