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

// Command-line front end. Deliberately speaks only the public C API so the
// shared library surface stays honest.

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "contamkit.h"

namespace {

struct GlobalFlags {
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  int workers = 1;
  std::string format = "markdown";
};

int fail(ck_status status) {
  std::fprintf(stderr, "error (%s): %s\n", ck_status_name(status),
               ck_last_error_message());
  return 1;
}

// `methods` empty = every detector named in the config.
int do_run(const std::string& config_path, const std::string& methods,
           const GlobalFlags& flags) {
  ck_run* run = nullptr;
  ck_status status = ck_run_open(config_path.c_str(), &run);
  if (status != CK_OK) return fail(status);

  if (flags.seed) status = ck_run_set_seed(run, *flags.seed);
  if (status == CK_OK && flags.out) {
    status = ck_run_set_out_dir(run, flags.out->c_str());
  }
  if (status == CK_OK) status = ck_run_set_workers(run, flags.workers);
  if (status == CK_OK && !methods.empty()) {
    status = ck_run_select_methods(run, methods.c_str());
  }
  if (status == CK_OK) status = ck_run_execute(run);
  if (status != CK_OK) {
    int rc = fail(status);
    ck_run_close(run);
    return rc;
  }
  std::printf("run dir: %s\n%s\n", ck_run_dir(run), ck_run_summary_json(run));
  ck_run_close(run);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contamkit: contamination audits for text-completion models"};
  app.require_subcommand(1);
  app.fallthrough();  // lets --seed/--out/--workers follow the subcommand

  GlobalFlags flags;
  app.add_option("--seed", flags.seed, "override the config seed");
  app.add_option("--out", flags.out, "result store root (default from config)");
  app.add_option("--workers", flags.workers, "parallel (detector, dataset) pairs")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", flags.format, "markdown | csv | json")
      ->check(CLI::IsMember({"markdown", "md", "csv", "json"}));

  std::string config_path, run_dir, compare_dir, out_dir, dataset, split;
  std::string orientation = "contamination-increasing";
  double proportion = 100.0;
  int pack_size = 4;
  uint64_t oracle_seed = 0;

  auto* run = app.add_subcommand("run", "run every configured detector");
  run->add_option("config", config_path, "run config JSON")->required();

  // single-detector shortcuts
  struct Shortcut {
    const char* command;
    const char* method;
    const char* help;
  };
  const Shortcut shortcuts[] = {
      {"minkprob", "min_k", "low-probability token score"},
      {"canonical-order", "canonical_order", "canonical vs shuffled likelihood"},
      {"token-overlap", "token_overlap", "guided completion overlap"},
      {"wpq", "wpq", "word perturbation quiz"},
      {"local-order", "local_order", "neighbor ordering quiz"},
  };
  std::map<const CLI::App*, std::string> shortcut_method;
  for (const auto& s : shortcuts) {
    auto* sub = app.add_subcommand(s.command, s.help);
    sub->add_option("config", config_path, "run config JSON")->required();
    shortcut_method[sub] = s.method;
  }

  auto* report = app.add_subcommand("report", "render a result store");
  report->add_option("run_dir", run_dir, "result store directory")->required();
  report->add_option("--compare", compare_dir,
                     "second run dir for a before/after table");

  auto* correlate = app.add_subcommand("correlate", "cross-method agreement");
  correlate->add_option("run_dir", run_dir, "result store directory")->required();
  correlate->add_option("--orientation", orientation,
                        "contamination-increasing | raw")
      ->check(CLI::IsMember({"contamination-increasing", "raw"}));

  auto* oracle = app.add_subcommand("oracle-build",
                                    "build a contaminated fine-tuning set");
  oracle->add_option("config", config_path, "run config JSON")->required();
  oracle->add_option("--dataset", dataset, "dataset name from the config")
      ->required();
  oracle->add_option("--split", split, "dataset split")->required();
  oracle->add_option("--proportion", proportion,
                     "percentage of instances to contaminate");
  oracle->add_option("--pack", pack_size, "consecutive instances per record")
      ->check(CLI::PositiveNumber);
  oracle->add_option("--oracle-out", out_dir, "output directory")->required();

  auto* replay = app.add_subcommand("replay",
                                    "re-run a store from its journals");
  replay->add_option("run_dir", run_dir, "recorded run directory")->required();
  replay->add_option("--replay-out", out_dir, "output store root")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return do_run(config_path, "", flags);
  for (const auto& [sub, method] : shortcut_method) {
    if (sub->parsed()) return do_run(config_path, method, flags);
  }

  if (report->parsed()) {
    char* doc = nullptr;
    ck_status status = ck_render_report(
        run_dir.c_str(), flags.format.c_str(),
        compare_dir.empty() ? nullptr : compare_dir.c_str(), &doc);
    if (status != CK_OK) return fail(status);
    std::fputs(doc, stdout);
    ck_string_free(doc);
    return 0;
  }

  if (correlate->parsed()) {
    char* doc = nullptr;
    ck_status status = ck_correlate(run_dir.c_str(), orientation.c_str(),
                                    flags.format.c_str(), &doc);
    if (status != CK_OK) return fail(status);
    std::fputs(doc, stdout);
    ck_string_free(doc);
    return 0;
  }

  if (oracle->parsed()) {
    char* manifest = nullptr;
    ck_status status = ck_oracle_build(
        config_path.c_str(), dataset.c_str(), split.c_str(), proportion,
        pack_size, flags.seed.value_or(0), out_dir.c_str(), &manifest);
    if (status != CK_OK) return fail(status);
    std::printf("%s\n", manifest);
    ck_string_free(manifest);
    return 0;
  }

  if (replay->parsed()) {
    char* summary = nullptr;
    ck_status status = ck_replay(run_dir.c_str(), out_dir.c_str(), &summary);
    if (status != CK_OK) return fail(status);
    std::printf("%s\n", summary);
    ck_string_free(summary);
    return 0;
  }

  return 0;
}
