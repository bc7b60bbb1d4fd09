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

#include "report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "error.hpp"
#include "oracle.hpp"
#include "prob_detectors.hpp"
#include "prompt_detectors.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "version.hpp"

namespace contamkit {

using nlohmann::json;

namespace {

std::string two_dp(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string one_dp(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string hex64(uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string iso_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

}  // namespace

RunConfig run_config_from_json(const json& doc,
                               const std::filesystem::path& base_dir) {
  RunConfig config;
  if (!doc.contains("seed")) {
    throw Error(ErrorCode::Parse, "run config requires a seed");
  }
  config.seed = doc["seed"].get<uint64_t>();
  if (doc.contains("out_dir")) {
    std::filesystem::path p = doc["out_dir"].get<std::string>();
    config.out_dir = p.is_absolute() ? p : base_dir / p;
  }
  if (!doc.contains("backends") || !doc["backends"].contains("subject")) {
    throw Error(ErrorCode::Parse, "run config requires backends.subject");
  }
  config.backends = doc["backends"];
  if (!doc.contains("datasets") || doc["datasets"].empty()) {
    throw Error(ErrorCode::Parse, "run config requires at least one dataset");
  }
  for (const auto& d : doc["datasets"]) {
    DatasetRef ref;
    ref.name = d.at("name").get<std::string>();
    ref.split = d.value("split", "unsplit");
    std::filesystem::path p = d.at("path").get<std::string>();
    ref.path = p.is_absolute() ? p : base_dir / p;
    ref.description = d.value("description", "");
    if (!std::filesystem::exists(ref.path)) {
      throw Error(ErrorCode::Argument,
                  "dataset file does not exist: " + ref.path.string());
    }
    config.datasets.push_back(std::move(ref));
  }
  config.detectors = doc.value("detectors", json::object());
  if (config.detectors.empty()) {
    throw Error(ErrorCode::Parse, "run config names no detectors");
  }
  config.raw = doc;
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config: " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("config parse error: ") + e.what());
  }
  return run_config_from_json(doc, std::filesystem::absolute(path).parent_path());
}

namespace {

struct Task {
  std::string method;
  DatasetRef dataset;
};

json caps_to_json(const BackendCapabilities& caps) {
  return json{{"completion", caps.supports_completion},
              {"chat", caps.supports_chat},
              {"token_scoring", caps.supports_token_scoring}};
}

BackendCapabilities caps_from_json(const json& j) {
  return {.supports_completion = j.value("completion", false),
          .supports_chat = j.value("chat", false),
          .supports_token_scoring = j.value("token_scoring", false)};
}

std::string pair_tag(const Task& task) {
  return task.method + "--" + task.dataset.name + "-" + task.dataset.split;
}

struct RoleSet {
  std::shared_ptr<ModelBackend> subject, generator, judge;
};

json quiz_records_json(const QuizAccuracy& quiz) {
  json records = json::array();
  for (const auto& r : quiz.records) {
    records.push_back(json{{"id", r.id},
                           {"prompt", r.prompt},
                           {"expected", std::string(1, r.expected)},
                           {"chosen", r.chosen},
                           {"correct", r.correct}});
  }
  return records;
}

// One (detector, dataset) pair. Throws only on programming errors; expected
// failures land in the result.
DetectorResult run_pair(const Task& task, const json& detector_config,
                        const RoleSet& roles,
                        const std::map<std::string, BackendCapabilities>& caps,
                        const std::string& subject_model, uint64_t master_seed,
                        bool deterministic) {
  DetectorResult result;
  result.method = task.method;
  result.model = subject_model;
  result.dataset = task.dataset.name;
  result.split = task.dataset.split;
  result.seed = master_seed;
  result.version = kVersion;
  result.timestamp = deterministic ? "" : iso_now();

  const BackendCapabilities subject_caps = caps.at("subject");
  const bool needs_scoring =
      task.method == "min_k" || task.method == "canonical_order";
  if (needs_scoring && !subject_caps.supports_token_scoring) {
    result.skipped = true;
    result.skip_reason = "subject backend does not expose token scoring";
    return result;
  }
  if (!needs_scoring && !subject_caps.supports_completion) {
    result.skipped = true;
    result.skip_reason = "subject backend does not support completion";
    return result;
  }

  uint64_t seed = derive_seed(master_seed, task.method + "/" + task.dataset.name +
                                               "/" + task.dataset.split);
  try {
    Dataset dataset =
        load_dataset(task.dataset.path, DatasetMeta{task.dataset.name,
                                                    task.dataset.split,
                                                    task.dataset.description});
    if (task.method == "min_k") {
      MinKConfig config;
      config.k_percent = detector_config.value("k_percent", 20.0);
      config.sample_size = detector_config.value("sample_size", 100);
      config.render = render_mode_from_string(
          detector_config.value("render", "qa-concat"));
      MinKResult mk = min_k_split_report(*roles.subject, dataset, config, seed);
      result.payload = json{{"mean", mk.summary.mean},
                            {"std", mk.summary.std},
                            {"n", mk.summary.n},
                            {"k_percent", config.k_percent},
                            {"unit", "mean NLL of min-k tokens"}};
      json records = json::array();
      for (const auto& [id, score] : mk.per_instance) {
        records.push_back(json{{"id", id}, {"score", score}});
      }
      result.per_instance = std::move(records);
    } else if (task.method == "canonical_order") {
      CanonicalOrderConfig config;
      config.sample_size = detector_config.value("sample_size", 100);
      config.num_shards = detector_config.value("num_shards", 10);
      config.num_permutations = detector_config.value("num_permutations", 25);
      config.separator = detector_config.value("separator", "\n");
      config.render = render_mode_from_string(
          detector_config.value("render", "qa-concat"));
      CanonicalOrderResult co =
          canonical_order_pvalue(*roles.subject, dataset, config, seed);
      result.payload = json{{"p_value", co.p_value.value},
                            {"df", co.p_value.resamples_or_df},
                            {"shard_diffs", co.shard_diffs},
                            {"skipped_shards", co.skipped_shards}};
      json records = json::array();
      for (const auto& s : co.per_shard) {
        records.push_back(json{{"canonical_ll", s.canonical_ll},
                               {"permutation_ll", s.permutation_ll}});
      }
      result.per_instance = std::move(records);
    } else if (task.method == "token_overlap") {
      if (!roles.judge) {
        throw Error(ErrorCode::Argument, "token_overlap requires a judge backend");
      }
      OverlapConfig config;
      config.n = detector_config.value("n", 10);
      config.resamples = detector_config.value("resamples", 10000);
      config.split_lo = detector_config.value("split_lo", 0.4);
      config.split_hi = detector_config.value("split_hi", 0.6);
      config.render = render_mode_from_string(
          detector_config.value("render", "qa-concat"));
      OverlapReport report = run_token_overlap(*roles.subject, *roles.judge,
                                               dataset, config, seed);
      result.payload = json{{"exact", report.exact_count},
                            {"near", report.near_count},
                            {"p_value", report.p_value.value},
                            {"contaminated", report.contaminated},
                            {"judge_failures", report.judge_failures},
                            {"resamples", config.resamples}};
      json records = json::array();
      for (const auto& t : report.trials) {
        records.push_back(json{{"id", t.instance_id},
                               {"prefix", t.prefix},
                               {"reference_suffix", t.reference_suffix},
                               {"guided_prompt", t.guided_prompt},
                               {"general_prompt", t.general_prompt},
                               {"guided_completion", t.guided_completion},
                               {"general_completion", t.general_completion},
                               {"guided_f1", t.guided_rouge.f1},
                               {"general_f1", t.general_rouge.f1},
                               {"exact", t.exact},
                               {"near", t.near},
                               {"judge_failed", t.judge_failed}});
      }
      result.per_instance = std::move(records);
    } else if (task.method == "wpq") {
      if (!roles.generator) {
        throw Error(ErrorCode::Argument, "wpq requires a generator backend");
      }
      int n = detector_config.value("sample_size", 100);
      RenderMode render = render_mode_from_string(
          detector_config.value("render", "question-only"));
      GenerationParams perturb_params;
      perturb_params.temperature = detector_config.value("perturb_temperature", 0.9);
      perturb_params.top_p = detector_config.value("perturb_top_p", 0.9);
      std::vector<DatasetInstance> sample = sample_instances(
          dataset, n, derive_seed(seed, "wpq-sample"));
      std::vector<PerturbationQuizItem> items;
      int failures = 0;
      for (const auto& inst : sample) {
        Rng rng(derive_seed(derive_seed(seed, "wpq-item"),
                            static_cast<uint64_t>(inst.index)));
        auto item = perturb_instance(*roles.generator,
                                     render_instance(inst, render), inst.id,
                                     rng, perturb_params);
        if (item) {
          items.push_back(std::move(*item));
        } else {
          ++failures;
        }
      }
      QuizAccuracy quiz = run_wpq(*roles.subject, items, dataset.meta, seed);
      int planned = static_cast<int>(sample.size());
      result.payload =
          json{{"accuracy", quiz.accuracy},  // failures excluded
               {"raw_accuracy",
                planned > 0 ? static_cast<double>(quiz.n_correct) / planned : 0.0},
               {"n_items", quiz.n_items},
               {"n_correct", quiz.n_correct},
               {"n_planned", planned},
               {"perturbation_failures", failures}};
      result.per_instance = quiz_records_json(quiz);
    } else if (task.method == "local_order") {
      LocalOrderConfig config;
      config.n = detector_config.value("n", 100);
      config.n_options = detector_config.value("n_options", 4);
      config.same_category = detector_config.value("same_category", false);
      config.render = render_mode_from_string(
          detector_config.value("render", "qa-concat"));
      QuizAccuracy quiz =
          run_local_order_quiz(*roles.subject, dataset, config, seed);
      result.payload = json{{"accuracy", quiz.accuracy},
                            {"n_items", quiz.n_items},
                            {"n_correct", quiz.n_correct},
                            {"n_skipped", quiz.n_skipped}};
      result.per_instance = quiz_records_json(quiz);
    } else {
      throw Error(ErrorCode::Argument, "unknown detector: " + task.method);
    }
  } catch (const Error& e) {
    result.failed = true;
    result.error = std::string(error_code_name(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    result.failed = true;
    result.error = std::string("internal: ") + e.what();
  }
  return result;
}

json result_to_json(const DetectorResult& r) {
  return json{{"method", r.method},
              {"model", r.model},
              {"dataset", r.dataset},
              {"split", r.split},
              {"seed", r.seed},
              {"version", r.version},
              {"timestamp", r.timestamp},
              {"skipped", r.skipped},
              {"skip_reason", r.skip_reason},
              {"failed", r.failed},
              {"error", r.error},
              {"payload", r.payload},
              {"per_instance", r.per_instance}};
}

DetectorResult result_from_json(const json& j) {
  DetectorResult r;
  r.method = j.value("method", "");
  r.model = j.value("model", "");
  r.dataset = j.value("dataset", "");
  r.split = j.value("split", "");
  r.seed = j.value("seed", 0ULL);
  r.version = j.value("version", "");
  r.timestamp = j.value("timestamp", "");
  r.skipped = j.value("skipped", false);
  r.skip_reason = j.value("skip_reason", "");
  r.failed = j.value("failed", false);
  r.error = j.value("error", "");
  r.payload = j.value("payload", json::object());
  r.per_instance = j.value("per_instance", json::array());
  return r;
}

}  // namespace

RunOutcome execute_run(const RunConfig& config, const RunOptions& options) {
  uint64_t seed = options.seed.value_or(config.seed);
  std::filesystem::path out_root = options.out_dir.value_or(config.out_dir);

  // content-addressed run id
  uint64_t id_hash = fnv1a64(config.raw.dump());
  id_hash = splitmix64(id_hash ^ seed);
  id_hash = splitmix64(id_hash ^ fnv1a64(kVersion));
  std::string run_id = hex64(id_hash);
  std::filesystem::path run_dir = out_root / run_id;
  std::filesystem::create_directories(run_dir);

  // which detectors to run
  std::vector<std::string> methods;
  for (const auto& m : kMethods) {
    if (!config.detectors.contains(m)) continue;
    if (!options.methods.empty() &&
        std::find(options.methods.begin(), options.methods.end(), m) ==
            options.methods.end()) {
      continue;
    }
    methods.push_back(m);
  }
  for (const auto& m : options.methods) {
    if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end()) {
      throw Error(ErrorCode::Argument, "unknown detector: " + m);
    }
  }
  if (methods.empty()) {
    throw Error(ErrorCode::Argument, "no detectors selected");
  }

  // probe capabilities (or recover them from the run being replayed)
  std::map<std::string, BackendCapabilities> caps;
  std::string subject_model;
  json replay_config;
  if (options.replay) {
    std::ifstream in(options.replay_source / "config.json");
    if (!in) {
      throw Error(ErrorCode::Io, "replay source has no config.json: " +
                                     options.replay_source.string());
    }
    replay_config = json::parse(in);
    for (auto& [role, c] : replay_config.at("probed_capabilities").items()) {
      caps[role] = caps_from_json(c);
    }
    subject_model = replay_config.value("subject_model", "replay");
  } else {
    for (const std::string role : {"subject", "generator", "judge"}) {
      if (config.backends.contains(role) && !config.backends[role].is_null()) {
        auto backend = make_backend(config.backends[role]);
        caps[role] = backend->capabilities();
        if (role == std::string("subject")) subject_model = backend->model_id();
      }
    }
  }

  bool deterministic = true;
  if (!options.replay) {
    for (const std::string role : {"subject", "generator", "judge"}) {
      if (config.backends.contains(role) && !config.backends[role].is_null()) {
        deterministic =
            deterministic && make_backend(config.backends[role])->deterministic();
      }
    }
  }

  // persist the effective config so the run can be replayed
  {
    json copy = config.raw;
    copy["seed"] = seed;
    json datasets = json::array();
    for (const auto& d : config.datasets) {
      datasets.push_back(json{{"name", d.name},
                              {"split", d.split},
                              {"path", std::filesystem::absolute(d.path).string()},
                              {"description", d.description}});
    }
    copy["datasets"] = datasets;
    json caps_json = json::object();
    for (const auto& [role, c] : caps) caps_json[role] = caps_to_json(c);
    copy["probed_capabilities"] = caps_json;
    copy["subject_model"] = subject_model;
    copy["run_id"] = run_id;
    std::ofstream out(run_dir / "config.json", std::ios::trunc);
    out << copy.dump(2) << "\n";
  }

  std::vector<Task> tasks;
  for (const auto& method : methods) {
    for (const auto& dataset : config.datasets) {
      tasks.push_back(Task{method, dataset});
    }
  }

  auto make_role_backends = [&](const Task& task) {
    RoleSet roles;
    const bool needs_generator = task.method == "wpq";
    const bool needs_judge = task.method == "token_overlap";
    auto build = [&](const std::string& role) -> std::shared_ptr<ModelBackend> {
      std::filesystem::path journal_path =
          run_dir / "journals" / (pair_tag(task) + "--" + role + ".jsonl");
      std::shared_ptr<ModelBackend> inner;
      if (options.replay) {
        inner = std::make_shared<ReplayBackend>(
            options.replay_source / "journals" /
                (pair_tag(task) + "--" + role + ".jsonl"),
            subject_model);
      } else {
        if (!config.backends.contains(role) || config.backends[role].is_null()) {
          return nullptr;
        }
        inner = make_backend(config.backends[role]);
      }
      auto journal = std::make_shared<Journal>(journal_path, deterministic);
      return std::make_shared<JournalingBackend>(std::move(inner),
                                                 std::move(journal));
    };
    roles.subject = build("subject");
    if (needs_generator) roles.generator = build("generator");
    if (needs_judge) roles.judge = build("judge");
    return roles;
  };

  std::vector<DetectorResult> results(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& task = tasks[i];
      json detector_config = config.detectors.value(task.method, json::object());
      try {
        RoleSet roles = make_role_backends(task);
        results[i] = run_pair(task, detector_config, roles, caps, subject_model,
                              seed, deterministic);
      } catch (const std::exception& e) {
        DetectorResult r;
        r.method = task.method;
        r.model = subject_model;
        r.dataset = task.dataset.name;
        r.split = task.dataset.split;
        r.failed = true;
        r.error = e.what();
        results[i] = r;
      }
    }
  };
  int workers = std::max(1, options.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunOutcome outcome;
  outcome.run_dir = run_dir;
  outcome.summary = json::array();
  for (size_t i = 0; i < tasks.size(); ++i) {
    const Task& task = tasks[i];
    const DetectorResult& r = results[i];
    std::filesystem::path dir = run_dir / task.method;
    std::filesystem::create_directories(dir);
    std::filesystem::path path =
        dir / (task.dataset.name + "-" + task.dataset.split + ".json");
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << result_to_json(r).dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
    outcome.any_failed = outcome.any_failed || r.failed;
    outcome.summary.push_back(
        json{{"method", r.method},
             {"dataset", r.dataset},
             {"split", r.split},
             {"status", r.failed ? "failed" : (r.skipped ? "skipped" : "ok")},
             {"detail", r.failed ? r.error : r.skip_reason},
             {"path", path.string()}});
  }
  outcome.results = std::move(results);
  return outcome;
}

std::vector<DetectorResult> load_results(const std::filesystem::path& run_dir) {
  if (!std::filesystem::is_directory(run_dir)) {
    throw Error(ErrorCode::Io, "not a run directory: " + run_dir.string());
  }
  std::vector<DetectorResult> results;
  for (const auto& method : kMethods) {
    auto dir = run_dir / method;
    if (!std::filesystem::is_directory(dir)) continue;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::ifstream in(file);
      results.push_back(result_from_json(json::parse(in)));
    }
  }
  if (results.empty()) {
    throw Error(ErrorCode::Argument,
                "no results found under " + run_dir.string());
  }
  return results;
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "markdown" || s == "md") return ReportFormat::Markdown;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw Error(ErrorCode::Argument, "unknown report format: " + s);
}

std::string format_cell(const DetectorResult& r) {
  if (r.skipped) return "-";
  if (r.failed) return "err";
  if (r.method == "wpq" || r.method == "local_order") {
    return two_dp(r.payload.value("accuracy", 0.0));
  }
  if (r.method == "token_overlap") {
    return std::to_string(r.payload.value("exact", 0)) + "/" +
           std::to_string(r.payload.value("near", 0)) + "/" +
           two_dp(r.payload.value("p_value", 1.0));
  }
  if (r.method == "min_k") {
    return two_dp(r.payload.value("mean", 0.0)) + "_{" +
           one_dp(r.payload.value("std", 0.0)) + "}";
  }
  if (r.method == "canonical_order") {
    return two_dp(r.payload.value("p_value", 1.0));
  }
  return "?";
}

namespace {

const std::array<std::string, 5> kMethodLabels = {
    "WPQ", "Local Order", "Token Overlap", "Min-K%", "Canonical Order"};

struct RowKey {
  std::string model, dataset, split;
  auto operator<=>(const RowKey&) const = default;
};

std::map<RowKey, std::array<std::string, 5>> build_rows(
    const std::vector<DetectorResult>& results) {
  std::map<RowKey, std::array<std::string, 5>> rows;
  for (const auto& r : results) {
    RowKey key{r.model, r.dataset, r.split};
    auto [it, inserted] = rows.try_emplace(key);
    if (inserted) it->second.fill("-");
    auto pos = std::find(kMethods.begin(), kMethods.end(), r.method);
    if (pos == kMethods.end()) continue;
    it->second[pos - kMethods.begin()] = format_cell(r);
  }
  return rows;
}

}  // namespace

std::string render_report(const std::vector<DetectorResult>& results,
                          ReportFormat format) {
  auto rows = build_rows(results);
  std::ostringstream out;
  switch (format) {
    case ReportFormat::Markdown: {
      out << "| Model | Dataset | Split |";
      for (const auto& label : kMethodLabels) out << " " << label << " |";
      out << "\n|---|---|---|";
      for (size_t i = 0; i < kMethodLabels.size(); ++i) out << "---|";
      out << "\n";
      for (const auto& [key, cells] : rows) {
        out << "| " << key.model << " | " << key.dataset << " | " << key.split
            << " |";
        for (const auto& cell : cells) out << " " << cell << " |";
        out << "\n";
      }
      break;
    }
    case ReportFormat::Csv: {
      out << "model,dataset,split";
      for (const auto& m : kMethods) out << "," << m;
      out << "\n";
      for (const auto& [key, cells] : rows) {
        out << key.model << "," << key.dataset << "," << key.split;
        for (const auto& cell : cells) out << "," << cell;
        out << "\n";
      }
      break;
    }
    case ReportFormat::Json: {
      json doc = json::array();
      for (const auto& [key, cells] : rows) {
        json row{{"model", key.model},
                 {"dataset", key.dataset},
                 {"split", key.split}};
        for (size_t i = 0; i < kMethods.size(); ++i) row[kMethods[i]] = cells[i];
        doc.push_back(std::move(row));
      }
      out << doc.dump(2) << "\n";
      break;
    }
  }
  return out.str();
}

std::string render_compare(const std::vector<DetectorResult>& before,
                           const std::vector<DetectorResult>& after,
                           ReportFormat format) {
  // join on (method, dataset, split); model may differ between the runs
  std::map<std::tuple<std::string, std::string, std::string>, std::string>
      before_cells, after_cells;
  for (const auto& r : before) {
    before_cells[{r.method, r.dataset, r.split}] = format_cell(r);
  }
  for (const auto& r : after) {
    after_cells[{r.method, r.dataset, r.split}] = format_cell(r);
  }
  std::map<std::pair<std::string, std::string>, std::array<std::string, 5>> rows;
  auto fill = [&](const auto& cells, bool is_before) {
    for (const auto& [key, cell] : cells) {
      const auto& [method, dataset, split] = key;
      auto [it, inserted] = rows.try_emplace({dataset, split});
      if (inserted) it->second.fill("- / -");
      auto pos = std::find(kMethods.begin(), kMethods.end(), method);
      if (pos == kMethods.end()) continue;
      std::string& slot = it->second[pos - kMethods.begin()];
      // cell layout "before / after"
      size_t sep = slot.find(" / ");
      if (is_before) {
        slot = cell + slot.substr(sep);
      } else {
        slot = slot.substr(0, sep + 3) + cell;
      }
    }
  };
  fill(before_cells, true);
  fill(after_cells, false);

  std::ostringstream out;
  if (format == ReportFormat::Json) {
    json doc = json::array();
    for (const auto& [key, cells] : rows) {
      json row{{"dataset", key.first}, {"split", key.second}};
      for (size_t i = 0; i < kMethods.size(); ++i) row[kMethods[i]] = cells[i];
      doc.push_back(std::move(row));
    }
    out << doc.dump(2) << "\n";
    return out.str();
  }
  if (format == ReportFormat::Csv) {
    out << "dataset,split";
    for (const auto& m : kMethods) out << "," << m;
    out << "\n";
    for (const auto& [key, cells] : rows) {
      out << key.first << "," << key.second;
      for (const auto& cell : cells) out << ",\"" << cell << "\"";
      out << "\n";
    }
    return out.str();
  }
  out << "| Dataset | Split |";
  for (const auto& label : kMethodLabels) out << " " << label << " (before / after) |";
  out << "\n|---|---|";
  for (size_t i = 0; i < kMethodLabels.size(); ++i) out << "---|";
  out << "\n";
  for (const auto& [key, cells] : rows) {
    out << "| " << key.first << " | " << key.second << " |";
    for (const auto& cell : cells) out << " " << cell << " |";
    out << "\n";
  }
  return out.str();
}

CorrelationMatrix correlate_methods(const std::vector<DetectorResult>& results,
                                    Orientation orientation) {
  // one value per method per (model, dataset, split) row
  std::map<RowKey, std::array<std::optional<double>, 5>> rows;
  for (const auto& r : results) {
    if (r.skipped || r.failed) continue;
    auto pos = std::find(kMethods.begin(), kMethods.end(), r.method);
    if (pos == kMethods.end()) continue;
    size_t m = pos - kMethods.begin();
    std::optional<double> value;
    if (r.method == "wpq" || r.method == "local_order") {
      value = r.payload.value("accuracy", 0.0);
    } else if (r.method == "token_overlap") {
      double p = r.payload.value("p_value", 1.0);
      value = orientation == Orientation::ContaminationIncreasing ? -p : p;
    } else if (r.method == "min_k") {
      // mean NLL magnitude: smaller = more probable = more contaminated
      double mean = r.payload.value("mean", 0.0);
      value = orientation == Orientation::ContaminationIncreasing ? -mean : mean;
    } else if (r.method == "canonical_order") {
      double p = r.payload.value("p_value", 1.0);
      value = orientation == Orientation::ContaminationIncreasing ? -p : p;
    }
    rows[RowKey{r.model, r.dataset, r.split}][m] = value;
  }

  CorrelationMatrix matrix;
  matrix.orientation = orientation;
  for (size_t a = 0; a < kMethods.size(); ++a) {
    for (size_t b = 0; b < kMethods.size(); ++b) {
      std::vector<double> va, vb;
      for (const auto& [key, vals] : rows) {
        if (vals[a] && vals[b]) {  // pairwise-drop missing entries
          va.push_back(*vals[a]);
          vb.push_back(*vals[b]);
        }
      }
      matrix.pairs_used[a][b] = static_cast<int>(va.size());
      if (a == b) {
        matrix.rho[a][b] = va.empty() ? std::optional<double>() : 1.0;
        continue;
      }
      if (va.size() < 2) continue;  // undefined, not zero
      try {
        matrix.rho[a][b] = spearman(va, vb);
      } catch (const Error&) {
        // constant vector: correlation undefined
      }
    }
  }
  return matrix;
}

std::string render_correlation(const CorrelationMatrix& matrix,
                               ReportFormat format) {
  auto cell = [&](size_t a, size_t b) -> std::string {
    if (!matrix.rho[a][b]) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *matrix.rho[a][b]);
    return buf;
  };
  std::ostringstream out;
  if (format == ReportFormat::Json) {
    json doc;
    doc["orientation"] = matrix.orientation == Orientation::ContaminationIncreasing
                             ? "contamination-increasing"
                             : "raw";
    json m = json::object();
    for (size_t a = 0; a < kMethods.size(); ++a) {
      json row = json::object();
      for (size_t b = 0; b < kMethods.size(); ++b) {
        row[kMethods[b]] = matrix.rho[a][b] ? json(*matrix.rho[a][b]) : json();
        row[kMethods[b] + "_n"] = matrix.pairs_used[a][b];
      }
      m[kMethods[a]] = std::move(row);
    }
    doc["spearman"] = std::move(m);
    out << doc.dump(2) << "\n";
    return out.str();
  }
  if (format == ReportFormat::Csv) {
    out << "method";
    for (const auto& m : kMethods) out << "," << m;
    out << "\n";
    for (size_t a = 0; a < kMethods.size(); ++a) {
      out << kMethods[a];
      for (size_t b = 0; b < kMethods.size(); ++b) out << "," << cell(a, b);
      out << "\n";
    }
    return out.str();
  }
  out << "| |";
  for (const auto& label : kMethodLabels) out << " " << label << " |";
  out << "\n|---|";
  for (size_t i = 0; i < kMethodLabels.size(); ++i) out << "---|";
  out << "\n";
  for (size_t a = 0; a < kMethods.size(); ++a) {
    out << "| " << kMethodLabels[a] << " |";
    for (size_t b = 0; b < kMethods.size(); ++b) out << " " << cell(a, b) << " |";
    out << "\n";
  }
  return out.str();
}

}  // namespace contamkit
