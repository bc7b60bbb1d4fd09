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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace contamkit {

inline const std::array<std::string, 5> kMethods = {
    "wpq", "local_order", "token_overlap", "min_k", "canonical_order"};

struct DatasetRef {
  std::string name;
  std::string split;
  std::filesystem::path path;
  std::string description;
};

struct RunConfig {
  uint64_t seed = 0;
  std::filesystem::path out_dir = "runs";
  nlohmann::json backends;   // roles: subject, generator, judge
  std::vector<DatasetRef> datasets;
  nlohmann::json detectors;  // per-method parameter objects
  nlohmann::json raw;        // full config document, hashed into the run id
};

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_json(const nlohmann::json& doc,
                               const std::filesystem::path& base_dir);

struct DetectorResult {
  std::string method;
  std::string model;
  std::string dataset;
  std::string split;
  nlohmann::json payload;       // headline metrics, shape depends on method
  nlohmann::json per_instance;  // records sufficient to recompute the headline
  uint64_t seed = 0;
  std::string version;
  std::string timestamp;  // empty for fully deterministic (mock) runs
  bool skipped = false;   // capability skip, rendered "-"
  std::string skip_reason;
  bool failed = false;
  std::string error;
};

struct RunOptions {
  int workers = 1;
  std::vector<std::string> methods;  // empty = all configured
  std::optional<uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  bool replay = false;  // serve model calls from the journals in replay_source
  std::filesystem::path replay_source;
};

struct RunOutcome {
  std::filesystem::path run_dir;
  std::vector<DetectorResult> results;
  bool any_failed = false;
  nlohmann::json summary;
};

// Executes every (detector, dataset) pair, persisting one result file per
// pair under <out>/<run-id>/<method>/<dataset>-<split>.json plus journals.
// Capability skips are not failures; dataset errors abort their pair only.
RunOutcome execute_run(const RunConfig& config, const RunOptions& options);

std::vector<DetectorResult> load_results(const std::filesystem::path& run_dir);

enum class ReportFormat { Markdown, Csv, Json };
ReportFormat report_format_from_string(const std::string& s);

// Compact table cells: accuracies "0.68", overlap "0/1/0.21", min-k
// "8.83_{2.5}", canonical-order p "0.69", unavailable "-".
std::string format_cell(const DetectorResult& result);

std::string render_report(const std::vector<DetectorResult>& results,
                          ReportFormat format);

// Side-by-side join of two runs on (method, dataset, split).
std::string render_compare(const std::vector<DetectorResult>& before,
                           const std::vector<DetectorResult>& after,
                           ReportFormat format);

enum class Orientation { Raw, ContaminationIncreasing };

struct CorrelationMatrix {
  std::array<std::array<std::optional<double>, 5>, 5> rho;  // nullopt = undefined
  std::array<std::array<int, 5>, 5> pairs_used{};
  Orientation orientation = Orientation::ContaminationIncreasing;
};

CorrelationMatrix correlate_methods(const std::vector<DetectorResult>& results,
                                    Orientation orientation);

std::string render_correlation(const CorrelationMatrix& matrix,
                               ReportFormat format);

}  // namespace contamkit
