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
#include <optional>
#include <string>
#include <vector>

#include "backend.hpp"
#include "dataset.hpp"
#include "rouge.hpp"
#include "stats.hpp"

namespace contamkit {

// ---- token completion overlap ----

struct OverlapTrial {
  std::string instance_id;
  std::string prefix;
  std::string reference_suffix;
  std::string guided_prompt;
  std::string general_prompt;
  std::string guided_completion;
  std::string general_completion;
  RougeLScore guided_rouge;
  RougeLScore general_rouge;
  bool exact = false;  // normalized string equality
  bool near = false;   // judge verdict on the guided completion
  bool judge_failed = false;
};

struct OverlapReport {
  int exact_count = 0;
  int near_count = 0;
  int judge_failures = 0;
  PValue p_value;
  bool contaminated = false;  // exact >= 1 or near >= 2
  std::vector<OverlapTrial> trials;
};

struct OverlapConfig {
  int n = 10;
  int resamples = 10000;
  double split_lo = 0.4;
  double split_hi = 0.6;
  RenderMode render = RenderMode::QaConcat;
};

bool overlap_contaminated(int exact_count, int near_count);

OverlapReport run_token_overlap(ModelBackend& subject, ModelBackend& judge,
                                const Dataset& dataset,
                                const OverlapConfig& config, uint64_t seed);

// ---- word perturbation quiz ----

struct PerturbationQuizItem {
  std::string instance_id;
  std::string original;
  std::vector<std::string> perturbed;     // exactly 3
  std::array<std::string, 4> lettered;    // contents of options A-D
  int original_position = 0;              // index of the original among A-D
  // option E is fixed to "None of the provided options"
};

inline constexpr const char* kNoneOption = "None of the provided options";

// Asks the generator for four word-level perturbations, keeps the first
// three that survive validation (distinctness plus digit and proper-noun
// preservation), and places the original uniformly among A-D. One
// regeneration attempt before giving up.
std::optional<PerturbationQuizItem> perturb_instance(
    ModelBackend& generator, const std::string& original,
    const std::string& instance_id, Rng& rng,
    const GenerationParams& params = {.temperature = 0.9, .top_p = 0.9});

// Parsing and validation pieces, exposed for testing.
std::vector<std::string> parse_option_blocks(const std::string& text);
bool perturbation_preserves_anchors(const std::string& original,
                                    const std::string& option);

struct QuizItemRecord {
  std::string id;
  std::string prompt;
  char expected = '?';
  std::string chosen;  // empty when unparseable
  bool correct = false;
};

struct QuizAccuracy {
  int n_items = 0;
  int n_correct = 0;
  int n_skipped = 0;
  double accuracy = 0.0;  // n_correct / n_items
  std::vector<QuizItemRecord> records;
};

QuizAccuracy run_wpq(ModelBackend& subject,
                     const std::vector<PerturbationQuizItem>& items,
                     const DatasetMeta& meta, uint64_t seed);

// ---- local order quiz ----

struct LocalOrderConfig {
  int n = 100;
  int n_options = 4;
  bool same_category = false;
  RenderMode render = RenderMode::QaConcat;
};

QuizAccuracy run_local_order_quiz(ModelBackend& subject, const Dataset& dataset,
                                  const LocalOrderConfig& config, uint64_t seed);

}  // namespace contamkit
