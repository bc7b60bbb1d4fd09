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

#include "prompt_detectors.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "choice.hpp"
#include "error.hpp"
#include "prompts.hpp"
#include "text.hpp"

namespace contamkit {

bool overlap_contaminated(int exact_count, int near_count) {
  return exact_count >= 1 || near_count >= 2;
}

namespace {

std::optional<bool> judge_near_match(ModelBackend& judge,
                                     const std::string& reference,
                                     const std::string& candidate) {
  std::string prompt = prompts::render(prompts::overlap_judge(),
                                       {{"{reference_text}", reference},
                                        {"{candidate_text}", candidate}});
  GenerationParams params;
  params.max_tokens = 8;
  for (int attempt = 0; attempt < 2; ++attempt) {  // one re-ask on failure
    auto verdict = parse_yes_no(judge.complete(prompt, params).text);
    if (verdict) return verdict;
  }
  return std::nullopt;
}

}  // namespace

OverlapReport run_token_overlap(ModelBackend& subject, ModelBackend& judge,
                                const Dataset& dataset,
                                const OverlapConfig& config, uint64_t seed) {
  if (!subject.capabilities().supports_completion ||
      !judge.capabilities().supports_completion) {
    throw Error(ErrorCode::Capability,
                "token overlap needs completion-capable subject and judge");
  }
  if (dataset.size() < static_cast<size_t>(config.n)) {
    throw Error(ErrorCode::Argument, "dataset smaller than overlap sample size");
  }
  std::vector<DatasetInstance> sample =
      sample_instances(dataset, config.n, derive_seed(seed, "overlap-sample"));

  OverlapReport report;
  std::vector<double> guided_f1, general_f1;
  for (const auto& inst : sample) {
    OverlapTrial trial;
    trial.instance_id = inst.id;
    Rng rng(derive_seed(derive_seed(seed, "overlap-split"),
                        static_cast<uint64_t>(inst.index)));
    auto [prefix, suffix] =
        split_at_random_point(render_instance(inst, config.render), rng,
                              config.split_lo, config.split_hi);
    trial.prefix = prefix;
    trial.reference_suffix = suffix;
    trial.guided_prompt = prompts::render(prompts::guided_completion(),
                                          {{"{dataset}", dataset.meta.name},
                                           {"{split}", dataset.meta.split},
                                           {"{prefix}", prefix}});
    trial.general_prompt =
        prompts::render(prompts::general_completion(), {{"{prefix}", prefix}});

    GenerationParams params;  // temperature 0 for inference
    trial.guided_completion = subject.complete(trial.guided_prompt, params).text;
    trial.general_completion = subject.complete(trial.general_prompt, params).text;
    trial.guided_rouge = rouge_l(trial.guided_completion, suffix);
    trial.general_rouge = rouge_l(trial.general_completion, suffix);
    trial.exact =
        normalize_text(trial.guided_completion) == normalize_text(suffix);

    auto verdict =
        judge_near_match(judge, suffix, trial.guided_completion);
    if (verdict) {
      trial.near = *verdict;
    } else {
      trial.judge_failed = true;  // excluded from near_count, kept in vectors
    }

    report.exact_count += trial.exact ? 1 : 0;
    report.near_count += trial.near ? 1 : 0;
    report.judge_failures += trial.judge_failed ? 1 : 0;
    guided_f1.push_back(trial.guided_rouge.f1);
    general_f1.push_back(trial.general_rouge.f1);
    report.trials.push_back(std::move(trial));
  }
  report.p_value = bootstrap_pvalue(guided_f1, general_f1, config.resamples,
                                    derive_seed(seed, "overlap-bootstrap"));
  report.contaminated =
      overlap_contaminated(report.exact_count, report.near_count);
  return report;
}

// ---- word perturbation quiz ----

std::vector<std::string> parse_option_blocks(const std::string& text) {
  static const std::regex kOption(R"(Option\s+(\d+)\s*-\s*)");
  std::vector<std::string> options;
  auto begin = std::sregex_iterator(text.begin(), text.end(), kOption);
  auto end = std::sregex_iterator();
  std::vector<std::pair<size_t, size_t>> spans;  // (content start, match start)
  for (auto it = begin; it != end; ++it) {
    spans.emplace_back(it->position(0) + it->length(0), it->position(0));
  }
  for (size_t i = 0; i < spans.size(); ++i) {
    size_t from = spans[i].first;
    size_t to = i + 1 < spans.size() ? spans[i + 1].second : text.size();
    std::string block = text.substr(from, to - from);
    // trim
    size_t b = block.find_first_not_of(" \t\r\n");
    size_t e = block.find_last_not_of(" \t\r\n");
    options.push_back(b == std::string::npos ? "" : block.substr(b, e - b + 1));
  }
  return options;
}

bool perturbation_preserves_anchors(const std::string& original,
                                    const std::string& option) {
  return digit_sequences(original) == digit_sequences(option) &&
         capitalized_tokens(original) == capitalized_tokens(option);
}

std::optional<PerturbationQuizItem> perturb_instance(
    ModelBackend& generator, const std::string& original,
    const std::string& instance_id, Rng& rng, const GenerationParams& params) {
  std::string prompt =
      prompts::render(prompts::perturbation(), {{"{instance}", original}});
  std::string original_key = collapse_whitespace(original);

  std::vector<std::string> distractors;
  for (int attempt = 0; attempt < 2 && distractors.size() < 3; ++attempt) {
    distractors.clear();
    std::set<std::string> seen;
    for (const std::string& option :
         parse_option_blocks(generator.complete(prompt, params).text)) {
      if (distractors.size() == 3) break;
      if (option.empty()) continue;
      std::string key = collapse_whitespace(option);
      if (key == original_key) continue;  // must not repeat the input text
      if (!seen.insert(key).second) continue;
      if (!perturbation_preserves_anchors(original, option)) continue;
      distractors.push_back(option);
    }
  }
  if (distractors.size() < 3) return std::nullopt;  // perturbation failure

  PerturbationQuizItem item;
  item.instance_id = instance_id;
  item.original = original;
  item.perturbed = distractors;
  item.original_position = static_cast<int>(rng.uniform(4));
  size_t d = 0;
  for (int pos = 0; pos < 4; ++pos) {
    item.lettered[pos] =
        pos == item.original_position ? original : distractors[d++];
  }
  return item;
}

QuizAccuracy run_wpq(ModelBackend& subject,
                     const std::vector<PerturbationQuizItem>& items,
                     const DatasetMeta& meta, uint64_t seed) {
  (void)seed;  // option order is fixed at item construction
  if (!subject.capabilities().supports_completion) {
    throw Error(ErrorCode::Capability, "quiz subject must support completion");
  }
  QuizAccuracy result;
  const std::set<char> allowed{'A', 'B', 'C', 'D', 'E'};
  for (const auto& item : items) {
    std::string prompt = prompts::render(
        prompts::standard_quiz(),
        {{"[split]", meta.split},
         {"[dataset]", meta.name},
         {"{choices[\"(A)\"]}", item.lettered[0]},
         {"{choices[\"(B)\"]}", item.lettered[1]},
         {"{choices[\"(C)\"]}", item.lettered[2]},
         {"{choices[\"(D)\"]}", item.lettered[3]},
         {"{choices[\"(E)\"]}", kNoneOption}});
    GenerationParams params;  // temperature 0
    ParsedChoice choice = parse_choice(subject.complete(prompt, params).text, allowed);

    QuizItemRecord record;
    record.id = item.instance_id;
    record.prompt = std::move(prompt);
    record.expected = static_cast<char>('A' + item.original_position);
    if (choice.letter) record.chosen = std::string(1, *choice.letter);
    record.correct = choice.letter && *choice.letter == record.expected;
    result.n_correct += record.correct ? 1 : 0;
    ++result.n_items;
    result.records.push_back(std::move(record));
  }
  result.accuracy = result.n_items > 0
                        ? static_cast<double>(result.n_correct) / result.n_items
                        : 0.0;
  return result;
}

// ---- local order quiz ----

QuizAccuracy run_local_order_quiz(ModelBackend& subject, const Dataset& dataset,
                                  const LocalOrderConfig& config, uint64_t seed) {
  if (!subject.capabilities().supports_completion) {
    throw Error(ErrorCode::Capability, "quiz subject must support completion");
  }
  if (dataset.size() < static_cast<size_t>(config.n_options) + 1) {
    throw Error(ErrorCode::Argument, "dataset too small for the order quiz");
  }
  const size_t eligible = dataset.size() - 1;  // last instance has no successor
  const size_t n_used = std::min<size_t>(config.n, eligible);

  Rng target_rng(derive_seed(seed, "local-order-targets"));
  std::vector<size_t> targets = target_rng.sample_indices(eligible, n_used);

  QuizAccuracy result;
  result.n_skipped = static_cast<int>(config.n - n_used);
  std::set<char> allowed;
  for (int i = 0; i < config.n_options; ++i) {
    allowed.insert(static_cast<char>('A' + i));
  }
  for (size_t target : targets) {
    Rng rng(derive_seed(derive_seed(seed, "local-order-item"),
                        static_cast<uint64_t>(target)));
    LocalOrderQuizItem item;
    try {
      item = make_order_quiz(dataset, static_cast<int>(target), rng,
                             config.n_options, config.same_category);
    } catch (const Error&) {
      ++result.n_skipped;  // e.g. category too small for distractors
      continue;
    }
    std::string options;
    for (size_t i = 0; i < item.options.size(); ++i) {
      options += "\n(" + std::string(1, static_cast<char>('A' + i)) + ") " +
                 render_instance(item.options[i], config.render);
    }
    std::string prompt = prompts::render(
        prompts::local_order_quiz(),
        {{"[Description of dataset]", dataset.meta.description},
         {"[split]", dataset.meta.split},
         {"[dataset name]", dataset.meta.name},
         {"[tar example]", render_instance(item.target, config.render)},
         {"[options]", options}});
    GenerationParams params;  // temperature 0
    ParsedChoice choice = parse_choice(subject.complete(prompt, params).text, allowed);

    QuizItemRecord record;
    record.id = item.target.id;
    record.prompt = std::move(prompt);
    record.expected = static_cast<char>('A' + item.correct_position);
    if (choice.letter) record.chosen = std::string(1, *choice.letter);
    record.correct = choice.letter && *choice.letter == record.expected;
    result.n_correct += record.correct ? 1 : 0;
    ++result.n_items;
    result.records.push_back(std::move(record));
  }
  result.accuracy = result.n_items > 0
                        ? static_cast<double>(result.n_correct) / result.n_items
                        : 0.0;
  return result;
}

}  // namespace contamkit
