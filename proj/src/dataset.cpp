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

#include "dataset.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "error.hpp"
#include "text.hpp"

namespace contamkit {

using nlohmann::json;

RenderMode render_mode_from_string(const std::string& s) {
  if (s == "qa-concat") return RenderMode::QaConcat;
  if (s == "question-only") return RenderMode::QuestionOnly;
  if (s == "question-no-choices") return RenderMode::QuestionNoChoices;
  throw Error(ErrorCode::Argument, "unknown render mode: " + s);
}

std::string render_mode_name(RenderMode mode) {
  switch (mode) {
    case RenderMode::QaConcat: return "qa-concat";
    case RenderMode::QuestionOnly: return "question-only";
    case RenderMode::QuestionNoChoices: return "question-no-choices";
  }
  return "?";
}

Dataset load_dataset(const std::filesystem::path& path, DatasetMeta meta) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open dataset file: " + path.string());
  }
  Dataset dataset;
  dataset.meta = std::move(meta);
  std::unordered_set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Parse, "malformed dataset line " +
                                        std::to_string(line_no) + ": " + e.what());
    }
    DatasetInstance inst;
    inst.index = static_cast<int>(dataset.instances.size());
    try {
      inst.id = obj.at("id").get<std::string>();
      inst.question = obj.at("question").get<std::string>();
      inst.answer = obj.at("answer").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Parse, "dataset line " + std::to_string(line_no) +
                                        " missing required field: " + e.what());
    }
    if (inst.question.empty() || inst.answer.empty()) {
      throw Error(ErrorCode::Parse, "dataset line " + std::to_string(line_no) +
                                        ": question and answer must be non-empty");
    }
    if (obj.contains("choices") && !obj["choices"].is_null()) {
      inst.choices = obj["choices"].get<std::vector<std::string>>();
    }
    if (obj.contains("category") && obj["category"].is_string()) {
      inst.category = obj["category"].get<std::string>();
    }
    inst.split = obj.value("split", dataset.meta.split.empty()
                                        ? std::string("unsplit")
                                        : dataset.meta.split);
    if (!seen_ids.insert(inst.id).second) {
      throw Error(ErrorCode::Integrity,
                  "duplicate instance id '" + inst.id + "' at line " +
                      std::to_string(line_no));
    }
    dataset.instances.push_back(std::move(inst));
  }
  if (dataset.instances.empty()) {
    throw Error(ErrorCode::Argument,
                "empty dataset: " + path.string() + " (detectors need n >= 1)");
  }
  return dataset;
}

Dataset load_from_registry(const std::filesystem::path& root,
                           const std::string& name, const std::string& split) {
  DatasetMeta meta{name, split, ""};
  auto meta_path = root / name / "meta.json";
  if (std::filesystem::exists(meta_path)) {
    std::ifstream in(meta_path);
    json obj = json::parse(in, nullptr, true, true);
    meta.name = obj.value("name", name);
    meta.description = obj.value("description", "");
  }
  return load_dataset(root / name / (split + ".jsonl"), meta);
}

std::string render_instance(const DatasetInstance& instance, RenderMode mode) {
  switch (mode) {
    case RenderMode::QaConcat:
      return instance.question + "\n" + instance.answer;
    case RenderMode::QuestionOnly:
      return instance.question;
    case RenderMode::QuestionNoChoices: {
      if (instance.choices.empty()) {
        throw Error(ErrorCode::Argument,
                    "question-no-choices requires choices on instance " +
                        instance.id);
      }
      // Drop any line of the question that is one of the choice strings
      // (with or without a leading option tag).
      std::string out;
      size_t start = 0;
      while (start <= instance.question.size()) {
        size_t end = instance.question.find('\n', start);
        std::string line = instance.question.substr(
            start, end == std::string::npos ? std::string::npos : end - start);
        bool is_choice = false;
        std::string collapsed = collapse_whitespace(line);
        for (const auto& choice : instance.choices) {
          std::string c = collapse_whitespace(choice);
          if (collapsed == c ||
              (collapsed.size() > c.size() &&
               collapsed.compare(collapsed.size() - c.size(), c.size(), c) == 0 &&
               collapsed.size() - c.size() <= 4)) {
            is_choice = true;
            break;
          }
        }
        if (!is_choice && !collapsed.empty()) {
          if (!out.empty()) out += "\n";
          out += line;
        }
        if (end == std::string::npos) break;
        start = end + 1;
      }
      return out;
    }
  }
  throw Error(ErrorCode::Internal, "unreachable render mode");
}

std::vector<DatasetInstance> sample_instances(const Dataset& dataset, size_t n,
                                              uint64_t seed) {
  if (n >= dataset.size()) return dataset.instances;
  Rng rng(derive_seed(seed, "sample-instances"));
  std::vector<size_t> idx = rng.sample_indices(dataset.size(), n);
  std::vector<DatasetInstance> out;
  out.reserve(n);
  for (size_t i : idx) out.push_back(dataset.instances[i]);
  return out;
}

std::vector<std::vector<DatasetInstance>> shard(
    const std::vector<DatasetInstance>& instances, int num_shards) {
  if (num_shards < 1) {
    throw Error(ErrorCode::Argument, "shard: num_shards must be positive");
  }
  if (static_cast<size_t>(num_shards) > instances.size()) {
    throw Error(ErrorCode::Argument,
                "shard: num_shards exceeds dataset size");
  }
  std::vector<std::vector<DatasetInstance>> shards(num_shards);
  size_t base = instances.size() / num_shards;
  size_t extra = instances.size() % num_shards;
  size_t pos = 0;
  for (int s = 0; s < num_shards; ++s) {
    size_t len = base + (static_cast<size_t>(s) < extra ? 1 : 0);
    shards[s].assign(instances.begin() + pos, instances.begin() + pos + len);
    pos += len;
  }
  return shards;
}

std::pair<std::string, std::string> split_at_random_point(const std::string& text,
                                                          Rng& rng, double lo,
                                                          double hi) {
  if (!(lo > 0.0 && hi < 1.0 && lo <= hi)) {
    throw Error(ErrorCode::Argument, "split bounds must satisfy 0 < lo <= hi < 1");
  }
  std::vector<std::string> words = whitespace_tokens(text);
  if (words.size() < 2) {
    throw Error(ErrorCode::DegenerateInput,
                "unsplittable text: need at least 2 words");
  }
  const size_t w = words.size();
  std::vector<size_t> eligible;  // prefix word counts
  for (size_t i = 1; i < w; ++i) {
    double frac = static_cast<double>(i) / static_cast<double>(w);
    if (frac >= lo && frac <= hi) eligible.push_back(i);
  }
  size_t cut;
  if (!eligible.empty()) {
    cut = eligible[rng.uniform(eligible.size())];
  } else {
    double mid = (lo + hi) / 2.0;
    cut = 1;
    double best = 1e9;
    for (size_t i = 1; i < w; ++i) {
      double d = std::abs(static_cast<double>(i) / static_cast<double>(w) - mid);
      if (d < best) {
        best = d;
        cut = i;
      }
    }
  }
  std::string prefix, suffix;
  for (size_t i = 0; i < w; ++i) {
    std::string& dst = i < cut ? prefix : suffix;
    if (!dst.empty()) dst += ' ';
    dst += words[i];
  }
  return {prefix, suffix};
}

LocalOrderQuizItem make_order_quiz(const Dataset& dataset, int target_index,
                                   Rng& rng, int n_options, bool same_category) {
  if (n_options < 2) {
    throw Error(ErrorCode::Argument, "order quiz needs n_options >= 2");
  }
  if (target_index < 0 ||
      static_cast<size_t>(target_index) + 1 >= dataset.size()) {
    throw Error(ErrorCode::Argument,
                "order quiz target must have a successor in the dataset");
  }
  const DatasetInstance& target = dataset.instances[target_index];
  const DatasetInstance& successor = dataset.instances[target_index + 1];

  std::vector<const DatasetInstance*> pool;
  for (const auto& inst : dataset.instances) {
    if (inst.index == target.index || inst.index == successor.index) continue;
    if (same_category && inst.category != target.category) continue;
    pool.push_back(&inst);
  }
  const size_t need = static_cast<size_t>(n_options) - 1;
  if (pool.size() < need) {
    throw Error(ErrorCode::Sampling,
                "not enough eligible distractors for target " + target.id +
                    (same_category ? " in category '" + target.category + "'"
                                   : ""));
  }
  LocalOrderQuizItem item;
  item.target = target;
  std::vector<size_t> picks = rng.sample_indices(pool.size(), need);
  // shuffle distractor order so ascending pool order is not preserved
  rng.shuffle(picks);
  item.correct_position = static_cast<int>(rng.uniform(n_options));
  item.options.reserve(n_options);
  size_t d = 0;
  for (int p = 0; p < n_options; ++p) {
    if (p == item.correct_position) {
      item.options.push_back(successor);
    } else {
      item.options.push_back(*pool[picks[d++]]);
    }
  }
  return item;
}

LocalOrderQuizItem sample_order_quiz(const Dataset& dataset, Rng& rng,
                                     int n_options, bool same_category) {
  if (dataset.size() < static_cast<size_t>(n_options) + 1) {
    throw Error(ErrorCode::Argument,
                "dataset too small for order quiz sampling");
  }
  int target = static_cast<int>(rng.uniform(dataset.size() - 1));
  return make_order_quiz(dataset, target, rng, n_options, same_category);
}

}  // namespace contamkit
