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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace contamkit {

struct DatasetInstance {
  std::string id;
  int index = 0;  // 0-based ordinal in original dataset order
  std::string question;
  std::string answer;
  std::vector<std::string> choices;  // optional
  std::string category;              // optional, free-form
  std::string split;                 // train/test/validation/unsplit
};

struct DatasetMeta {
  std::string name;
  std::string split;
  std::string description;  // verbatim text from the dataset's public page
};

struct Dataset {
  DatasetMeta meta;
  std::vector<DatasetInstance> instances;

  size_t size() const { return instances.size(); }
};

struct LocalOrderQuizItem {
  DatasetInstance target;
  std::vector<DatasetInstance> options;
  int correct_position = 0;  // options[correct_position].index == target.index + 1
};

enum class RenderMode { QaConcat, QuestionOnly, QuestionNoChoices };

RenderMode render_mode_from_string(const std::string& s);
std::string render_mode_name(RenderMode mode);

// JSONL, one object per line with keys id, question, answer,
// choices (optional array), category (optional), split (optional).
Dataset load_dataset(const std::filesystem::path& path, DatasetMeta meta);

// Directory convention <root>/<dataset>/<split>.jsonl + <root>/<dataset>/meta.json.
Dataset load_from_registry(const std::filesystem::path& root,
                           const std::string& name, const std::string& split);

std::string render_instance(const DatasetInstance& instance, RenderMode mode);

// Seeded subset of n instances keeping original relative order (indices
// ascending). n >= dataset size returns every instance.
std::vector<DatasetInstance> sample_instances(const Dataset& dataset, size_t n,
                                              uint64_t seed);

// Contiguous partition into num_shards pieces with sizes differing by at
// most one; within-shard original order is preserved.
std::vector<std::vector<DatasetInstance>> shard(
    const std::vector<DatasetInstance>& instances, int num_shards);

// Splits at a word boundary whose word-count fraction is uniform within
// [lo, hi] under rng; prefix + ' ' + suffix reconstructs the
// whitespace-collapsed text. When no boundary lies inside the interval the
// boundary closest to its midpoint is used.
std::pair<std::string, std::string> split_at_random_point(const std::string& text,
                                                          Rng& rng, double lo,
                                                          double hi);

// Quiz item for a specific target: the true successor plus n_options-1
// distractors drawn uniformly without replacement, correct position uniform.
LocalOrderQuizItem make_order_quiz(const Dataset& dataset, int target_index,
                                   Rng& rng, int n_options, bool same_category);

// Same with a uniformly drawn eligible target.
LocalOrderQuizItem sample_order_quiz(const Dataset& dataset, Rng& rng,
                                     int n_options, bool same_category);

}  // namespace contamkit
