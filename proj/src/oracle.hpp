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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "backend.hpp"
#include "dataset.hpp"

namespace contamkit {

struct AugmentedInstance {
  DatasetInstance source;   // question kept verbatim
  std::string cot_answer;   // generated step-by-step solution
  std::string generator_model;
};

struct PackedRecord {
  std::vector<AugmentedInstance> instances;  // consecutive ascending indices
  std::string text;                          // rendered training text
};

struct OracleManifest {
  std::string dataset;
  std::string split;
  double proportion = 0.0;  // percentage in [0,100]
  int pack_size = 4;
  double learning_rate = 8e-6;
  int epochs = 3;
  uint64_t seed = 0;
  std::string generator_model;
  int included_instances = 0;
  int records = 0;
  int dropped_blocks = 0;  // blocks lost to augmentation failures
  std::string training_file;
};

// Replaces the answer with a generated chain-of-thought solution; the
// question is untouched. Empty generation after one retry is a failure.
std::optional<AugmentedInstance> augment_answer_cot(ModelBackend& generator,
                                                    const DatasetInstance& instance);

// Block indices (each a run of pack_size consecutive instances) selected to
// hit round(proportion/100 * |D|) instances under seed.
std::vector<size_t> select_contamination_blocks(size_t dataset_size,
                                                double proportion, int pack_size,
                                                uint64_t seed);

// Emits <out_dir>/train.jsonl (one {"text": ...} per packed record, atomic
// write) and <out_dir>/manifest.json; training execution is external.
OracleManifest build_contaminated_set(const Dataset& dataset, double proportion,
                                      int pack_size, ModelBackend& generator,
                                      uint64_t seed,
                                      const std::filesystem::path& out_dir);

}  // namespace contamkit
