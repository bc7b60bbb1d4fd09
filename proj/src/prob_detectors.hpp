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
#include <string>
#include <utility>
#include <vector>

#include "backend.hpp"
#include "dataset.hpp"
#include "stats.hpp"

namespace contamkit {

struct MinKConfig {
  double k_percent = 20.0;  // in (0,100]
  int sample_size = 100;
  RenderMode render = RenderMode::QaConcat;
};

struct MinKResult {
  std::vector<std::pair<std::string, double>> per_instance;  // (id, score)
  SummaryStat summary;
};

struct CanonicalOrderConfig {
  int sample_size = 100;
  int num_shards = 10;
  int num_permutations = 25;
  std::string separator = "\n";
  RenderMode render = RenderMode::QaConcat;
};

struct ShardStat {
  double canonical_ll = 0.0;
  std::vector<double> permutation_ll;
};

struct CanonicalOrderResult {
  std::vector<ShardStat> per_shard;
  std::vector<double> shard_diffs;  // canonical minus mean permutation LL
  PValue p_value;
  int skipped_shards = 0;
};

// Mean NLL of the k% lowest-probability tokens: larger means less probable
// under the model. Scores are reported as positive magnitudes.
double min_k_score(ModelBackend& backend, const std::string& text,
                   double k_percent);

// Selection count for a given token count: max(1, floor(k/100 * count)).
size_t min_k_selection_count(double k_percent, size_t token_count);

MinKResult min_k_split_report(ModelBackend& backend, const Dataset& dataset,
                              const MinKConfig& config, uint64_t seed);

// Shards the sampled instances in original order; per shard compares the
// canonical concatenation's log-likelihood against seeded random reorderings
// and aggregates the per-shard differences with a one-sided t-test.
CanonicalOrderResult canonical_order_pvalue(ModelBackend& backend,
                                            const Dataset& dataset,
                                            const CanonicalOrderConfig& config,
                                            uint64_t seed);

}  // namespace contamkit
