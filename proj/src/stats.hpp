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
#include <span>
#include <string>
#include <vector>

namespace contamkit {

struct SummaryStat {
  double mean = 0.0;
  double std = 0.0;  // population (n-denominator)
  size_t n = 0;
};

struct PValue {
  double value = 1.0;  // in [0,1]
  std::string test_name;
  bool two_sided = false;
  int64_t resamples_or_df = 0;
};

// Spearman rank correlation: Pearson correlation of average ranks, ties
// sharing the mean rank. Throws on length mismatch, size < 2, or a constant
// vector (undefined correlation).
double spearman(std::span<const double> x, std::span<const double> y);

// One-sided paired bootstrap of mean(a-b) > 0 with the add-one correction:
// p = (1 + #{resampled mean differences <= 0}) / (resamples + 1).
// Deterministic under seed; the resample for draw i depends only on (seed, i).
PValue bootstrap_pvalue(std::span<const double> a, std::span<const double> b,
                        int resamples, uint64_t seed);

// One-sided one-sample t-test of mean(d) > 0, df = |d|-1. Zero sample
// variance is degenerate; the error message reports the sign of the common
// value.
PValue shard_t_test(std::span<const double> d);

// Exact mean and population standard deviation.
SummaryStat summarize(std::span<const double> values);

// Average ranks (1-based, ties get the mean rank).
std::vector<double> average_ranks(std::span<const double> v);

}  // namespace contamkit
