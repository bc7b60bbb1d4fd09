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

#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace contamkit {

SummaryStat summarize(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::Argument, "summarize: empty input");
  SummaryStat s;
  s.n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(s.n);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(s.n));
  return s;
}

std::vector<double> average_ranks(std::span<const double> v) {
  const size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

double pearson(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::DegenerateInput,
                "spearman: constant vector has undefined correlation");
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::Argument, "spearman: length mismatch");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::Argument, "spearman: need at least 2 points");
  }
  std::vector<double> rx = average_ranks(x);
  std::vector<double> ry = average_ranks(y);
  return pearson(rx, ry);
}

PValue bootstrap_pvalue(std::span<const double> a, std::span<const double> b,
                        int resamples, uint64_t seed) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::Argument, "bootstrap_pvalue: size mismatch");
  }
  if (a.size() < 2) {
    throw Error(ErrorCode::Argument, "bootstrap_pvalue: need paired n >= 2");
  }
  if (resamples < 1) {
    throw Error(ErrorCode::Argument, "bootstrap_pvalue: resamples must be >= 1");
  }
  const size_t n = a.size();
  std::vector<double> diff(n);
  for (size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];

  int64_t nonpositive = 0;
  for (int r = 0; r < resamples; ++r) {
    // per-resample substream; resample order never matters
    Rng rng(derive_seed(seed, static_cast<uint64_t>(r)));
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) sum += diff[rng.uniform(n)];
    if (sum / static_cast<double>(n) <= 0.0) ++nonpositive;
  }
  PValue p;
  p.value = static_cast<double>(1 + nonpositive) / static_cast<double>(resamples + 1);
  p.test_name = "paired-bootstrap";
  p.two_sided = false;
  p.resamples_or_df = resamples;
  return p;
}

PValue shard_t_test(std::span<const double> d) {
  if (d.size() < 2) {
    throw Error(ErrorCode::Argument, "shard_t_test: need at least 2 shards");
  }
  const size_t n = d.size();
  double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  double sample_var = ss / static_cast<double>(n - 1);
  if (sample_var == 0.0) {
    std::string sign = mean > 0 ? "positive" : (mean < 0 ? "negative" : "zero");
    throw Error(ErrorCode::DegenerateInput,
                "shard_t_test: zero variance (common value is " + sign + ")");
  }
  double t = mean / std::sqrt(sample_var / static_cast<double>(n));
  boost::math::students_t dist(static_cast<double>(n - 1));
  PValue p;
  p.value = boost::math::cdf(boost::math::complement(dist, t));
  p.test_name = "one-sample-t";
  p.two_sided = false;
  p.resamples_or_df = static_cast<int64_t>(n - 1);
  return p;
}

}  // namespace contamkit
