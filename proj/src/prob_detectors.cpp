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

#include "prob_detectors.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace contamkit {

size_t min_k_selection_count(double k_percent, size_t token_count) {
  size_t e = static_cast<size_t>(
      std::floor(k_percent / 100.0 * static_cast<double>(token_count)));
  return std::max<size_t>(1, e);
}

double min_k_score(ModelBackend& backend, const std::string& text,
                   double k_percent) {
  if (!(k_percent > 0.0 && k_percent <= 100.0)) {
    throw Error(ErrorCode::Argument, "k_percent must be in (0, 100]");
  }
  std::vector<TokenLogProb> tokens = backend.score_tokens(text);
  std::vector<double> nll;
  nll.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (t.logprob) nll.push_back(-*t.logprob);  // first token may lack context
  }
  if (nll.empty()) {
    throw Error(ErrorCode::DegenerateInput, "no scorable tokens in text");
  }
  size_t e = min_k_selection_count(k_percent, nll.size());
  e = std::min(e, nll.size());
  // e largest NLLs = the e lowest-probability tokens
  std::partial_sort(nll.begin(), nll.begin() + e, nll.end(),
                    std::greater<double>());
  double sum = 0.0;
  for (size_t i = 0; i < e; ++i) sum += nll[i];
  return sum / static_cast<double>(e);
}

MinKResult min_k_split_report(ModelBackend& backend, const Dataset& dataset,
                              const MinKConfig& config, uint64_t seed) {
  if (dataset.size() < 1) throw Error(ErrorCode::Argument, "empty dataset");
  size_t n = std::min<size_t>(config.sample_size, dataset.size());
  std::vector<DatasetInstance> sample = sample_instances(dataset, n, seed);

  MinKResult result;
  std::vector<double> scores;
  scores.reserve(sample.size());
  for (const auto& inst : sample) {
    double score;
    try {
      score = min_k_score(backend, render_instance(inst, config.render),
                          config.k_percent);
    } catch (const Error& e) {
      // partial results are not reported
      throw Error(e.code(), "scoring failed on instance '" + inst.id +
                                "': " + e.what());
    }
    result.per_instance.emplace_back(inst.id, score);
    scores.push_back(score);
  }
  result.summary = summarize(scores);
  return result;
}

namespace {

std::string join_rendered(const std::vector<const DatasetInstance*>& order,
                          RenderMode mode, const std::string& separator) {
  std::string out;
  for (const auto* inst : order) {
    if (!out.empty()) out += separator;
    out += render_instance(*inst, mode);
  }
  return out;
}

}  // namespace

CanonicalOrderResult canonical_order_pvalue(ModelBackend& backend,
                                            const Dataset& dataset,
                                            const CanonicalOrderConfig& config,
                                            uint64_t seed) {
  if (config.num_shards < 2) {
    throw Error(ErrorCode::Argument, "need at least 2 shards");
  }
  if (config.num_permutations < 1) {
    throw Error(ErrorCode::Argument, "need at least 1 permutation");
  }
  if (dataset.size() < static_cast<size_t>(config.num_shards)) {
    throw Error(ErrorCode::Argument, "dataset smaller than shard count");
  }
  size_t n = std::min<size_t>(config.sample_size, dataset.size());
  std::vector<DatasetInstance> sample = sample_instances(dataset, n, seed);
  auto shards = shard(sample, config.num_shards);

  CanonicalOrderResult result;
  result.per_shard.resize(shards.size());
  for (size_t j = 0; j < shards.size(); ++j) {
    const auto& members = shards[j];
    if (members.size() < 2) {
      ++result.skipped_shards;  // d_j undefined for singleton shards
      continue;
    }
    std::vector<const DatasetInstance*> order;
    order.reserve(members.size());
    for (const auto& inst : members) order.push_back(&inst);

    ShardStat& stat = result.per_shard[j];
    stat.canonical_ll = total_logprob(backend.score_tokens(
        join_rendered(order, config.render, config.separator)));

    double perm_sum = 0.0;
    for (int i = 0; i < config.num_permutations; ++i) {
      // pure function of (master seed, shard, draw); safe to parallelize
      Rng rng(derive_seed(derive_seed(seed, "canonical-perm"), j,
                          static_cast<uint64_t>(i)));
      std::vector<const DatasetInstance*> shuffled = order;
      do {
        rng.shuffle(shuffled);
      } while (shuffled == order);  // never silently the canonical order
      double ll = total_logprob(backend.score_tokens(
          join_rendered(shuffled, config.render, config.separator)));
      stat.permutation_ll.push_back(ll);
      perm_sum += ll;
    }
    result.shard_diffs.push_back(
        stat.canonical_ll - perm_sum / static_cast<double>(config.num_permutations));
  }
  if (result.shard_diffs.size() < 2) {
    throw Error(ErrorCode::DegenerateInput,
                "fewer than 2 usable shards after skipping singletons");
  }
  result.p_value = shard_t_test(result.shard_diffs);
  return result;
}

}  // namespace contamkit
