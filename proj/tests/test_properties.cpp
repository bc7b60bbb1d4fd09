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

// Randomized invariant checks. Every case draws its inputs from a fixed-seed
// generator so a failure is reproducible without re-rolling.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "backend.hpp"
#include "choice.hpp"
#include "dataset.hpp"
#include "prob_detectors.hpp"
#include "prompt_detectors.hpp"
#include "rng.hpp"
#include "rouge.hpp"
#include "stats.hpp"

using namespace contamkit;
using nlohmann::json;

namespace {

std::vector<std::string> random_tokens(Rng& rng, size_t max_len) {
  static const std::vector<std::string> vocab = {
      "alpha", "beta", "gamma", "delta", "epsilon", "zeta",
      "river", "stone", "cloud", "meadow"};
  std::vector<std::string> out(rng.uniform(max_len + 1));
  for (auto& tok : out) tok = vocab[rng.uniform(vocab.size())];
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

Dataset numbered_dataset(int n) {
  Dataset d;
  d.meta = {"prop", "test", ""};
  for (int i = 0; i < n; ++i) {
    DatasetInstance inst;
    inst.id = "p" + std::to_string(i);
    inst.index = i;
    inst.question = "question number " + std::to_string(i);
    inst.answer = "answer number " + std::to_string(i);
    d.instances.push_back(inst);
  }
  return d;
}

}  // namespace

TEST_CASE("rouge-l is symmetric in LCS length and bounded") {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_tokens(rng, 12);
    auto b = random_tokens(rng, 12);
    RougeLScore ab = rouge_l_tokens(a, b);
    RougeLScore ba = rouge_l_tokens(b, a);
    CHECK(ab.lcs_length == ba.lcs_length);
    // swapping candidate and reference swaps precision and recall
    CHECK(ab.precision == doctest::Approx(ba.recall));
    CHECK(ab.recall == doctest::Approx(ba.precision));
    CHECK(ab.f1 == doctest::Approx(ba.f1));
    CHECK(ab.f1 >= 0.0);
    CHECK(ab.f1 <= 1.0);
    CHECK(ab.lcs_length <= std::min(a.size(), b.size()));
  }
}

TEST_CASE("rouge-l identity and subsequence dominance") {
  Rng rng(102);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_tokens(rng, 12);
    if (a.empty()) continue;
    CHECK(rouge_l_tokens(a, a).f1 == doctest::Approx(1.0));
    // deleting tokens can never raise the LCS against the original
    auto shorter = a;
    shorter.erase(shorter.begin() + static_cast<long>(rng.uniform(shorter.size())));
    CHECK(rouge_l_tokens(shorter, a).lcs_length <= rouge_l_tokens(a, a).lcs_length);
    CHECK(rouge_l_tokens(shorter, a).lcs_length == shorter.size());
  }
}

TEST_CASE("spearman is invariant under strictly increasing transforms") {
  Rng rng(103);
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 3 + rng.uniform(20);
    std::vector<double> x(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
    }
    double base = 0.0;
    try {
      base = spearman(x, y);
    } catch (const Error&) {
      continue;  // constant draw, undefined correlation
    }
    std::vector<double> x2(n), y2(n);
    for (size_t i = 0; i < n; ++i) {
      x2[i] = 3.0 * x[i] + 7.0;            // affine increasing
      y2[i] = std::exp(y[i]);              // nonlinear increasing
    }
    CHECK(spearman(x2, y2) == doctest::Approx(base).epsilon(1e-12));
    // negating one side flips the sign exactly
    for (auto& v : x2) v = -v;
    CHECK(spearman(x2, y2) == doctest::Approx(-base).epsilon(1e-12));
    CHECK(base >= -1.0);
    CHECK(base <= 1.0);
  }
}

TEST_CASE("average ranks always sum to n(n+1)/2") {
  Rng rng(104);
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 1 + rng.uniform(30);
    std::vector<double> v(n);
    for (auto& x : v) x = static_cast<double>(rng.uniform(5));  // force ties
    auto ranks = average_ranks(v);
    double sum = 0.0;
    for (double r : ranks) sum += r;
    CHECK(sum == doctest::Approx(n * (n + 1) / 2.0));
  }
}

TEST_CASE("summarize agrees with the direct two-pass formulas") {
  Rng rng(105);
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 1 + rng.uniform(40);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal(3.0, 2.0);
    SummaryStat s = summarize(v);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n);
    CHECK(s.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(s.std == doctest::Approx(std::sqrt(var)).epsilon(1e-10));
    CHECK(s.n == n);
  }
}

TEST_CASE("bootstrap p-value is calibrated under the null") {
  // paired samples with identical distributions: rejecting at alpha = 0.05
  // should happen about 5% of the time.
  Rng rng(106);
  const int trials = 1000;
  int rejections = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> a(20), b(20);
    for (size_t i = 0; i < a.size(); ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
    }
    PValue p = bootstrap_pvalue(a, b, 200, derive_seed(9000, t));
    if (p.value <= 0.05) ++rejections;
  }
  double rate = rejections / static_cast<double>(trials);
  CHECK(rate > 0.02);
  CHECK(rate < 0.08);
}

TEST_CASE("bootstrap p-value falls as the paired difference grows") {
  Rng rng(107);
  std::vector<double> base(25), shifted_small(25), shifted_large(25);
  for (size_t i = 0; i < base.size(); ++i) {
    base[i] = rng.normal();
    shifted_small[i] = base[i] + 0.3;
    shifted_large[i] = base[i] + 2.0;
  }
  double p_small = bootstrap_pvalue(shifted_small, base, 2000, 1).value;
  double p_large = bootstrap_pvalue(shifted_large, base, 2000, 1).value;
  CHECK(p_large <= p_small);
  CHECK(p_large == doctest::Approx(1.0 / 2001.0));  // constant positive diff
}

TEST_CASE("t-test p-value responds monotonically to a mean shift") {
  Rng rng(108);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> d(8);
    for (auto& x : d) x = rng.normal(0.0, 1.0);
    std::vector<double> d_up = d;
    for (auto& x : d_up) x += 1.0;
    double p0, p1;
    try {
      p0 = shard_t_test(d).value;
      p1 = shard_t_test(d_up).value;
    } catch (const Error&) {
      continue;
    }
    CHECK(p1 <= p0);
    CHECK(p0 > 0.0);
    CHECK(p0 < 1.0);
  }
}

TEST_CASE("min-k selection count stays within bounds") {
  Rng rng(109);
  for (int trial = 0; trial < 200; ++trial) {
    double k = 0.5 + rng.uniform_real() * 99.5;
    size_t n = 1 + rng.uniform(500);
    size_t count = min_k_selection_count(k, n);
    CHECK(count >= 1);
    CHECK(count <= n);
    size_t floor_count = static_cast<size_t>(std::floor(k / 100.0 * n));
    CHECK(count == std::max<size_t>(1, floor_count));
  }
}

TEST_CASE("min-k score is pure and non-increasing in k") {
  MockBackend backend(MockScript::from_json(
      json{{"seed", 21}, {"scoring", json{{"mode", "hash"}}}}));
  Rng rng(110);
  for (int trial = 0; trial < 30; ++trial) {
    std::string text = join(random_tokens(rng, 30));
    if (text.empty()) continue;
    // same text scored twice gives the same value (no hidden state)
    double once = min_k_score(backend, text, 20.0);
    CHECK(min_k_score(backend, text, 20.0) == once);
    double prev = 1e300;
    for (double k : {5.0, 20.0, 50.0, 80.0, 100.0}) {
      double score = min_k_score(backend, text, k);
      CHECK(score <= prev);  // adding higher-probability tokens lowers the mean
      CHECK(score >= 0.0);
      prev = score;
    }
  }
}

TEST_CASE("sharding partitions contiguously with near-equal sizes") {
  Rng rng(111);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform(200));
    int shards = 1 + static_cast<int>(rng.uniform(std::min(n, 20)));
    Dataset d = numbered_dataset(n);
    auto parts = shard(d.instances, shards);
    CHECK(parts.size() == static_cast<size_t>(shards));
    size_t total = 0, min_size = SIZE_MAX, max_size = 0;
    int expect = 0;
    for (const auto& part : parts) {
      min_size = std::min(min_size, part.size());
      max_size = std::max(max_size, part.size());
      total += part.size();
      for (const auto& inst : part) CHECK(inst.index == expect++);
    }
    CHECK(total == static_cast<size_t>(n));
    CHECK(max_size - min_size <= 1);
  }
}

TEST_CASE("sampling preserves order and is a prefix-free subset") {
  Dataset d = numbered_dataset(97);
  Rng rng(112);
  for (int trial = 0; trial < 50; ++trial) {
    size_t n = 1 + rng.uniform(97);
    uint64_t seed = rng.next();
    auto picked = sample_instances(d, n, seed);
    CHECK(picked.size() == n);
    for (size_t i = 1; i < picked.size(); ++i) {
      CHECK(picked[i].index > picked[i - 1].index);  // ascending, no repeats
    }
    // deterministic in the seed
    auto again = sample_instances(d, n, seed);
    for (size_t i = 0; i < n; ++i) CHECK(again[i].id == picked[i].id);
  }
}

TEST_CASE("random split points reconstruct the collapsed text") {
  Rng text_rng(113);
  for (int trial = 0; trial < 100; ++trial) {
    auto tokens = random_tokens(text_rng, 40);
    if (tokens.size() < 2) continue;
    std::string text = join(tokens);
    Rng rng(text_rng.next());
    auto [prefix, suffix] = split_at_random_point(text, rng, 0.4, 0.6);
    CHECK(prefix + " " + suffix == text);
    CHECK_FALSE(prefix.empty());
    CHECK_FALSE(suffix.empty());
  }
}

TEST_CASE("order quiz places the correct successor uniformly") {
  Dataset d = numbered_dataset(200);
  Rng rng(114);
  const int draws = 4000;
  std::vector<int> position_counts(4, 0);
  for (int t = 0; t < draws; ++t) {
    LocalOrderQuizItem item = sample_order_quiz(d, rng, 4, false);
    REQUIRE(item.correct_position >= 0);
    REQUIRE(item.correct_position < 4);
    CHECK(item.options[item.correct_position].index == item.target.index + 1);
    std::set<int> seen;
    for (const auto& opt : item.options) {
      CHECK(opt.index != item.target.index);
      seen.insert(opt.index);
    }
    CHECK(seen.size() == item.options.size());  // distractors are distinct
    ++position_counts[item.correct_position];
  }
  // chi-square against uniform over 4 cells; 16.27 is the 0.1% critical
  // value at 3 degrees of freedom
  double expected = draws / 4.0;
  double chi2 = 0.0;
  for (int c : position_counts) {
    chi2 += (c - expected) * (c - expected) / expected;
  }
  CHECK(chi2 < 16.27);
}

TEST_CASE("parsed letters always belong to the allowed set") {
  Rng rng(115);
  const std::set<char> allowed{'A', 'B', 'C', 'D', 'E'};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text = join(random_tokens(rng, 10));
    char letter = static_cast<char>('A' + rng.uniform(8));  // may be invalid
    text += "\nThe correct answer is (" + std::string(1, letter) + ").";
    ParsedChoice parsed = parse_choice(text, allowed);
    if (parsed.letter.has_value()) {
      CHECK(allowed.count(*parsed.letter) == 1);
    }
    if (allowed.count(letter)) {
      REQUIRE(parsed.letter.has_value());
      CHECK(*parsed.letter == letter);
    }
  }
}

TEST_CASE("perturbation anchor checks accept padding and reject edits") {
  Rng rng(116);
  for (int trial = 0; trial < 100; ++trial) {
    std::string original = "In " + std::to_string(1900 + rng.uniform(100)) +
                           " the Meridian station logged " +
                           std::to_string(rng.uniform(500)) + " readings.";
    CHECK(perturbation_preserves_anchors(original, original));
    // appending lowercase filler keeps every anchor intact
    CHECK(perturbation_preserves_anchors(original, original + " again and again"));
    // changing a digit sequence breaks the invariant
    std::string edited = original;
    edited[3] = edited[3] == '9' ? '8' : '9';
    CHECK_FALSE(perturbation_preserves_anchors(original, edited));
    // renaming the capitalized token breaks it too
    std::string renamed = original;
    renamed.replace(renamed.find("Meridian"), 8, "Meridiem");
    CHECK_FALSE(perturbation_preserves_anchors(original, renamed));
  }
}

TEST_CASE("seed derivation separates streams and rng respects bounds") {
  std::set<uint64_t> seen;
  for (uint64_t master = 0; master < 20; ++master) {
    for (uint64_t tag = 0; tag < 20; ++tag) {
      seen.insert(derive_seed(master, tag));
    }
  }
  CHECK(seen.size() == 400);  // no collisions across this grid
  CHECK(derive_seed(1, "alpha") != derive_seed(1, "beta"));
  CHECK(derive_seed(1, "alpha") == derive_seed(1, "alpha"));

  Rng rng(117);
  for (int trial = 0; trial < 500; ++trial) {
    uint64_t bound = 1 + rng.uniform(1000);
    CHECK(rng.uniform(bound) < bound);
  }
  for (int trial = 0; trial < 50; ++trial) {
    size_t n = 1 + rng.uniform(50);
    size_t k = rng.uniform(n + 1);
    auto picked = rng.sample_indices(n, k);
    CHECK(picked.size() == k);
    for (size_t i = 1; i < picked.size(); ++i) CHECK(picked[i] > picked[i - 1]);
    for (size_t idx : picked) CHECK(idx < n);
  }
}
