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

// End-to-end acceptance gate. Each criterion prints exactly one PASS/FAIL
// line; the exit status is the number of failures. Expects the repository
// root as argv[1] so it can reach configs/ and the golden report.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "backend.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "oracle.hpp"
#include "prob_detectors.hpp"
#include "prompt_detectors.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "rouge.hpp"
#include "stats.hpp"

using namespace contamkit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path g_repo_root;

struct Check {
  std::string name;
  std::function<void()> body;
};

// Throws with a readable message when a condition fails.
void expect(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

void expect_close(double a, double b, double tol, const std::string& what) {
  if (!(std::fabs(a - b) <= tol)) {
    throw std::runtime_error(what + ": " + std::to_string(a) + " vs " +
                             std::to_string(b));
  }
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<std::string> random_tokens(Rng& rng, size_t min_len,
                                       size_t max_len) {
  // five-token alphabet keeps long common subsequences frequent
  static const std::vector<std::string> vocab = {"ash", "bay", "cove", "dune",
                                                 "elm"};
  std::vector<std::string> out(min_len + rng.uniform(max_len - min_len + 1));
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

// Reference LCS by plain recursion with memoization, written against the
// textbook recurrence rather than the row-rolling loop in the library.
size_t lcs_recursive(const std::vector<std::string>& a,
                     const std::vector<std::string>& b, size_t i, size_t j,
                     std::map<std::pair<size_t, size_t>, size_t>& memo) {
  if (i == a.size() || j == b.size()) return 0;
  auto key = std::make_pair(i, j);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  size_t result;
  if (a[i] == b[j]) {
    result = 1 + lcs_recursive(a, b, i + 1, j + 1, memo);
  } else {
    result = std::max(lcs_recursive(a, b, i + 1, j, memo),
                      lcs_recursive(a, b, i, j + 1, memo));
  }
  memo[key] = result;
  return result;
}

// Reference ranks by counting: rank = 1 + #{smaller} + (#{equal} - 1) / 2.
std::vector<double> counting_ranks(const std::vector<double>& v) {
  std::vector<double> ranks(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    size_t smaller = 0, equal = 0;
    for (double x : v) {
      if (x < v[i]) ++smaller;
      if (x == v[i]) ++equal;
    }
    ranks[i] = 1.0 + smaller + (equal - 1) / 2.0;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

Dataset numbered_dataset(int n, const std::string& name) {
  Dataset d;
  d.meta = {name, "test", "an ordered fixture of short numbered entries"};
  for (int i = 0; i < n; ++i) {
    DatasetInstance inst;
    inst.id = "a" + std::to_string(i);
    inst.index = i;
    char buf[8];
    std::snprintf(buf, sizeof buf, "%04d", i);
    inst.question = std::string("entry ") + name + " " + buf +
                    " describes the footpath that climbs from the village " +
                    "square toward marker " + buf + " on the eastern slope.";
    inst.answer = std::string("the logbook closes entry ") + buf +
                  " with a note about clear weather and an easy descent.";
    d.instances.push_back(inst);
  }
  return d;
}

std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    files[fs::relative(entry.path(), root).generic_string()] = buf.str();
  }
  return files;
}

fs::path scratch(const std::string& leaf) {
  fs::path p = fs::temp_directory_path() / ("ck_acceptance_" + leaf);
  fs::remove_all(p);
  return p;
}

// ---- criteria ----

void check_rouge_against_reference() {
  auto start = std::chrono::steady_clock::now();
  Rng rng(501);
  for (int trial = 0; trial < 1000; ++trial) {
    auto a = random_tokens(rng, 0, 12);
    auto b = random_tokens(rng, 0, 12);
    std::map<std::pair<size_t, size_t>, size_t> memo;
    size_t lcs = lcs_recursive(a, b, 0, 0, memo);
    RougeLScore got = rouge_l_tokens(a, b);
    expect(got.lcs_length == lcs, "LCS length mismatch");
    double precision = a.empty() ? 0.0 : double(lcs) / a.size();
    double recall = b.empty() ? 0.0 : double(lcs) / b.size();
    double f1 = (precision + recall) == 0.0
                    ? 0.0
                    : 2.0 * precision * recall / (precision + recall);
    expect_close(got.precision, precision, 1e-12, "precision");
    expect_close(got.recall, recall, 1e-12, "recall");
    expect_close(got.f1, f1, 1e-12, "f1");
  }
  expect(elapsed_seconds(start) < 5.0, "ROUGE reference check exceeded 5s");
}

void check_spearman_against_reference() {
  Rng rng(502);
  for (int trial = 0; trial < 1000; ++trial) {
    size_t n = 3 + rng.uniform(48);  // lengths up to 50
    std::vector<double> x(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      // about one draw in five lands on a small integer, forcing ties
      x[i] = rng.uniform(5) ? rng.normal() : double(rng.uniform(4));
      y[i] = rng.uniform(5) ? rng.normal() : double(rng.uniform(4));
    }
    double expected;
    try {
      expected = pearson(counting_ranks(x), counting_ranks(y));
    } catch (...) {
      continue;
    }
    if (!std::isfinite(expected)) continue;  // constant vector, undefined
    expect_close(spearman(x, y), expected, 1e-12, "spearman");
  }
}

void check_min_k_exactness() {
  json table;
  const char* ten = "w1 w2 w3 w4 w5 w6 w7 w8 w9 w10";
  table[ten] = json::array(
      {-1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0, -8.0, -9.0, -10.0});
  MockBackend scripted(MockScript::from_json(
      json{{"scoring", json{{"mode", "scripted-logprobs"}, {"table", table}}}}));
  expect_close(min_k_score(scripted, ten, 20.0), 9.5, 1e-12,
               "k=20 over graded tokens");
  expect_close(min_k_score(scripted, ten, 100.0), 5.5, 1e-12,
               "k=100 over graded tokens");
  expect_close(min_k_score(scripted, ten, 10.0), 10.0, 1e-12,
               "k=10 over graded tokens");

  // random scripted sequences: verify against a sort-and-average oracle and
  // check monotonicity across the k grid
  Rng rng(503);
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 4 + rng.uniform(37);
    std::vector<std::string> words(n);
    std::vector<double> logprobs(n);
    json row = json::array();
    for (size_t i = 0; i < n; ++i) {
      words[i] = "t" + std::to_string(trial) + "x" + std::to_string(i);
      logprobs[i] = -0.1 - 9.9 * rng.uniform_real();
      row.push_back(logprobs[i]);
    }
    std::string text = join(words);
    json one;
    one[text] = row;
    MockBackend backend(MockScript::from_json(json{
        {"scoring", json{{"mode", "scripted-logprobs"}, {"table", one}}}}));
    std::vector<double> sorted = logprobs;
    std::sort(sorted.begin(), sorted.end());  // most surprising first
    double prev = 1e300;
    for (int k = 10; k <= 100; k += 10) {
      size_t count = std::max<size_t>(1, size_t(std::floor(k / 100.0 * n)));
      double mean = 0.0;
      for (size_t i = 0; i < count; ++i) mean -= sorted[i];
      mean /= double(count);
      double score = min_k_score(backend, text, double(k));
      expect_close(score, mean, 1e-12, "scripted sequence score");
      expect(score <= prev + 1e-12, "score rose as k grew");
      prev = score;
    }
  }
}

void check_canonical_order_statistics() {
  auto start = std::chrono::steady_clock::now();

  // Calibration: an order-blind subject over 500 fresh synthetic datasets
  // should be flagged at alpha = 0.05 about 5% of the time.
  CanonicalOrderConfig calib;
  calib.sample_size = 100;
  calib.num_shards = 10;
  calib.num_permutations = 25;
  int rejections = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    Dataset fresh = numbered_dataset(100, "calib" + std::to_string(t));
    MockBackend subject(MockScript::from_json(
        json{{"seed", 7000 + t},
             {"scoring", json{{"mode", "hash"}, {"noise", 1.0}}}}));
    CanonicalOrderResult r =
        canonical_order_pvalue(subject, fresh, calib, derive_seed(88, t));
    if (r.p_value.value <= 0.05) ++rejections;
  }
  double rate = rejections / double(trials);
  expect(rate > 0.02 && rate < 0.08,
         "null rejection rate out of range: " + std::to_string(rate));

  // Power: a subject that prefers the canonical ordering by about one nat
  // per shard should be flagged nearly always.
  Dataset big = numbered_dataset(100, "power");
  json order_table = json::array();
  for (const auto& inst : big.instances) {
    order_table.push_back(render_instance(inst, RenderMode::QaConcat));
  }
  CanonicalOrderConfig strong;
  strong.sample_size = 100;
  strong.num_shards = 10;
  strong.num_permutations = 25;
  int flagged = 0;
  for (int t = 0; t < 100; ++t) {
    MockBackend subject(MockScript::from_json(
        json{{"seed", 9000 + t},
             {"scoring", json{{"mode", "hash"},
                              {"noise", 0.05},
                              {"ordered_bonus", 1.0},
                              {"order_table", order_table}}}}));
    CanonicalOrderResult r =
        canonical_order_pvalue(subject, big, strong, derive_seed(99, t));
    if (r.p_value.value <= 0.01) ++flagged;
  }
  expect(flagged >= 99, "power too low: " + std::to_string(flagged) + "/100");
  expect(elapsed_seconds(start) < 120.0, "order statistics exceeded 2min");
}

void check_token_overlap_behavior() {
  Dataset d = numbered_dataset(25, "overlapset");
  OverlapConfig config;
  config.n = 10;
  config.resamples = 1000;

  json refs = json::array();
  for (const auto& inst : d.instances) {
    refs.push_back(render_instance(inst, RenderMode::QaConcat));
  }
  MockBackend memorizing(MockScript::from_json(json{
      {"completion", json{{"mode", "echo-suffix"},
                          {"guard", "dataset"},
                          {"fallback", "nothing in particular comes to mind"},
                          {"references", refs}}}}));
  MockBackend judge(MockScript::from_json(json{
      {"completion", json{{"mode", "canned-completions"}, {"default", "No"}}}}));
  OverlapReport hot = run_token_overlap(memorizing, judge, d, config, 31);
  expect(hot.exact_count == 10, "memorizing subject should match all suffixes");
  expect(hot.contaminated, "memorizing subject not flagged");
  expect_close(hot.p_value.value, 1.0 / 1001.0, 1e-15, "bootstrap floor");

  MockBackend naive(MockScript::from_json(json{
      {"completion",
       json{{"mode", "fixed-text"},
            {"text", "lorem ipsum dolor sit amet consectetur adipiscing"}}}}));
  OverlapReport cold = run_token_overlap(naive, judge, d, config, 31);
  expect(cold.exact_count == 0 && cold.near_count == 0,
         "unrelated completions produced matches");
  expect(!cold.contaminated, "clean subject flagged");
  expect(cold.p_value.value >= 0.5, "no-signal p-value too small");

  // decision boundary: one exact OR two near matches
  expect(overlap_contaminated(1, 0), "1 exact must flag");
  expect(overlap_contaminated(0, 2), "2 near must flag");
  expect(!overlap_contaminated(0, 1), "1 near must not flag");
  expect(!overlap_contaminated(0, 0), "0/0 must not flag");
}

void check_quiz_baselines() {
  // Local-order quiz: a subject guessing uniformly over four options sits
  // near 25%.
  Dataset d = numbered_dataset(1001, "orderset");
  LocalOrderConfig config;
  config.n = 1000;
  MockBackend guesser(MockScript::from_json(
      json{{"seed", 404},
           {"completion",
            json{{"mode", "seeded-uniform-choice"}, {"letters", "ABCD"}}}}));
  QuizAccuracy order = run_local_order_quiz(guesser, d, config, 71);
  expect(order.n_items == 1000, "local-order item count");
  expect(order.accuracy > 0.21 && order.accuracy < 0.29,
         "local-order baseline off: " + std::to_string(order.accuracy));

  // Perturbation quiz: five answer options, so a uniform guesser sits near
  // 20%.
  MockBackend generator(MockScript::from_json(
      json{{"completion", json{{"mode", "perturb-options"}}}}));
  static const std::vector<std::string> places = {
      "harbor", "orchard", "granary", "chapel", "mill", "quarry",
      "ferry",  "smithy",  "market",  "bridge"};
  std::vector<PerturbationQuizItem> items;
  for (int i = 0; i < 1000; ++i) {
    std::string original =
        "the " + places[i % 10] + " ledger for week " + std::to_string(i) +
        " records a quiet morning with steady trade and a late delivery cart";
    Rng rng(derive_seed(606, i));
    auto item = perturb_instance(generator, original, "w" + std::to_string(i),
                                 rng);
    expect(item.has_value(), "perturbation failed on a cooperative generator");
    items.push_back(*item);
  }
  DatasetMeta meta{"wpqset", "test", ""};
  MockBackend five_way(MockScript::from_json(
      json{{"seed", 505},
           {"completion",
            json{{"mode", "seeded-uniform-choice"}, {"letters", "ABCDE"}}}}));
  QuizAccuracy wpq = run_wpq(five_way, items, meta, 13);
  expect(wpq.n_items == 1000, "perturbation quiz item count");
  expect(wpq.accuracy > 0.16 && wpq.accuracy < 0.24,
         "perturbation baseline off: " + std::to_string(wpq.accuracy));

  // A subject that always picks the right letter scores exactly 1.0: probe
  // the prompts once, then answer from a lookup table.
  std::vector<PerturbationQuizItem> subset(items.begin(), items.begin() + 100);
  QuizAccuracy probe = run_wpq(five_way, subset, meta, 29);
  json answers = json::object();
  for (const auto& r : probe.records) {
    answers[r.prompt] =
        std::string("The correct answer is (") + r.expected + ").";
  }
  MockBackend perfect(MockScript::from_json(json{
      {"completion",
       json{{"mode", "canned-completions"}, {"table", answers}}}}));
  QuizAccuracy best = run_wpq(perfect, subset, meta, 29);
  expect_close(best.accuracy, 1.0, 0.0, "perfect subject accuracy");
}

void check_oracle_builder() {
  Dataset d = numbered_dataset(100, "oracleset");
  MockBackend solver(MockScript::from_json(json{
      {"model", "acceptance-solver"},
      {"completion",
       json{{"mode", "fixed-text"},
            {"text", "First restate the entry, then confirm the closing "
                     "note. The answer follows from the logbook."}}}}));
  const std::vector<std::pair<double, int>> cases = {
      {0.0, 0}, {25.0, 24}, {50.0, 52}, {100.0, 100}};
  for (const auto& [proportion, expected] : cases) {
    fs::path out = scratch("oracle");
    OracleManifest m = build_contaminated_set(d, proportion, 4, solver, 17, out);
    expect(m.included_instances == expected,
           "proportion " + std::to_string(proportion) + " produced " +
               std::to_string(m.included_instances) + " instances");
    expect(m.records * 4 == m.included_instances, "pack size violated");

    std::ifstream in(out / "train.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      json obj = json::parse(line);
      auto indices = obj.at("source_indices").get<std::vector<int>>();
      expect(indices.size() == 4, "record does not hold one whole block");
      for (size_t i = 1; i < indices.size(); ++i) {
        expect(indices[i] == indices[i - 1] + 1, "block not consecutive");
      }
      std::string text = obj.at("text");
      for (int idx : indices) {
        expect(text.find(d.instances[idx].question) != std::string::npos,
               "question not byte-identical in packed record");
      }
    }
  }
}

void check_end_to_end_determinism() {
  auto start = std::chrono::steady_clock::now();
  RunConfig config = load_run_config(g_repo_root / "configs" / "demo.json");

  auto run_once = [&](const std::string& leaf, int workers) {
    RunOptions options;
    options.out_dir = scratch(leaf);
    options.workers = workers;
    return execute_run(config, options);
  };
  RunOutcome first = run_once("det_a", 1);
  RunOutcome second = run_once("det_b", 1);
  RunOutcome parallel = run_once("det_c", 8);
  expect(!first.any_failed, "demo run reported failures");

  auto base = snapshot_tree(first.run_dir);
  expect(base == snapshot_tree(second.run_dir),
         "repeated runs differ on disk");
  expect(base == snapshot_tree(parallel.run_dir),
         "worker count changed the persisted store");

  std::ifstream golden_in(g_repo_root / "tests" / "data" / "golden_report.md");
  expect(golden_in.good(), "missing golden report");
  std::stringstream golden;
  golden << golden_in.rdbuf();
  std::string rendered =
      render_report(load_results(first.run_dir), ReportFormat::Markdown);
  expect(rendered == golden.str(), "report drifted from the golden copy");
  expect(elapsed_seconds(start) < 60.0, "determinism check exceeded 1min");
}

void check_report_fidelity() {
  DetectorResult mk;
  mk.method = "min_k";
  mk.payload = json{{"mean", 8.8321}, {"std", 2.51}};
  expect(format_cell(mk) == "8.83_{2.5}", "probability-magnitude cell");

  DetectorResult ov;
  ov.method = "token_overlap";
  ov.payload = json{{"exact", 0}, {"near", 1}, {"p_value", 0.2091}};
  expect(format_cell(ov) == "0/1/0.21", "overlap cell");

  DetectorResult skipped;
  skipped.method = "wpq";
  skipped.skipped = true;
  expect(format_cell(skipped) == "-", "capability-skip cell");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <repository-root>\n", argv[0]);
    return 64;
  }
  g_repo_root = argv[1];

  const std::vector<Check> checks = {
      {"rouge-l matches a reference LCS on 1000 random pairs",
       check_rouge_against_reference},
      {"spearman matches a counting-rank reference on 1000 random pairs",
       check_spearman_against_reference},
      {"min-k score is exact on graded tokens and monotone in k",
       check_min_k_exactness},
      {"canonical-order test is calibrated under the null and powerful "
       "against an order-aware subject",
       check_canonical_order_statistics},
      {"token overlap flags a memorizing subject and clears a naive one",
       check_token_overlap_behavior},
      {"quiz accuracies sit at chance for guessers and at 1.0 for an oracle",
       check_quiz_baselines},
      {"oracle builder hits exact proportions with intact consecutive blocks",
       check_oracle_builder},
      {"full pipeline is byte-identical across repeats and worker counts",
       check_end_to_end_determinism},
      {"report cells render in the documented formats", check_report_fidelity},
  };

  int failures = 0;
  for (const auto& check : checks) {
    try {
      check.body();
      std::printf("PASS - %s\n", check.name.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("FAIL - %s (%s)\n", check.name.c_str(), e.what());
    }
    std::fflush(stdout);
  }
  return failures;
}
