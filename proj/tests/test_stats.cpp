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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "error.hpp"
#include "stats.hpp"

using namespace contamkit;

TEST_CASE("summarize uses the population standard deviation") {
  std::vector<double> v{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  auto s = summarize(v);
  CHECK(s.mean == doctest::Approx(5.0));
  CHECK(s.std == doctest::Approx(2.0));  // textbook population-sd example
  CHECK(s.n == 8);

  std::vector<double> single{3.5};
  auto one = summarize(single);
  CHECK(one.mean == doctest::Approx(3.5));
  CHECK(one.std == doctest::Approx(0.0));

  CHECK_THROWS_AS(summarize({}), Error);
}

TEST_CASE("average_ranks shares the mean rank across ties") {
  std::vector<double> v{10.0, 20.0, 20.0, 30.0};
  auto r = average_ranks(v);
  CHECK(r == std::vector<double>{1.0, 2.5, 2.5, 4.0});

  std::vector<double> all_same{5.0, 5.0, 5.0};
  CHECK(average_ranks(all_same) == std::vector<double>{2.0, 2.0, 2.0});

  std::vector<double> desc{3.0, 2.0, 1.0};
  CHECK(average_ranks(desc) == std::vector<double>{3.0, 2.0, 1.0});
}

TEST_CASE("spearman matches reference values") {
  // Frozen against an independent rank-correlation computation.
  std::vector<double> x{3, 1, 4, 1, 5, 9, 2};
  std::vector<double> y{2, 7, 1, 8, 2, 8, 1};
  CHECK(spearman(x, y) == doctest::Approx(-0.08334762598987158).epsilon(1e-12));

  std::vector<double> x2{1, 2, 3, 4};
  std::vector<double> y2{10, 9, 1, 0.5};
  CHECK(spearman(x2, y2) == doctest::Approx(-1.0));

  std::vector<double> x3{1, 1, 2, 3, 3, 3};
  std::vector<double> y3{2, 1, 4, 4, 5, 6};
  CHECK(spearman(x3, y3) == doctest::Approx(0.8767140075192095).epsilon(1e-12));

  std::vector<double> inc{1, 2, 3};
  CHECK(spearman(inc, inc) == doctest::Approx(1.0));
}

TEST_CASE("spearman error conditions") {
  std::vector<double> a{1, 2, 3}, b{1, 2};
  CHECK_THROWS_AS(spearman(a, b), Error);
  std::vector<double> single{1.0};
  CHECK_THROWS_AS(spearman(single, single), Error);
  std::vector<double> constant{2, 2, 2}, varying{1, 2, 3};
  CHECK_THROWS_AS(spearman(constant, varying), Error);
}

TEST_CASE("shard_t_test matches a reference t-distribution value") {
  // d = {1,2,3,4}: t = 3.872983..., df = 3, one-sided p frozen from an
  // independent implementation of the t CDF.
  std::vector<double> d{1, 2, 3, 4};
  PValue p = shard_t_test(d);
  CHECK(p.value == doctest::Approx(0.015233145831085489).epsilon(1e-10));
  CHECK(p.resamples_or_df == 3);
  CHECK_FALSE(p.two_sided);

  std::vector<double> d2{0.5, -0.2, 0.9, 1.4, -0.1};
  CHECK(shard_t_test(d2).value ==
        doctest::Approx(0.08638096247092414).epsilon(1e-10));

  // negative-mean evidence gives p > 0.5
  std::vector<double> neg{-1, -2, -3, -1.5};
  CHECK(shard_t_test(neg).value > 0.9);
}

TEST_CASE("shard_t_test degenerate inputs") {
  std::vector<double> one{1.0};
  CHECK_THROWS_AS(shard_t_test(one), Error);
  std::vector<double> flat{2.0, 2.0, 2.0};
  CHECK_THROWS_WITH_AS(shard_t_test(flat),
                       doctest::Contains("zero variance"), Error);
}

TEST_CASE("bootstrap p-value floors at 1/(R+1) for all-positive differences") {
  // identical positive diffs: every resampled mean is positive
  std::vector<double> a{1, 1, 1, 1, 1};
  std::vector<double> b{0, 0, 0, 0, 0};
  PValue p = bootstrap_pvalue(a, b, 999, 7);
  CHECK(p.value == doctest::Approx(1.0 / 1000.0).epsilon(1e-15));
  CHECK(p.resamples_or_df == 999);

  // all-negative diffs: every resampled mean is <= 0
  PValue q = bootstrap_pvalue(b, a, 999, 7);
  CHECK(q.value == doctest::Approx(1.0));
}

TEST_CASE("bootstrap p-value is deterministic and seed-sensitive") {
  std::vector<double> a{0.3, -0.1, 0.6, 0.2, -0.4, 0.5, 0.1, 0.0};
  std::vector<double> b{0.1, 0.0, 0.2, 0.3, -0.2, 0.1, 0.0, 0.1};
  PValue p1 = bootstrap_pvalue(a, b, 2000, 11);
  PValue p2 = bootstrap_pvalue(a, b, 2000, 11);
  CHECK(p1.value == p2.value);
  PValue p3 = bootstrap_pvalue(a, b, 2000, 12);
  // a different seed may move p slightly but stays a valid probability
  CHECK(p3.value > 0.0);
  CHECK(p3.value <= 1.0);
}

TEST_CASE("bootstrap p-value argument checks") {
  std::vector<double> a{1, 2}, b{1};
  CHECK_THROWS_AS(bootstrap_pvalue(a, b, 100, 0), Error);
  std::vector<double> single{1}, single2{0};
  CHECK_THROWS_AS(bootstrap_pvalue(single, single2, 100, 0), Error);
  std::vector<double> ok{1, 2}, ok2{0, 1};
  CHECK_THROWS_AS(bootstrap_pvalue(ok, ok2, 0, 0), Error);
}
