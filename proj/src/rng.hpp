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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace contamkit {

// Seed derivation is counter-based: every sub-stream is a pure function of
// (master seed, tags), so concurrent execution order never changes outputs.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s, uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t derive_seed(uint64_t master, uint64_t tag) {
  return splitmix64(splitmix64(master) ^ splitmix64(tag * 0x9e3779b97f4a7c15ULL + 1));
}

inline uint64_t derive_seed(uint64_t master, uint64_t tag, uint64_t tag2) {
  return derive_seed(derive_seed(master, tag), tag2);
}

inline uint64_t derive_seed(uint64_t master, std::string_view tag) {
  return splitmix64(splitmix64(master) ^ fnv1a64(tag));
}

// Small deterministic generator. Not std::mt19937_64 so that the stream is
// pinned by this file rather than by the standard library implementation.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(splitmix64(seed ^ 0xa5a5a5a5a5a5a5a5ULL)) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, bound).
  uint64_t uniform(uint64_t bound) {
    if (bound == 0) throw Error(ErrorCode::Argument, "uniform: zero bound");
    uint64_t threshold = (~bound + 1) % bound;  // rejection keeps it unbiased
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform integer in [lo, hi] inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    if (lo > hi) throw Error(ErrorCode::Argument, "uniform_int: empty range");
    return lo + static_cast<int64_t>(uniform(static_cast<uint64_t>(hi - lo) + 1));
  }

  double uniform_real() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double normal(double mean = 0.0, double stddev = 1.0) {
    double u1 = uniform_real();
    double u2 = uniform_real();
    while (u1 <= 0.0) u1 = uniform_real();
    double z = std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), in ascending order.
  std::vector<size_t> sample_indices(size_t n, size_t k) {
    if (k > n) throw Error(ErrorCode::Argument, "sample_indices: k > n");
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    for (size_t i = 0; i < k; ++i) {
      size_t j = i + static_cast<size_t>(uniform(n - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

 private:
  uint64_t state_;
};

}  // namespace contamkit
