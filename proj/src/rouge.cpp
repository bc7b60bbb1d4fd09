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

#include "rouge.hpp"

#include <algorithm>

#include "text.hpp"

namespace contamkit {

namespace {

// Longest common subsequence length, rolling-array DP.
size_t lcs_length(const std::vector<std::string>& a,
                  const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

RougeLScore rouge_l_tokens(const std::vector<std::string>& candidate,
                           const std::vector<std::string>& reference) {
  RougeLScore score;
  score.lcs_length = lcs_length(candidate, reference);
  score.precision =
      candidate.empty() ? 0.0
                        : static_cast<double>(score.lcs_length) / candidate.size();
  score.recall =
      reference.empty() ? 0.0
                        : static_cast<double>(score.lcs_length) / reference.size();
  double denom = score.precision + score.recall;
  score.f1 = denom > 0.0 ? 2.0 * score.precision * score.recall / denom : 0.0;
  return score;
}

RougeLScore rouge_l(const std::string& candidate, const std::string& reference) {
  return rouge_l_tokens(normalized_tokens(candidate),
                        normalized_tokens(reference));
}

}  // namespace contamkit
