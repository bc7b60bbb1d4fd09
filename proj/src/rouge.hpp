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

#include <cstddef>
#include <string>
#include <vector>

namespace contamkit {

struct RougeLScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t lcs_length = 0;
};

// ROUGE-L over word tokens after normalization (lowercase, punctuation
// stripped, whitespace collapsed). Empty inputs yield zeros.
RougeLScore rouge_l(const std::string& candidate, const std::string& reference);

// Same statistic over pre-tokenized sequences.
RougeLScore rouge_l_tokens(const std::vector<std::string>& candidate,
                           const std::vector<std::string>& reference);

}  // namespace contamkit
