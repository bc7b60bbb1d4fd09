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

#include <map>
#include <string>
#include <vector>

namespace contamkit {

// Collapse runs of whitespace to single spaces and trim the ends.
std::string collapse_whitespace(const std::string& s);

// Lowercase, strip punctuation (apostrophes/hyphens survive only between
// alphanumerics), collapse whitespace.
std::string normalize_text(const std::string& s);

// Whitespace tokens of normalize_text(s).
std::vector<std::string> normalized_tokens(const std::string& s);

// Whitespace tokens of s, untouched.
std::vector<std::string> whitespace_tokens(const std::string& s);

// Multiset of maximal digit runs, e.g. "in 1945 and 1945" -> {1945:2}.
std::map<std::string, int> digit_sequences(const std::string& s);

// Multiset of capitalized tokens, skipping sentence-initial positions
// (the first token and any token following ., ! or ?).
std::map<std::string, int> capitalized_tokens(const std::string& s);

}  // namespace contamkit
