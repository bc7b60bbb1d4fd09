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

#include <optional>
#include <set>
#include <string>

namespace contamkit {

struct ParsedChoice {
  std::optional<char> letter;  // uppercase, member of the allowed set
  std::string raw_span;        // matched substring, empty when letter is absent
};

// Scans for the last recognized answer pattern ("The correct answer is (X)",
// "The answer is X", or a lone option letter on its own line) whose letter is
// in `allowed`. Chain-of-thought outputs mention several letters before
// concluding, hence last-match. Unparseable text yields an empty choice.
ParsedChoice parse_choice(const std::string& text, const std::set<char>& allowed);

// Yes/No verdict parsing for judge responses. Returns nullopt when neither
// word appears.
std::optional<bool> parse_yes_no(const std::string& text);

}  // namespace contamkit
