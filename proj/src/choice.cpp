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

#include "choice.hpp"

#include <cctype>
#include <regex>

namespace contamkit {

namespace {

const std::regex kAnswerIs(
    R"((?:answer\s+is|answer:)[\s"'*]*\(?([A-Za-z])\)?(?![A-Za-z0-9]))",
    std::regex::icase);

const std::regex kLoneLetter(R"((?:^|\n)\s*\(?([A-Za-z])\)?[.:\s]*(?=\n|$))");

}  // namespace

ParsedChoice parse_choice(const std::string& text, const std::set<char>& allowed) {
  ParsedChoice best;
  long best_pos = -1;
  for (const auto* re : {&kAnswerIs, &kLoneLetter}) {
    for (auto it = std::sregex_iterator(text.begin(), text.end(), *re);
         it != std::sregex_iterator(); ++it) {
      char letter = static_cast<char>(
          std::toupper(static_cast<unsigned char>(it->str(1)[0])));
      if (!allowed.count(letter)) continue;
      long pos = static_cast<long>(it->position(1));
      if (pos > best_pos) {
        best_pos = pos;
        best.letter = letter;
        best.raw_span = it->str(0);
      }
    }
  }
  return best;
}

std::optional<bool> parse_yes_no(const std::string& text) {
  static const std::regex kYesNo(R"(\b(yes|no)\b)", std::regex::icase);
  std::smatch m;
  if (!std::regex_search(text, m, kYesNo)) return std::nullopt;
  char c = static_cast<char>(std::tolower(static_cast<unsigned char>(m.str(1)[0])));
  return c == 'y';
}

}  // namespace contamkit
