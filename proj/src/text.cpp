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

#include "text.hpp"

#include <cctype>
#include <sstream>

namespace contamkit {

namespace {

inline bool is_space(unsigned char c) { return std::isspace(c) != 0; }
inline bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }

}  // namespace

std::string collapse_whitespace(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

std::string normalize_text(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (size_t i = 0; i < s.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (is_alnum(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if ((c == '\'' || c == '-') && i > 0 && i + 1 < s.size() &&
               is_alnum(static_cast<unsigned char>(s[i - 1])) &&
               is_alnum(static_cast<unsigned char>(s[i + 1]))) {
      out.push_back(static_cast<char>(c));
    } else {
      // Punctuation and whitespace both act as separators.
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> whitespace_tokens(const std::string& s) {
  std::vector<std::string> tokens;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

std::vector<std::string> normalized_tokens(const std::string& s) {
  return whitespace_tokens(normalize_text(s));
}

std::map<std::string, int> digit_sequences(const std::string& s) {
  std::map<std::string, int> counts;
  size_t i = 0;
  while (i < s.size()) {
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      ++counts[s.substr(i, j - i)];
      i = j;
    } else {
      ++i;
    }
  }
  return counts;
}

std::map<std::string, int> capitalized_tokens(const std::string& s) {
  std::map<std::string, int> counts;
  bool sentence_start = true;
  for (const std::string& raw : whitespace_tokens(s)) {
    // strip surrounding punctuation
    size_t b = 0, e = raw.size();
    while (b < e && !is_alnum(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && !is_alnum(static_cast<unsigned char>(raw[e - 1]))) --e;
    std::string tok = raw.substr(b, e - b);
    if (!tok.empty() && std::isupper(static_cast<unsigned char>(tok[0])) &&
        !sentence_start) {
      ++counts[tok];
    }
    char last = raw.empty() ? ' ' : raw.back();
    sentence_start = (last == '.' || last == '!' || last == '?');
  }
  return counts;
}

}  // namespace contamkit
