// Copyright 2026 The saltrack Authors
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
#include <string>
#include <string_view>

namespace saltrack {

// English spellings for 0..100 plus the multiples of ten up to 200.
// Compound numbers are hyphenated so every spelling is a single token:
// 21 -> "twenty-one", 100 -> "one-hundred", 150 -> "one-hundred-fifty".
class NumberLexicon {
 public:
  static const NumberLexicon& instance();

  std::optional<std::string> word(int value) const;
  std::optional<int> parse(std::string_view word) const;
  bool covers(int value) const { return word(value).has_value(); }

 private:
  NumberLexicon();
};

// Lexicon inverse. Only lowercase spellings are recognized.
std::optional<int> parse_number_word(std::string_view token);

// Canonical decimal digits ("15", not "015") or a lexicon word.
std::optional<int> parse_number_token(std::string_view token);

inline bool is_digit_token(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

// Words when requested and covered by the lexicon, digits otherwise.
std::string render_number(int value, bool as_words);

}  // namespace saltrack
