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

#include "saltrack/numbers.hpp"

#include <array>
#include <charconv>
#include <unordered_map>

namespace saltrack {

namespace {

constexpr std::array<std::string_view, 20> kOnes = {
    "zero",    "one",     "two",       "three",    "four",
    "five",    "six",     "seven",     "eight",    "nine",
    "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
    "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
constexpr std::array<std::string_view, 10> kTens = {
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty",
    "ninety"};

std::string spell_below_100(int v) {
  if (v < 20) return std::string(kOnes[v]);
  std::string out(kTens[v / 10]);
  if (v % 10) out += "-" + std::string(kOnes[v % 10]);
  return out;
}

struct Tables {
  std::unordered_map<int, std::string> to_word;
  std::unordered_map<std::string, int> to_value;
};

const Tables& tables() {
  static const Tables t = [] {
    Tables t;
    auto add = [&t](int v, std::string w) {
      t.to_value.emplace(w, v);
      t.to_word.emplace(v, std::move(w));
    };
    for (int v = 0; v < 100; ++v) add(v, spell_below_100(v));
    add(100, "one-hundred");
    for (int v = 110; v < 200; v += 10) {
      add(v, "one-hundred-" + spell_below_100(v - 100));
    }
    add(200, "two-hundred");
    return t;
  }();
  return t;
}

}  // namespace

NumberLexicon::NumberLexicon() = default;

const NumberLexicon& NumberLexicon::instance() {
  static const NumberLexicon lexicon;
  return lexicon;
}

std::optional<std::string> NumberLexicon::word(int value) const {
  auto it = tables().to_word.find(value);
  if (it == tables().to_word.end()) return std::nullopt;
  return it->second;
}

std::optional<int> NumberLexicon::parse(std::string_view word) const {
  auto it = tables().to_value.find(std::string(word));
  if (it == tables().to_value.end()) return std::nullopt;
  return it->second;
}

std::optional<int> parse_number_word(std::string_view token) {
  return NumberLexicon::instance().parse(token);
}

std::optional<int> parse_number_token(std::string_view token) {
  if (is_digit_token(token)) {
    if (token.size() > 1 && token.front() == '0') return std::nullopt;
    if (token.size() > 9) return std::nullopt;
    int v = 0;
    std::from_chars(token.data(), token.data() + token.size(), v);
    return v;
  }
  return parse_number_word(token);
}

std::string render_number(int value, bool as_words) {
  if (as_words) {
    if (auto w = NumberLexicon::instance().word(value)) return *w;
  }
  return std::to_string(value);
}

}  // namespace saltrack
