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

// Rule-based alignment of summary tokens to box-score records.
//
// Name tokens are matched against each entity's name records (full name,
// surname, team name, city). A number token is attributed to the nearest
// preceding mention, within the current sentence and then the previous one,
// whose entity owns a numeric record with that value. Cue words in the next
// two tokens ("points", "boards", ...) restrict the attribute. Ambiguity at
// any stage leaves the token unlabeled.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "saltrack/records.hpp"

namespace saltrack {

enum class MatchKind { kFullName, kLastName, kTeam, kCity };

std::string_view to_string(MatchKind kind);

struct MentionSpan {
  std::size_t begin = 0;  // token range [begin, end)
  std::size_t end = 0;
  std::size_t entity = 0;  // index into GameData::entities
  MatchKind kind = MatchKind::kFullName;
  std::vector<const Record*> records;  // name record per token

  friend bool operator==(const MentionSpan& a, const MentionSpan& b) {
    return a.begin == b.begin && a.end == b.end && a.entity == b.entity &&
           a.kind == b.kind;
  }
};

// Longest match wins; spans equally long for several entities are dropped.
std::vector<MentionSpan> find_mentions(const GameData& game,
                                       const std::vector<std::string>& tokens);

// Base attribute named by a cue word ("points" -> "PTS"), if any.
std::optional<std::string_view> cue_attribute(std::string_view token);

struct Resolution {
  std::size_t entity = 0;
  const Record* record = nullptr;  // null for unmatched permissive results
  std::string attribute;
};

struct ResolveOptions {
  // When no record matches but a cue is present, attribute the value to the
  // nearest mention anyway (extraction of unsupported relations).
  bool permissive = false;
};

std::optional<Resolution> resolve_entity(const GameData& game,
                                         const std::vector<std::string>& tokens,
                                         const std::vector<MentionSpan>& mentions,
                                         std::size_t position,
                                         const ResolveOptions& options = {});

LabeledSummary annotate(const GameData& game, const std::vector<std::string>& tokens);

}  // namespace saltrack
