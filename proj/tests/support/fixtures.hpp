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

// Shared test data: the Bucks at Knicks box score and a handful of helpers.

#include <string>
#include <vector>

#include "saltrack/model.hpp"
#include "saltrack/records.hpp"

namespace saltrack::testing {

inline void add_player(GameData& g, const std::string& first, const std::string& last,
                       Side side, int pts, int reb, int ast, int blk, int stl, int min) {
  Entity e;
  e.id = "P:" + first + " " + last;
  e.kind = EntityKind::kPlayer;
  e.side = side;
  e.name_tokens = {first, last};
  g.records.push_back({e.id, {"FIRST_NAME", false}, first});
  g.records.push_back({e.id, {"SECOND_NAME", false}, last});
  const std::pair<const char*, int> stats[] = {{"PTS", pts}, {"REB", reb}, {"AST", ast},
                                               {"BLK", blk}, {"STL", stl}, {"MIN", min}};
  for (const auto& [key, v] : stats) g.records.push_back({e.id, {key, true}, std::to_string(v)});
  g.entities.push_back(std::move(e));
}

inline void add_team(GameData& g, const std::vector<std::string>& city, const std::string& name,
                     Side side, int wins, int losses, int pts, int reb, int ast) {
  Entity e;
  std::string c;
  for (const auto& t : city) c += (c.empty() ? "" : " ") + t;
  e.id = "T:" + c + " " + name;
  e.kind = EntityKind::kTeam;
  e.side = side;
  e.name_tokens = city;
  e.name_tokens.push_back(name);
  for (std::size_t k = 0; k < city.size(); ++k) {
    g.records.push_back(
        {e.id, {k ? "TEAM-CITY-" + std::to_string(k + 1) : "TEAM-CITY", false}, city[k]});
  }
  g.records.push_back({e.id, {"TEAM-NAME", false}, name});
  const std::pair<const char*, int> stats[] = {{"TEAM-WINS", wins}, {"TEAM-LOSSES", losses},
                                               {"TEAM-PTS", pts},   {"TEAM-REB", reb},
                                               {"TEAM-AST", ast}};
  for (const auto& [key, v] : stats) g.records.push_back({e.id, {key, true}, std::to_string(v)});
  g.entities.push_back(std::move(e));
}

// Knicks 104, Bucks 105.
inline GameData bucks_knicks() {
  GameData g;
  g.game_id = "bucks-knicks";
  g.date = "2016-12-28";
  add_team(g, {"New", "York"}, "Knicks", Side::kHome, 16, 19, 104, 46, 26);
  add_team(g, {"Milwaukee"}, "Bucks", Side::kVisitor, 18, 16, 105, 42, 20);
  add_player(g, "Carmelo", "Anthony", Side::kHome, 30, 11, 7, 0, 2, 37);
  add_player(g, "Derrick", "Rose", Side::kHome, 15, 3, 4, 0, 1, 33);
  add_player(g, "Courtney", "Lee", Side::kHome, 11, 2, 3, 1, 1, 38);
  add_player(g, "Giannis", "Antetokounmpo", Side::kVisitor, 27, 13, 4, 3, 1, 39);
  add_player(g, "Greg", "Monroe", Side::kVisitor, 18, 9, 4, 1, 3, 31);
  add_player(g, "Jabari", "Parker", Side::kVisitor, 15, 4, 3, 0, 1, 37);
  add_player(g, "Malcolm", "Brogdon", Side::kVisitor, 12, 6, 8, 0, 0, 38);
  add_player(g, "Mirza", "Teletovic", Side::kVisitor, 13, 1, 0, 0, 0, 21);
  add_player(g, "John", "Henson", Side::kVisitor, 2, 2, 0, 0, 0, 14);
  return g;
}

inline const char* kParker = "P:Jabari Parker";

inline std::vector<std::string> parker_sentence() {
  return {"Jabari", "Parker", "contributed", "15", "points", ",",
          "four",   "rebounds", ",",         "three", "assists"};
}

// The labels of the running example, written out by hand.
inline LabeledSummary parker_labels() {
  LabeledSummary s;
  s.tokens = parker_sentence();
  s.clear_labels();
  auto copy = [&](std::size_t t, const char* attr, std::optional<std::uint8_t> n) {
    s.z[t] = 1;
    s.e[t] = kParker;
    s.a[t] = attr;
    s.n[t] = n;
  };
  copy(0, "FIRST_NAME", std::nullopt);
  copy(1, "SECOND_NAME", std::nullopt);
  copy(3, "PTS", 0);
  copy(6, "REB", 1);
  copy(9, "AST", 1);
  return s;
}

inline Document parker_document() { return {bucks_knicks(), parker_labels()}; }

// Vocabularies over one document with every summary word kept.
inline Vocabularies vocab_for(const std::vector<Document>& docs) {
  WriterRegistry writers;
  return build_vocabularies(docs, writers, 1);
}

}  // namespace saltrack::testing
