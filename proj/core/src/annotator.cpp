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

#include "saltrack/annotator.hpp"

#include <algorithm>
#include <set>

#include "saltrack/numbers.hpp"

namespace saltrack {

namespace {

struct Pattern {
  std::size_t entity;
  MatchKind kind;
  std::vector<const Record*> records;
};

std::vector<const Record*> name_records(const GameData& g, const Entity& e,
                                        std::string_view base) {
  std::vector<const Record*> out;
  for (const Record* r : g.records_of(e.id)) {
    if (!r->attribute.is_numeric && base_attribute(r->attribute.id) == base) {
      out.push_back(r);
    }
  }
  return out;
}

std::vector<Pattern> build_patterns(const GameData& g) {
  std::vector<Pattern> out;
  for (std::size_t i = 0; i < g.entities.size(); ++i) {
    const Entity& e = g.entities[i];
    auto add = [&](MatchKind kind, std::vector<const Record*> recs) {
      if (!recs.empty()) out.push_back({i, kind, std::move(recs)});
    };
    if (e.kind == EntityKind::kPlayer) {
      auto first = name_records(g, e, "FIRST_NAME");
      auto last = name_records(g, e, "SECOND_NAME");
      auto full = first;
      full.insert(full.end(), last.begin(), last.end());
      if (!first.empty() && !last.empty()) add(MatchKind::kFullName, full);
      add(MatchKind::kLastName, last);
    } else {
      auto city = name_records(g, e, "TEAM-CITY");
      auto name = name_records(g, e, "TEAM-NAME");
      auto full = city;
      full.insert(full.end(), name.begin(), name.end());
      if (!city.empty() && !name.empty()) add(MatchKind::kFullName, full);
      add(MatchKind::kTeam, name);
      add(MatchKind::kCity, city);
    }
  }
  return out;
}

bool matches_at(const Pattern& p, const std::vector<std::string>& tokens,
                std::size_t i) {
  if (i + p.records.size() > tokens.size()) return false;
  for (std::size_t k = 0; k < p.records.size(); ++k) {
    if (tokens[i + k] != p.records[k]->value) return false;
  }
  return true;
}

bool is_connective(std::string_view t) { return t == "and" || t == "," || t == "&"; }

}  // namespace

std::string_view to_string(MatchKind kind) {
  switch (kind) {
    case MatchKind::kFullName: return "full-name";
    case MatchKind::kLastName: return "last-name";
    case MatchKind::kTeam: return "team";
    case MatchKind::kCity: return "city";
  }
  return "?";
}

std::vector<MentionSpan> find_mentions(const GameData& game,
                                       const std::vector<std::string>& tokens) {
  const std::vector<Pattern> patterns = build_patterns(game);
  std::vector<MentionSpan> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t best_len = 0;
    std::vector<const Pattern*> best;
    for (const Pattern& p : patterns) {
      if (p.records.size() < best_len || !matches_at(p, tokens, i)) continue;
      if (p.records.size() > best_len) {
        best_len = p.records.size();
        best.clear();
      }
      best.push_back(&p);
    }
    if (best.empty()) {
      ++i;
      continue;
    }
    std::set<std::size_t> owners;
    for (const Pattern* p : best) owners.insert(p->entity);
    if (owners.size() == 1) {
      const Pattern* p = best.front();
      out.push_back({i, i + best_len, p->entity, p->kind, p->records});
    }
    i += best_len;
  }
  return out;
}

std::optional<std::string_view> cue_attribute(std::string_view t) {
  if (t == "points" || t == "point") return "PTS";
  if (t == "rebounds" || t == "rebound" || t == "boards") return "REB";
  if (t == "assists" || t == "assist") return "AST";
  if (t == "steals" || t == "steal") return "STL";
  if (t == "blocks" || t == "block") return "BLK";
  if (t == "minutes" || t == "minute") return "MIN";
  return std::nullopt;
}

std::optional<Resolution> resolve_entity(const GameData& game,
                                         const std::vector<std::string>& tokens,
                                         const std::vector<MentionSpan>& mentions,
                                         std::size_t position,
                                         const ResolveOptions& options) {
  if (position >= tokens.size()) return std::nullopt;
  const auto value = parse_number_token(tokens[position]);
  if (!value) return std::nullopt;

  std::size_t cur_start = 0;
  for (std::size_t k = position; k-- > 0;) {
    if (tokens[k] == ".") {
      cur_start = k + 1;
      break;
    }
  }
  std::size_t prev_start = 0;
  if (cur_start > 0) {
    for (std::size_t k = cur_start - 1; k-- > 0;) {
      if (tokens[k] == ".") {
        prev_start = k + 1;
        break;
      }
    }
  }

  std::optional<std::string_view> cue;
  for (std::size_t k = position + 1; k <= position + 2 && k < tokens.size(); ++k) {
    if (tokens[k] == ".") break;
    if ((cue = cue_attribute(tokens[k]))) break;
  }

  // Anchor groups, nearest first. Mentions joined only by connectives share a
  // group, so "Parker and Middleton , 15 points" is a tie.
  std::vector<std::vector<const MentionSpan*>> groups;
  for (int sentence = 0; sentence < 2; ++sentence) {
    const std::size_t lo = sentence == 0 ? cur_start : prev_start;
    const std::size_t hi = sentence == 0 ? position : cur_start;
    if (sentence == 1 && cur_start == 0) break;
    const MentionSpan* later = nullptr;
    for (auto it = mentions.rbegin(); it != mentions.rend(); ++it) {
      if (it->end > hi || it->begin < lo) continue;
      bool joined = false;
      if (later) {
        joined = std::all_of(tokens.begin() + static_cast<std::ptrdiff_t>(it->end),
                             tokens.begin() + static_cast<std::ptrdiff_t>(later->begin),
                             is_connective);
      }
      if (joined) {
        groups.back().push_back(&*it);
      } else {
        groups.push_back({&*it});
      }
      later = &*it;
    }
  }

  auto expected_attribute = [&](const Entity& e) {
    std::string a(*cue);
    return e.kind == EntityKind::kTeam ? "TEAM-" + a : a;
  };

  for (const auto& group : groups) {
    std::set<std::size_t> seen;
    std::vector<std::pair<std::size_t, std::vector<const Record*>>> hits;
    for (const MentionSpan* m : group) {
      if (!seen.insert(m->entity).second) continue;
      const Entity& e = game.entities[m->entity];
      std::vector<const Record*> recs;
      for (const Record* r : game.records_of(e.id)) {
        if (!r->attribute.is_numeric || r->numeric_value() != value) continue;
        if (cue && r->attribute.id != expected_attribute(e)) continue;
        recs.push_back(r);
      }
      if (!recs.empty()) hits.emplace_back(m->entity, std::move(recs));
    }
    if (hits.empty()) continue;
    if (hits.size() > 1 || hits[0].second.size() > 1) return std::nullopt;
    const Record* r = hits[0].second[0];
    return Resolution{hits[0].first, r, r->attribute.id};
  }

  if (options.permissive && cue && !groups.empty()) {
    std::set<std::size_t> owners;
    for (const MentionSpan* m : groups.front()) owners.insert(m->entity);
    if (owners.size() == 1) {
      const std::size_t ent = *owners.begin();
      return Resolution{ent, nullptr, expected_attribute(game.entities[ent])};
    }
  }
  return std::nullopt;
}

LabeledSummary annotate(const GameData& game, const std::vector<std::string>& tokens) {
  LabeledSummary out;
  out.tokens = tokens;
  out.clear_labels();
  const auto mentions = find_mentions(game, tokens);
  std::vector<bool> in_span(tokens.size(), false);
  for (const MentionSpan& m : mentions) {
    for (std::size_t k = m.begin; k < m.end; ++k) {
      in_span[k] = true;
      out.z[k] = 1;
      out.e[k] = game.entities[m.entity].id;
      out.a[k] = m.records[k - m.begin]->attribute.id;
    }
  }
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (in_span[t]) continue;
    auto res = resolve_entity(game, tokens, mentions, t);
    if (!res) continue;
    out.z[t] = 1;
    out.e[t] = game.entities[res->entity].id;
    out.a[t] = res->attribute;
    out.n[t] = static_cast<std::uint8_t>(is_digit_token(tokens[t]) ? 0 : 1);
  }
  return out;
}

}  // namespace saltrack
