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

#include "saltrack/records.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace saltrack {

using nlohmann::json;

namespace {

constexpr std::string_view kNameBases[] = {"FIRST_NAME", "SECOND_NAME",
                                           "TEAM-CITY", "TEAM-NAME"};
// box_score keys that describe the player rather than carry a record.
constexpr std::string_view kPlayerMetaKeys[] = {
    "PLAYER_NAME", "FIRST_NAME", "SECOND_NAME", "TEAM_CITY", "SIDE",
    "START_POSITION"};

bool is_missing_value(std::string_view v) {
  return v.empty() || v == "N/A" || v == "NA";
}

std::optional<int> parse_count(std::string_view v) {
  if (v.empty() || v.size() > 9) return std::nullopt;
  if (v.size() > 1 && v.front() == '0') return std::nullopt;
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || out < 0) {
    return std::nullopt;
  }
  return out;
}

std::string token_attribute(std::string_view base, std::size_t k) {
  std::string id(base);
  if (k > 0) id += "-" + std::to_string(k + 1);
  return id;
}

std::string value_string(const json& v, const std::string& game_id,
                         const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_null()) return "N/A";
  throw DataError(game_id, key, "value must be a string or integer");
}

const json& require(const json& obj, const char* key,
                    const std::string& game_id) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw DataError(game_id, key, "missing required key");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           const std::string& game_id) {
  const json& v = require(obj, key, game_id);
  if (!v.is_string()) throw DataError(game_id, key, "expected a string");
  return v.get<std::string>();
}

void add_name_records(std::vector<Record>& out, const std::string& entity,
                      std::string_view base,
                      const std::vector<std::string>& tokens) {
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    out.push_back({entity, {token_attribute(base, k), false}, tokens[k]});
  }
}

void add_numeric_record(std::vector<Record>& out, const std::string& entity,
                        const std::string& key, const std::string& value,
                        const std::string& game_id) {
  if (is_missing_value(value)) return;
  auto count = parse_count(value);
  if (!count) {
    throw DataError(game_id, key,
                    "non-integer value '" + value + "' for " + entity);
  }
  out.push_back({entity, {key, true}, std::to_string(*count)});
}

Entity parse_team(const json& doc, const json& line, Side side,
                  const std::string& game_id, std::vector<Record>& records) {
  const char* prefix = side == Side::kHome ? "home" : "vis";
  std::string city = require_string(doc, (std::string(prefix) + "_city").c_str(),
                                    game_id);
  std::string name = require_string(doc, (std::string(prefix) + "_name").c_str(),
                                    game_id);
  if (auto it = line.find("TEAM-CITY"); it != line.end() && it->is_string()) {
    city = it->get<std::string>();
  }
  if (auto it = line.find("TEAM-NAME"); it != line.end() && it->is_string()) {
    name = it->get<std::string>();
  }
  Entity team;
  team.id = "T:" + city + " " + name;
  team.kind = EntityKind::kTeam;
  team.side = side;
  auto city_tokens = split_tokens(city);
  auto name_tokens = split_tokens(name);
  team.name_tokens = city_tokens;
  team.name_tokens.insert(team.name_tokens.end(), name_tokens.begin(),
                          name_tokens.end());
  add_name_records(records, team.id, "TEAM-CITY", city_tokens);
  add_name_records(records, team.id, "TEAM-NAME", name_tokens);
  for (const auto& [key, value] : line.items()) {
    if (key == "TEAM-CITY" || key == "TEAM-NAME") continue;
    add_numeric_record(records, team.id, key,
                       value_string(value, game_id, key), game_id);
  }
  return team;
}

std::optional<std::string> cell(const json& box, const std::string& key,
                                const std::string& index,
                                const std::string& game_id) {
  auto col = box.find(key);
  if (col == box.end()) return std::nullopt;
  if (!col->is_object()) throw DataError(game_id, key, "expected an object");
  auto it = col->find(index);
  if (it == col->end()) return std::nullopt;
  return value_string(*it, game_id, key);
}

void parse_players(const json& doc, const json& box,
                   const std::string& game_id, std::vector<Entity>& entities,
                   std::vector<Record>& records) {
  if (!box.is_object()) {
    throw DataError(game_id, "box_score", "expected an object");
  }
  auto names = box.find("PLAYER_NAME");
  if (names == box.end()) {
    if (box.empty()) return;
    throw DataError(game_id, "box_score.PLAYER_NAME", "missing required key");
  }
  if (!names->is_object()) {
    throw DataError(game_id, "box_score.PLAYER_NAME", "expected an object");
  }
  std::vector<std::string> indices;
  for (const auto& [idx, unused] : names->items()) indices.push_back(idx);
  std::sort(indices.begin(), indices.end(),
            [](const std::string& a, const std::string& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });

  const std::string home_city = require_string(doc, "home_city", game_id);
  const std::string vis_city = require_string(doc, "vis_city", game_id);

  for (const auto& idx : indices) {
    const std::string key_ctx = "box_score[" + idx + "]";
    std::string full = *cell(box, "PLAYER_NAME", idx, game_id);
    auto first = cell(box, "FIRST_NAME", idx, game_id);
    auto second = cell(box, "SECOND_NAME", idx, game_id);
    std::vector<std::string> first_tokens, second_tokens;
    if (first && !is_missing_value(*first)) first_tokens = split_tokens(*first);
    if (second && !is_missing_value(*second)) {
      second_tokens = split_tokens(*second);
    }
    if (first_tokens.empty() && second_tokens.empty()) {
      auto tokens = split_tokens(full);
      if (tokens.empty()) {
        throw DataError(game_id, key_ctx + ".PLAYER_NAME", "empty player name");
      }
      first_tokens.assign(tokens.begin(), tokens.begin() + 1);
      second_tokens.assign(tokens.begin() + 1, tokens.end());
    }

    Entity player;
    player.id = "P:" + full;
    player.kind = EntityKind::kPlayer;
    if (auto side = cell(box, "SIDE", idx, game_id)) {
      if (*side == "H" || *side == "home") {
        player.side = Side::kHome;
      } else if (*side == "V" || *side == "vis" || *side == "visitor") {
        player.side = Side::kVisitor;
      } else {
        throw DataError(game_id, key_ctx + ".SIDE", "unknown side '" + *side + "'");
      }
    } else if (auto city = cell(box, "TEAM_CITY", idx, game_id)) {
      if (home_city == vis_city) {
        throw DataError(game_id, key_ctx + ".SIDE",
                        "both teams share a city; SIDE is required");
      }
      if (*city == home_city) {
        player.side = Side::kHome;
      } else if (*city == vis_city) {
        player.side = Side::kVisitor;
      } else {
        throw DataError(game_id, key_ctx + ".TEAM_CITY",
                        "city '" + *city + "' matches neither team");
      }
    } else {
      throw DataError(game_id, key_ctx + ".TEAM_CITY",
                      "player side cannot be determined");
    }
    player.name_tokens = first_tokens;
    player.name_tokens.insert(player.name_tokens.end(), second_tokens.begin(),
                              second_tokens.end());
    add_name_records(records, player.id, "FIRST_NAME", first_tokens);
    add_name_records(records, player.id, "SECOND_NAME", second_tokens);

    for (const auto& [key, column] : box.items()) {
      if (std::find(std::begin(kPlayerMetaKeys), std::end(kPlayerMetaKeys),
                    key) != std::end(kPlayerMetaKeys)) {
        continue;
      }
      if (!column.is_object()) {
        throw DataError(game_id, "box_score." + key, "expected an object");
      }
      auto it = column.find(idx);
      if (it == column.end()) continue;
      add_numeric_record(records, player.id, key,
                         value_string(*it, game_id, key), game_id);
    }
    entities.push_back(std::move(player));
  }
}

LabeledSummary parse_labels(const json& doc, const std::string& game_id) {
  LabeledSummary s;
  const json& summary = require(doc, "summary", game_id);
  if (!summary.is_array()) throw DataError(game_id, "summary", "expected an array");
  for (const auto& tok : summary) {
    if (!tok.is_string()) {
      throw DataError(game_id, "summary", "tokens must be strings");
    }
    s.tokens.push_back(tok.get<std::string>());
  }
  auto labels = doc.find("labels");
  if (labels == doc.end() || labels->is_null()) return s;
  auto column = [&](const char* key) -> const json& {
    const json& c = require(*labels, key, game_id);
    if (!c.is_array() || c.size() != s.tokens.size()) {
      throw DataError(game_id, std::string("labels.") + key,
                      "expected an array of length " +
                          std::to_string(s.tokens.size()));
    }
    return c;
  };
  const json& z = column("z");
  const json& e = column("e");
  const json& a = column("a");
  const json& n = column("n");
  for (std::size_t t = 0; t < s.tokens.size(); ++t) {
    s.z.push_back(static_cast<std::uint8_t>(z[t].get<int>()));
    s.e.push_back(e[t].is_null() ? std::nullopt
                                 : std::optional(e[t].get<std::string>()));
    s.a.push_back(a[t].is_null() ? std::nullopt
                                 : std::optional(a[t].get<std::string>()));
    s.n.push_back(n[t].is_null()
                      ? std::nullopt
                      : std::optional(static_cast<std::uint8_t>(n[t].get<int>())));
  }
  return s;
}

std::string joined_values(const GameData& g, const std::string& entity,
                          std::string_view base) {
  std::vector<std::string> parts;
  for (std::size_t k = 0;; ++k) {
    const Record* r = g.find_record(entity, token_attribute(base, k));
    if (!r) break;
    parts.push_back(r->value);
  }
  return join_tokens(parts);
}

}  // namespace

std::string_view to_string(EntityKind kind) {
  return kind == EntityKind::kPlayer ? "player" : "team";
}

std::string_view to_string(Side side) {
  return side == Side::kHome ? "home" : "visitor";
}

std::string_view base_attribute(std::string_view id) {
  auto dash = id.rfind('-');
  if (dash == std::string_view::npos || dash + 1 >= id.size()) return id;
  auto suffix = id.substr(dash + 1);
  if (!std::all_of(suffix.begin(), suffix.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    return id;
  }
  auto base = id.substr(0, dash);
  for (auto b : kNameBases) {
    if (base == b) return base;
  }
  return id;
}

bool is_name_attribute(std::string_view id) {
  auto base = base_attribute(id);
  return std::find(std::begin(kNameBases), std::end(kNameBases), base) !=
         std::end(kNameBases);
}

std::optional<int> Record::numeric_value() const {
  if (!attribute.is_numeric) return std::nullopt;
  return parse_count(value);
}

const Entity* GameData::find_entity(std::string_view id) const {
  for (const auto& e : entities) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::optional<std::size_t> GameData::entity_index(std::string_view id) const {
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (entities[i].id == id) return i;
  }
  return std::nullopt;
}

const Record* GameData::find_record(std::string_view entity,
                                    std::string_view attribute) const {
  for (const auto& r : records) {
    if (r.entity == entity && r.attribute.id == attribute) return &r;
  }
  return nullptr;
}

std::vector<const Record*> GameData::records_of(std::string_view entity) const {
  std::vector<const Record*> out;
  for (const auto& r : records) {
    if (r.entity == entity) out.push_back(&r);
  }
  return out;
}

const Entity* GameData::team(Side side) const {
  for (const auto& e : entities) {
    if (e.kind == EntityKind::kTeam && e.side == side) return &e;
  }
  return nullptr;
}

void LabeledSummary::clear_labels() {
  z.assign(tokens.size(), 0);
  e.assign(tokens.size(), std::nullopt);
  a.assign(tokens.size(), std::nullopt);
  n.assign(tokens.size(), std::nullopt);
}

std::vector<std::string> validate_labels(const LabeledSummary& s,
                                         const GameData& game) {
  std::vector<std::string> out;
  const std::size_t T = s.tokens.size();
  if (s.z.size() != T || s.e.size() != T || s.a.size() != T ||
      s.n.size() != T) {
    out.push_back("label rows differ in length from the token sequence");
    return out;
  }
  for (std::size_t t = 0; t < T; ++t) {
    const std::string where = "position " + std::to_string(t) + ": ";
    if (s.z[t] > 1) {
      out.push_back(where + "z must be 0 or 1");
      continue;
    }
    if (s.z[t] == 0) {
      if (s.e[t] || s.a[t] || s.n[t]) {
        out.push_back(where + "e/a/n defined although z = 0");
      }
      continue;
    }
    if (!s.e[t] || !s.a[t]) {
      out.push_back(where + "z = 1 requires both e and a");
      continue;
    }
    if (!game.find_entity(*s.e[t])) {
      out.push_back(where + "entity '" + *s.e[t] + "' not in game");
      continue;
    }
    const Record* r = game.find_record(*s.e[t], *s.a[t]);
    if (!r) {
      out.push_back(where + "no record (" + *s.e[t] + ", " + *s.a[t] + ")");
      continue;
    }
    if (r->attribute.is_numeric != s.n[t].has_value()) {
      out.push_back(where + "n must be defined iff the attribute is numeric");
    } else if (s.n[t] && *s.n[t] > 1) {
      out.push_back(where + "n must be 0 or 1");
    }
  }
  return out;
}

WriterRegistry::WriterRegistry() { add(kUnknownWriter); }

std::size_t WriterRegistry::add(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  names_.emplace_back(name);
  index_.emplace(std::string(name), names_.size() - 1);
  return names_.size() - 1;
}

std::size_t WriterRegistry::id(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? 0 : it->second;
}

const Document* Dataset::find(std::string_view game_id) const {
  for (const auto* split : {&train, &dev, &test}) {
    for (const auto& d : *split) {
      if (d.game.game_id == game_id) return &d;
    }
  }
  return nullptr;
}

CorpusStats corpus_stats(const std::vector<Document>& docs) {
  CorpusStats s;
  s.documents = docs.size();
  if (docs.empty()) return s;
  double tokens = 0, records = 0;
  for (const auto& d : docs) {
    tokens += static_cast<double>(d.summary.tokens.size());
    records += static_cast<double>(d.game.records.size());
  }
  s.avg_tokens = tokens / static_cast<double>(docs.size());
  s.avg_records = records / static_cast<double>(docs.size());
  return s;
}

DataError::DataError(std::string game_id, std::string key,
                     const std::string& what)
    : std::runtime_error("game '" + game_id + "', key '" + key + "': " + what),
      game_id_(std::move(game_id)),
      key_(std::move(key)) {}

SplitSpec SplitSpec::from_directory(const std::filesystem::path& dir) {
  SplitSpec spec;
  auto add = [&](std::vector<std::filesystem::path>& v, const char* name) {
    auto p = dir / name;
    if (std::filesystem::exists(p)) v.push_back(p);
  };
  add(spec.train, "train.jsonl");
  add(spec.dev, "valid.jsonl");
  add(spec.test, "test.jsonl");
  return spec;
}

Document parse_document(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError("?", "<json>", e.what());
  }
  if (!doc.is_object()) throw DataError("?", "<json>", "expected an object");
  std::string game_id = "?";
  if (auto it = doc.find("game_id"); it != doc.end() && it->is_string()) {
    game_id = it->get<std::string>();
  } else {
    throw DataError(game_id, "game_id", "missing or not a string");
  }

  Document out;
  GameData& g = out.game;
  g.game_id = game_id;
  try {
    if (auto it = doc.find("day"); it != doc.end() && it->is_string()) {
      g.date = it->get<std::string>();
    }
    if (auto it = doc.find("writer"); it != doc.end() && it->is_string() &&
                                      !it->get<std::string>().empty()) {
      g.writer = it->get<std::string>();
    }
    const json& home_line = require(doc, "home_line", game_id);
    const json& vis_line = require(doc, "vis_line", game_id);
    if (!home_line.is_object()) throw DataError(game_id, "home_line", "expected an object");
    if (!vis_line.is_object()) throw DataError(game_id, "vis_line", "expected an object");
    g.entities.push_back(parse_team(doc, home_line, Side::kHome, game_id, g.records));
    g.entities.push_back(parse_team(doc, vis_line, Side::kVisitor, game_id, g.records));
    parse_players(doc, require(doc, "box_score", game_id), game_id, g.entities,
                  g.records);
    out.summary = parse_labels(doc, game_id);
  } catch (const json::exception& e) {
    throw DataError(game_id, "<json>", e.what());
  }
  return out;
}

std::string serialize_document(const Document& d) {
  const GameData& g = d.game;
  json doc;
  doc["game_id"] = g.game_id;
  if (!g.date.empty()) doc["day"] = g.date;
  if (g.writer != kUnknownWriter) doc["writer"] = g.writer;

  for (Side side : {Side::kHome, Side::kVisitor}) {
    const char* prefix = side == Side::kHome ? "home" : "vis";
    json line = json::object();
    if (const Entity* team = g.team(side)) {
      std::string city = joined_values(g, team->id, "TEAM-CITY");
      std::string name = joined_values(g, team->id, "TEAM-NAME");
      doc[std::string(prefix) + "_city"] = city;
      doc[std::string(prefix) + "_name"] = name;
      line["TEAM-CITY"] = city;
      line["TEAM-NAME"] = name;
      for (const Record* r : g.records_of(team->id)) {
        if (r->attribute.is_numeric) line[r->attribute.id] = r->value;
      }
    }
    doc[std::string(prefix) + "_line"] = line;
  }

  json box = json::object();
  std::size_t idx = 0;
  for (const auto& e : g.entities) {
    if (e.kind != EntityKind::kPlayer) continue;
    const std::string key = std::to_string(idx++);
    box["PLAYER_NAME"][key] = e.id.substr(2);
    box["FIRST_NAME"][key] = joined_values(g, e.id, "FIRST_NAME");
    std::string second = joined_values(g, e.id, "SECOND_NAME");
    box["SECOND_NAME"][key] = second.empty() ? "N/A" : second;
    box["SIDE"][key] = e.side == Side::kHome ? "H" : "V";
    for (const Record* r : g.records_of(e.id)) {
      if (r->attribute.is_numeric) box[r->attribute.id][key] = r->value;
    }
  }
  doc["box_score"] = box;
  doc["summary"] = d.summary.tokens;
  if (d.summary.has_labels() && !d.summary.tokens.empty()) {
    json labels;
    json z = json::array(), e = json::array(), a = json::array(),
         n = json::array();
    for (std::size_t t = 0; t < d.summary.size(); ++t) {
      z.push_back(static_cast<int>(d.summary.z[t]));
      e.push_back(d.summary.e[t] ? json(*d.summary.e[t]) : json(nullptr));
      a.push_back(d.summary.a[t] ? json(*d.summary.a[t]) : json(nullptr));
      n.push_back(d.summary.n[t] ? json(static_cast<int>(*d.summary.n[t]))
                                 : json(nullptr));
    }
    labels["z"] = z;
    labels["e"] = e;
    labels["a"] = a;
    labels["n"] = n;
    doc["labels"] = labels;
  }
  return doc.dump();
}

std::vector<Document> load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<Document> docs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    docs.push_back(parse_document(line));
  }
  return docs;
}

void save_jsonl(const std::filesystem::path& path,
                const std::vector<Document>& docs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& d : docs) out << serialize_document(d) << '\n';
}

Dataset load_dataset(const SplitSpec& spec) {
  Dataset ds;
  auto load_all = [](const std::vector<std::filesystem::path>& files) {
    std::vector<Document> docs;
    for (const auto& f : files) {
      auto part = load_jsonl(f);
      std::move(part.begin(), part.end(), std::back_inserter(docs));
    }
    return docs;
  };
  ds.train = load_all(spec.train);
  ds.dev = load_all(spec.dev);
  ds.test = load_all(spec.test);
  for (const auto* split : {&ds.train, &ds.dev, &ds.test}) {
    for (const auto& d : *split) {
      auto violations = validate_game(d.game);
      if (!violations.empty()) {
        throw DataError(d.game.game_id, "<records>", violations.front());
      }
      ds.writers.add(d.game.writer);
    }
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  return load_dataset(SplitSpec::from_directory(dir));
}

void save_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir);
  save_jsonl(dir / "train.jsonl", dataset.train);
  save_jsonl(dir / "valid.jsonl", dataset.dev);
  save_jsonl(dir / "test.jsonl", dataset.test);
}

std::vector<std::string> validate_game(const GameData& g) {
  std::vector<std::string> out;
  if (g.game_id.empty()) out.push_back("game_id is empty");
  std::set<std::string> ids;
  std::size_t home_teams = 0, vis_teams = 0;
  for (const auto& e : g.entities) {
    if (!ids.insert(e.id).second) {
      out.push_back("duplicate entity '" + e.id + "'");
    }
    if (e.name_tokens.empty()) {
      out.push_back("entity '" + e.id + "' has no name tokens");
    }
    if (e.kind == EntityKind::kTeam) {
      (e.side == Side::kHome ? home_teams : vis_teams)++;
    }
  }
  if (home_teams > 1 || vis_teams > 1) {
    out.push_back("more than one team on a side");
  }
  std::set<std::pair<std::string, std::string>> pairs;
  std::set<std::string> with_records;
  for (const auto& r : g.records) {
    if (!ids.count(r.entity)) {
      out.push_back("record (" + r.entity + ", " + r.attribute.id +
                    ") cites undeclared entity '" + r.entity + "'");
      continue;
    }
    with_records.insert(r.entity);
    if (!pairs.emplace(r.entity, r.attribute.id).second) {
      out.push_back("duplicate record (" + r.entity + ", " + r.attribute.id +
                    ")");
    }
    if (r.attribute.is_numeric && !parse_count(r.value)) {
      out.push_back("numeric record (" + r.entity + ", " + r.attribute.id +
                    ") has non-integer value '" + r.value + "'");
    }
    if (r.attribute.is_numeric && is_name_attribute(r.attribute.id)) {
      out.push_back("name attribute " + r.attribute.id + " marked numeric");
    }
  }
  for (const auto& e : g.entities) {
    if (!with_records.count(e.id)) {
      out.push_back("entity '" + e.id + "' has no records");
    }
  }
  return out;
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens,
                        std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

}  // namespace saltrack
