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

// Box-score domain model: entities, attributes, records, games and their
// summaries, plus JSON Lines ingestion and the synthetic corpus generator.
//
// A game is the set of records x = {(e, a, x[e, a])}. Multi-token string
// values (city "New York", surname "Van Vleet") are split into one record
// per token: TEAM-CITY = "New", TEAM-CITY-2 = "York". Every copied value is
// therefore a single summary token.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace saltrack {

inline constexpr std::string_view kUnknownWriter = "<unk-writer>";

enum class EntityKind { kPlayer, kTeam };
enum class Side { kHome, kVisitor };

std::string_view to_string(EntityKind kind);
std::string_view to_string(Side side);

struct Entity {
  std::string id;  // "P:<player name>" or "T:<city> <team name>"
  EntityKind kind = EntityKind::kPlayer;
  std::vector<std::string> name_tokens;
  Side side = Side::kHome;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct Attribute {
  std::string id;  // PTS, TEAM-PTS, FIRST_NAME, TEAM-CITY-2, ...
  bool is_numeric = false;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

// True for the string-valued name attributes and their per-token
// continuations (FIRST_NAME, SECOND_NAME, TEAM-CITY, TEAM-NAME, *-2, ...).
bool is_name_attribute(std::string_view attribute_id);
// Strips a per-token suffix: "TEAM-CITY-2" -> "TEAM-CITY".
std::string_view base_attribute(std::string_view attribute_id);

struct Record {
  std::string entity;  // Entity::id
  Attribute attribute;
  std::string value;  // decimal digits for numeric attributes

  std::optional<int> numeric_value() const;

  friend bool operator==(const Record&, const Record&) = default;
};

struct GameData {
  std::string game_id;
  std::string date;
  std::string writer{kUnknownWriter};
  std::vector<Entity> entities;
  std::vector<Record> records;

  const Entity* find_entity(std::string_view id) const;
  std::optional<std::size_t> entity_index(std::string_view id) const;
  const Record* find_record(std::string_view entity,
                            std::string_view attribute) const;
  std::vector<const Record*> records_of(std::string_view entity) const;
  const Entity* team(Side side) const;
};

// Per-token supervision. e/a/n hold values only where defined:
// e_t, a_t iff z_t = 1; n_t iff z_t = 1 and a_t is numeric.
struct LabeledSummary {
  std::vector<std::string> tokens;
  std::vector<std::uint8_t> z;
  std::vector<std::optional<std::string>> e;
  std::vector<std::optional<std::string>> a;
  std::vector<std::optional<std::uint8_t>> n;

  std::size_t size() const { return tokens.size(); }
  bool has_labels() const { return z.size() == tokens.size(); }
  // Initializes all label rows to Z = 0.
  void clear_labels();
};

// Returns human-readable violations of the LabeledSummary invariants
// (lengths, definedness, entity/attribute existence in the game).
std::vector<std::string> validate_labels(const LabeledSummary& summary,
                                         const GameData& game);

struct Document {
  GameData game;
  LabeledSummary summary;
};

class WriterRegistry {
 public:
  WriterRegistry();
  std::size_t add(std::string_view name);
  // Unknown names map to the reserved id 0.
  std::size_t id(std::string_view name) const;
  const std::string& name(std::size_t id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Dataset {
  std::vector<Document> train;
  std::vector<Document> dev;
  std::vector<Document> test;
  WriterRegistry writers;

  std::size_t size() const { return train.size() + dev.size() + test.size(); }
  const Document* find(std::string_view game_id) const;
};

struct CorpusStats {
  std::size_t documents = 0;
  double avg_tokens = 0.0;
  double avg_records = 0.0;
};
CorpusStats corpus_stats(const std::vector<Document>& docs);

class DataError : public std::runtime_error {
 public:
  DataError(std::string game_id, std::string key, const std::string& what);
  const std::string& game_id() const { return game_id_; }
  const std::string& key() const { return key_; }

 private:
  std::string game_id_;
  std::string key_;
};

// Files making up each split. Missing entries yield empty splits.
struct SplitSpec {
  std::vector<std::filesystem::path> train;
  std::vector<std::filesystem::path> dev;
  std::vector<std::filesystem::path> test;

  // {dir}/train.jsonl, {dir}/valid.jsonl, {dir}/test.jsonl when present.
  static SplitSpec from_directory(const std::filesystem::path& dir);
};

Document parse_document(std::string_view json_line);
std::string serialize_document(const Document& doc);

std::vector<Document> load_jsonl(const std::filesystem::path& path);
void save_jsonl(const std::filesystem::path& path,
                const std::vector<Document>& docs);

Dataset load_dataset(const SplitSpec& spec);
Dataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);

std::vector<std::string> validate_game(const GameData& game);

struct SynthOptions {
  std::uint64_t seed = 1;
  std::size_t n_games = 10;
  std::size_t n_players = 8;  // per game, split between the two teams
  std::size_t n_writers = 1;  // number of distinct writing styles (<= 2)
  // Every game is written once by each writer instead of by one.
  bool every_writer_per_game = false;
  std::size_t dev_games = 0;
  std::size_t test_games = 0;
  std::size_t players_mentioned = 3;
  double dnp_probability = 0.1;
};

// Deterministic desk-scale corpus. Every summary is template-written and
// carries its gold (Z, E, A, N) labels by construction.
Dataset synth_corpus(const SynthOptions& options);
Dataset synth_corpus(std::uint64_t seed, std::size_t n_games,
                     std::size_t n_players);

// Splits on whitespace.
std::vector<std::string> split_tokens(std::string_view text);
std::string join_tokens(const std::vector<std::string>& tokens,
                        std::string_view sep = " ");

}  // namespace saltrack
