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

// Forward computations of the saliency-tracking generator: record and entity
// embeddings, the Z/E/A/N/Y heads, tracker and language-model state updates,
// and writer conditioning.
//
// Every op takes the Graph it records into; states hold Vars of that graph.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "saltrack/autodiff.hpp"
#include "saltrack/records.hpp"

namespace saltrack {

inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kSodToken = "<SoD>";
inline constexpr std::string_view kEodToken = "<EoD>";
inline constexpr std::string_view kPeriodToken = ".";

struct ModelDims {
  std::size_t embed = 128;
  std::size_t hidden = 512;
  std::size_t side = 8;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// Token <-> id map. Id 0 is the fallback for unknown tokens.
class Vocab {
 public:
  Vocab() = default;
  explicit Vocab(std::string fallback) { add(fallback); }

  std::size_t add(std::string_view token);
  std::optional<std::size_t> find(std::string_view token) const;
  std::size_t id(std::string_view token) const;  // fallback id 0 when unknown
  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Vocabularies {
  Vocab entities{"<unk-entity>"};
  Vocab attributes{"<unk-attribute>"};
  Vocab values{"<unk-value>"};
  Vocab words{std::string(kUnkToken)};
  Vocab writers{std::string(kUnknownWriter)};
};

// Entities, attributes and values from training records; words from training
// summaries with frequency >= min_word_freq plus <SoD>, <EoD> and ".".
Vocabularies build_vocabularies(const std::vector<Document>& train,
                                const WriterRegistry& writers,
                                std::size_t min_word_freq = 2);

// A game resolved against the vocabularies. Slots follow GameData order.
struct GameContext {
  struct RecordRef {
    std::size_t entity_slot = 0;
    std::size_t attribute = 0;  // vocab ids
    std::size_t value = 0;
    bool is_numeric = false;
    const Record* record = nullptr;
  };
  struct EntityRef {
    std::size_t vocab_id = 0;
    std::size_t side = 0;  // 0 home, 1 visitor
    const Entity* entity = nullptr;
    std::vector<std::size_t> records;  // indices into records
  };

  const GameData* game = nullptr;
  std::vector<EntityRef> entities;
  std::vector<RecordRef> records;

  std::optional<std::size_t> slot_of(std::string_view entity_id) const;
  // Position of the attribute within entities[slot].records.
  std::optional<std::size_t> attribute_position(std::size_t slot,
                                                std::string_view attribute_id) const;
};

GameContext make_context(const GameData& game, const Vocabularies& vocab);

struct GameEmbeddings {
  std::vector<ad::Var> records;   // r per record, d_e
  std::vector<ad::Var> entities;  // dynamic embedding per slot, d_h
};

struct Snapshot {
  std::size_t step = 0;
  ad::Var state;
};

struct TrackerState {
  ad::Var h_ent;
  std::map<std::size_t, Snapshot> mentioned;  // entity slot -> last mention
  std::optional<std::size_t> prev_entity;
  std::optional<std::size_t> prev_attribute;  // record index
};

using LmState = ad::LstmState;

struct EntityScores {
  ad::Var logits;                  // one per entity slot
  std::vector<bool> used_snapshot;  // per slot
};

class Model {
 public:
  Model(ModelDims dims, Vocabularies vocab);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelDims& dims() const { return dims_; }
  const Vocabularies& vocab() const { return vocab_; }
  ad::ParameterStore& params() { return params_; }
  const ad::ParameterStore& params() const { return params_; }

  // Xavier-uniform for matrices and tables, zero for biases.
  void initialize(std::uint64_t seed);

  ad::Var embed_record(ad::Graph& g, const GameContext& ctx,
                       std::size_t record) const;
  // Throws when the slot has no records.
  ad::Var dynamic_entity_embedding(ad::Graph& g, const GameContext& ctx,
                                   const std::vector<ad::Var>& records,
                                   std::size_t slot) const;
  GameEmbeddings embed_game(ad::Graph& g, const GameContext& ctx) const;

  std::pair<LmState, TrackerState> init_states(ad::Graph& g,
                                               const GameEmbeddings& emb) const;

  // Logit of p(Z = 1).
  ad::Var transition_logit(const LmState& lm, const TrackerState& tr) const;
  ad::Var p_transition(const LmState& lm, const TrackerState& tr) const;

  EntityScores entity_scores(const LmState& lm, const TrackerState& tr,
                             const GameEmbeddings& emb) const;
  TrackerState update_tracker_entity(const TrackerState& tr, std::size_t slot,
                                     const GameEmbeddings& emb) const;

  // Logits over the records of `slot`, in GameContext order.
  ad::Var attribute_scores(const LmState& lm, const TrackerState& tr,
                           const GameContext& ctx, const GameEmbeddings& emb,
                           std::size_t slot) const;
  TrackerState update_tracker_attribute(const TrackerState& tr,
                                        const GameContext& ctx,
                                        const GameEmbeddings& emb,
                                        std::size_t record,
                                        std::size_t step) const;

  // Logit of p(N = 1). Throws unless the pending attribute is numeric.
  ad::Var numeral_logit(const LmState& lm, const TrackerState& tr,
                        const GameContext& ctx) const;
  ad::Var p_numeral(const LmState& lm, const TrackerState& tr,
                    const GameContext& ctx) const;

  // h'. With a writer the writer-aware projection is used; unknown writer
  // names map to the reserved id 0.
  ad::Var context_vector(const LmState& lm, const TrackerState& tr,
                         std::optional<std::size_t> writer = {}) const;
  ad::Var word_logits(ad::Var context) const;
  ad::Var word_distribution(ad::Var context) const;

  LmState advance_lm(const LmState& lm, std::size_t word,
                     ad::Var context) const;
  TrackerState refresh_tracker(const TrackerState& tr) const;

  std::size_t word_id(std::string_view token) const { return vocab_.words.id(token); }
  std::size_t writer_id(std::string_view name) const { return vocab_.writers.id(name); }

 private:
  ad::Parameter& p(const char* name) const;

  ModelDims dims_;
  Vocabularies vocab_;
  mutable ad::ParameterStore params_;
  ad::GruCell gru_entity_;
  ad::GruCell gru_attribute_;
  ad::LstmCell lstm_;
  std::vector<ad::Parameter*> attribute_proj_;  // W^A_a by attribute id
};

// Uniform in +-sqrt(6 / (fan_in + fan_out)); fan_in = cols, fan_out = rows.
ad::Tensor xavier_init(const ad::Shape& shape, std::uint64_t seed);

}  // namespace saltrack
