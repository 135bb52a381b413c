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

#include "saltrack/model.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace saltrack {

using ad::Graph;
using ad::Var;

std::size_t Vocab::add(std::string_view token) {
  std::string key(token);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  index_.emplace(key, tokens_.size());
  tokens_.push_back(std::move(key));
  return tokens_.size() - 1;
}

std::optional<std::size_t> Vocab::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocab::id(std::string_view token) const {
  return find(token).value_or(0);
}

Vocabularies build_vocabularies(const std::vector<Document>& train,
                                const WriterRegistry& writers,
                                std::size_t min_word_freq) {
  Vocabularies v;
  std::map<std::string, std::size_t> freq;  // ordered for stable ids
  std::vector<std::string> first_seen;
  for (const Document& doc : train) {
    for (const Entity& e : doc.game.entities) v.entities.add(e.id);
    for (const Record& r : doc.game.records) {
      v.attributes.add(r.attribute.id);
      v.values.add(r.value);
    }
    for (const std::string& tok : doc.summary.tokens) {
      if (freq[tok]++ == 0) first_seen.push_back(tok);
    }
  }
  v.words.add(kSodToken);
  v.words.add(kEodToken);
  v.words.add(kPeriodToken);
  for (const std::string& tok : first_seen) {
    if (freq[tok] >= min_word_freq) v.words.add(tok);
  }
  for (std::size_t i = 1; i < writers.size(); ++i) v.writers.add(writers.name(i));
  return v;
}

std::optional<std::size_t> GameContext::slot_of(std::string_view entity_id) const {
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (entities[i].entity->id == entity_id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> GameContext::attribute_position(
    std::size_t slot, std::string_view attribute_id) const {
  const auto& recs = entities.at(slot).records;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (records[recs[i]].record->attribute.id == attribute_id) return i;
  }
  return std::nullopt;
}

GameContext make_context(const GameData& game, const Vocabularies& vocab) {
  GameContext ctx;
  ctx.game = &game;
  std::unordered_map<std::string_view, std::size_t> slot;
  for (const Entity& e : game.entities) {
    slot.emplace(e.id, ctx.entities.size());
    ctx.entities.push_back({vocab.entities.id(e.id),
                            e.side == Side::kHome ? 0u : 1u, &e, {}});
  }
  for (const Record& r : game.records) {
    auto it = slot.find(r.entity);
    if (it == slot.end()) {
      throw DataError(game.game_id, r.entity,
                      "record cites undeclared entity '" + r.entity + "'");
    }
    ctx.entities[it->second].records.push_back(ctx.records.size());
    ctx.records.push_back({it->second, vocab.attributes.id(r.attribute.id),
                           vocab.values.id(r.value), r.attribute.is_numeric, &r});
  }
  return ctx;
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

bool is_bias(const std::string& name) {
  auto dot = name.rfind('.');
  std::string_view leaf =
      dot == std::string::npos ? std::string_view(name)
                               : std::string_view(name).substr(dot + 1);
  return leaf.substr(0, 2) == "b_";
}

}  // namespace

ad::Tensor xavier_init(const ad::Shape& shape, std::uint64_t seed) {
  ad::Tensor t(shape);
  const double fan_out = static_cast<double>(t.rows());
  const double fan_in = static_cast<double>(t.cols());
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  std::mt19937_64 rng(seed);
  for (double& v : t.data()) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = (2.0 * u - 1.0) * bound;
  }
  return t;
}

Model::Model(ModelDims dims, Vocabularies vocab)
    : dims_(dims), vocab_(std::move(vocab)) {
  const std::size_t de = dims_.embed, dh = dims_.hidden, ds = dims_.side;
  params_.add("emb.entity", {vocab_.entities.size(), de});
  params_.add("emb.attribute", {vocab_.attributes.size(), de});
  params_.add("emb.value", {vocab_.values.size(), de});
  params_.add("emb.word", {vocab_.words.size(), de});
  params_.add("emb.writer", {vocab_.writers.size(), de});
  params_.add("emb.side", {2, ds});
  params_.add("record.W", {de, 3 * de + ds});
  params_.add("record.b_", {de});
  for (const std::string& a : vocab_.attributes.tokens()) {
    attribute_proj_.push_back(&params_.add("entity.W_A." + a, {dh, de}));
  }
  params_.add("entity.b_", {dh});
  params_.add("lm.sod", {dh});
  params_.add("z.W", {1, 2 * dh});
  params_.add("z.b_", {1});
  params_.add("old.W", {dh, dh});
  params_.add("old.b_", {dh});
  params_.add("new.W", {dh, dh});
  params_.add("new.b_", {dh});
  params_.add("snap.W", {dh, dh});
  params_.add("snap.b_", {dh});
  gru_entity_ = ad::GruCell::create(params_, "gru_e", dh, dh);
  params_.add("attr.W", {de, 2 * dh});
  params_.add("attr.b_", {de});
  gru_attribute_ = ad::GruCell::create(params_, "gru_a", de, dh);
  params_.add("refresh", {de});
  params_.add("n.W", {1, 2 * dh});
  params_.add("n.b_", {1});
  params_.add("h.W", {dh, 2 * dh});
  params_.add("h.b_", {dh});
  params_.add("hw.W", {dh, 2 * dh + de});
  params_.add("hw.b_", {dh});
  params_.add("y.W", {vocab_.words.size(), dh});
  params_.add("y.b_", {vocab_.words.size()});
  lstm_ = ad::LstmCell::create(params_, "lstm", de + dh, dh);
}

void Model::initialize(std::uint64_t seed) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    ad::Parameter& prm = params_[i];
    if (is_bias(prm.name)) {
      prm.value.fill(0.0);
    } else {
      prm.value = xavier_init(prm.value.shape(), mix(seed ^ mix(i)));
    }
    prm.zero_grad();
  }
}

ad::Parameter& Model::p(const char* name) const { return params_.get(name); }

Var Model::embed_record(Graph& g, const GameContext& ctx, std::size_t record) const {
  const auto& r = ctx.records.at(record);
  const auto& e = ctx.entities[r.entity_slot];
  Var x = ad::concat({g.lookup(p("emb.entity"), e.vocab_id),
                      g.lookup(p("emb.attribute"), r.attribute),
                      g.lookup(p("emb.value"), r.value),
                      g.lookup(p("emb.side"), e.side)});
  return ad::tanh(ad::affine(g.param(p("record.W")), g.param(p("record.b_")), x));
}

Var Model::dynamic_entity_embedding(Graph& g, const GameContext& ctx,
                                    const std::vector<Var>& records,
                                    std::size_t slot) const {
  const auto& recs = ctx.entities.at(slot).records;
  if (recs.empty()) {
    throw std::invalid_argument("entity '" + ctx.entities[slot].entity->id +
                                "' has no records");
  }
  std::vector<Var> terms;
  terms.reserve(recs.size() + 1);
  for (std::size_t ri : recs) {
    terms.push_back(ad::matvec(g.param(*attribute_proj_[ctx.records[ri].attribute]),
                               records[ri]));
  }
  terms.push_back(g.param(p("entity.b_")));
  return ad::tanh(ad::add_n(terms));
}

GameEmbeddings Model::embed_game(Graph& g, const GameContext& ctx) const {
  GameEmbeddings emb;
  emb.records.reserve(ctx.records.size());
  for (std::size_t i = 0; i < ctx.records.size(); ++i) {
    emb.records.push_back(embed_record(g, ctx, i));
  }
  for (std::size_t s = 0; s < ctx.entities.size(); ++s) {
    emb.entities.push_back(dynamic_entity_embedding(g, ctx, emb.records, s));
  }
  return emb;
}

std::pair<LmState, TrackerState> Model::init_states(Graph& g,
                                                    const GameEmbeddings& emb) const {
  if (emb.entities.empty()) throw std::invalid_argument("game has no entities");
  LmState lm{g.param(p("lm.sod")), g.constant(ad::Tensor({dims_.hidden}))};
  TrackerState tr;
  tr.h_ent = ad::mean_n(emb.entities);
  return {lm, tr};
}

Var Model::transition_logit(const LmState& lm, const TrackerState& tr) const {
  Graph& g = lm.h.graph();
  return ad::affine(g.param(p("z.W")), g.param(p("z.b_")), ad::concat({lm.h, tr.h_ent}));
}

Var Model::p_transition(const LmState& lm, const TrackerState& tr) const {
  return ad::sigmoid(transition_logit(lm, tr));
}

EntityScores Model::entity_scores(const LmState& lm, const TrackerState& tr,
                                  const GameEmbeddings& emb) const {
  Graph& g = lm.h.graph();
  EntityScores out;
  Var q_old, q_new;
  std::vector<Var> scores;
  for (std::size_t s = 0; s < emb.entities.size(); ++s) {
    auto it = tr.mentioned.find(s);
    const bool seen = it != tr.mentioned.end();
    out.used_snapshot.push_back(seen);
    if (seen) {
      if (!q_old.valid()) q_old = ad::affine(g.param(p("old.W")), g.param(p("old.b_")), lm.h);
      scores.push_back(ad::dot(it->second.state, q_old));
    } else {
      if (!q_new.valid()) q_new = ad::affine(g.param(p("new.W")), g.param(p("new.b_")), lm.h);
      scores.push_back(ad::dot(emb.entities[s], q_new));
    }
  }
  out.logits = ad::concat(scores);
  return out;
}

TrackerState Model::update_tracker_entity(const TrackerState& tr, std::size_t slot,
                                          const GameEmbeddings& emb) const {
  if (slot >= emb.entities.size()) throw std::out_of_range("entity slot out of range");
  if (tr.prev_entity == slot) return tr;
  Graph& g = tr.h_ent.graph();
  TrackerState next = tr;
  auto it = tr.mentioned.find(slot);
  if (it == tr.mentioned.end()) {
    next.h_ent = gru_entity_.step(emb.entities[slot], tr.h_ent);
    next.mentioned[slot] = {0, next.h_ent};
  } else {
    Var x = ad::affine(g.param(p("snap.W")), g.param(p("snap.b_")), it->second.state);
    next.h_ent = gru_entity_.step(x, tr.h_ent);
  }
  next.prev_entity = slot;
  next.prev_attribute.reset();
  return next;
}

Var Model::attribute_scores(const LmState& lm, const TrackerState& tr,
                            const GameContext& ctx, const GameEmbeddings& emb,
                            std::size_t slot) const {
  Graph& g = lm.h.graph();
  Var q = ad::affine(g.param(p("attr.W")), g.param(p("attr.b_")),
                     ad::concat({lm.h, tr.h_ent}));
  std::vector<Var> scores;
  for (std::size_t ri : ctx.entities.at(slot).records) {
    scores.push_back(ad::dot(emb.records[ri], q));
  }
  if (scores.empty()) throw std::invalid_argument("entity has no records");
  return ad::concat(scores);
}

TrackerState Model::update_tracker_attribute(const TrackerState& tr,
                                             const GameContext& ctx,
                                             const GameEmbeddings& emb,
                                             std::size_t record,
                                             std::size_t step) const {
  const std::size_t slot = ctx.records.at(record).entity_slot;
  TrackerState next = tr;
  next.h_ent = gru_attribute_.step(emb.records[record], tr.h_ent);
  next.mentioned[slot] = {step, next.h_ent};
  next.prev_entity = slot;
  next.prev_attribute = record;
  return next;
}

Var Model::numeral_logit(const LmState& lm, const TrackerState& tr,
                         const GameContext& ctx) const {
  if (!tr.prev_attribute || !ctx.records.at(*tr.prev_attribute).is_numeric) {
    throw std::logic_error("p_numeral: pending attribute is not numeric");
  }
  Graph& g = lm.h.graph();
  return ad::affine(g.param(p("n.W")), g.param(p("n.b_")), ad::concat({lm.h, tr.h_ent}));
}

Var Model::p_numeral(const LmState& lm, const TrackerState& tr,
                     const GameContext& ctx) const {
  return ad::sigmoid(numeral_logit(lm, tr, ctx));
}

Var Model::context_vector(const LmState& lm, const TrackerState& tr,
                          std::optional<std::size_t> writer) const {
  Graph& g = lm.h.graph();
  if (!writer) {
    return ad::tanh(ad::affine(g.param(p("h.W")), g.param(p("h.b_")),
                               ad::concat({lm.h, tr.h_ent})));
  }
  const std::size_t w = *writer < vocab_.writers.size() ? *writer : 0;
  Var x = ad::concat({lm.h, tr.h_ent, g.lookup(p("emb.writer"), w)});
  return ad::tanh(ad::affine(g.param(p("hw.W")), g.param(p("hw.b_")), x));
}

Var Model::word_logits(Var context) const {
  Graph& g = context.graph();
  return ad::affine(g.param(p("y.W")), g.param(p("y.b_")), context);
}

Var Model::word_distribution(Var context) const {
  return ad::softmax(word_logits(context));
}

LmState Model::advance_lm(const LmState& lm, std::size_t word, Var context) const {
  Graph& g = lm.h.graph();
  const std::size_t w = word < vocab_.words.size() ? word : 0;
  return lstm_.step(ad::concat({g.lookup(p("emb.word"), w), context}), lm);
}

TrackerState Model::refresh_tracker(const TrackerState& tr) const {
  Graph& g = tr.h_ent.graph();
  TrackerState next = tr;
  next.h_ent = gru_attribute_.step(g.param(p("refresh")), tr.h_ent);
  return next;
}

}  // namespace saltrack
