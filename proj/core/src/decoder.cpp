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

#include "saltrack/decoder.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"
#include "saltrack/numbers.hpp"

namespace saltrack {

namespace {

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

[[noreturn]] void forced_error(std::size_t t, const std::string& what) {
  throw std::invalid_argument("forced decisions, position " + std::to_string(t) +
                              ": " + what);
}

}  // namespace

std::vector<std::string> GenerationTrace::tokens() const {
  std::vector<std::string> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.token);
  return out;
}

LabeledSummary GenerationTrace::labels() const {
  LabeledSummary out;
  for (const auto& s : steps) {
    out.tokens.push_back(s.token);
    out.z.push_back(s.z);
    out.e.push_back(s.entity);
    out.a.push_back(s.attribute);
    out.n.push_back(s.n);
  }
  return out;
}

std::string render_value(const Record& record, std::optional<std::uint8_t> n) {
  if (!record.attribute.is_numeric) return record.value;
  const auto v = record.numeric_value();
  if (!v) return record.value;
  return render_number(*v, n.value_or(0) == 1);
}

GenerationTrace generate(const Model& model, const GameData& game,
                         const DecodeOptions& options) {
  const LabeledSummary* forced = options.forced;
  if (forced && !forced->has_labels()) {
    throw std::invalid_argument("forced decisions need labels");
  }
  GenerationTrace trace;
  trace.game_id = game.game_id;
  ad::Graph g;
  const GameContext ctx = make_context(game, model.vocab());
  const GameEmbeddings emb = model.embed_game(g, ctx);
  auto [lm, tr] = model.init_states(g, emb);
  const std::size_t eod = model.word_id(kEodToken);

  for (std::size_t t = 0;; ++t) {
    if (forced && t >= forced->size()) break;
    if (t >= options.max_len) {
      trace.truncated = true;
      break;
    }
    TraceStep step;
    step.p_z = model.p_transition(lm, tr).scalar();
    step.z = forced ? forced->z[t] : static_cast<std::uint8_t>(step.p_z >= 0.5);

    if (step.z) {
      const EntityScores es = model.entity_scores(lm, tr, emb);
      const ad::Var pe = ad::softmax(es.logits);
      std::size_t slot = argmax(pe.value());
      if (forced) {
        auto s = forced->e[t] ? ctx.slot_of(*forced->e[t]) : std::nullopt;
        if (!s) forced_error(t, "entity not in game");
        slot = *s;
      }
      step.entity = ctx.entities[slot].entity->id;
      step.p_entity = pe.value()[slot];
      step.used_snapshot = es.used_snapshot[slot];
      tr = model.update_tracker_entity(tr, slot, emb);

      const ad::Var pa = ad::softmax(model.attribute_scores(lm, tr, ctx, emb, slot));
      std::size_t pos = argmax(pa.value());
      if (forced) {
        auto p = forced->a[t] ? ctx.attribute_position(slot, *forced->a[t]) : std::nullopt;
        if (!p) forced_error(t, "attribute has no record for the entity");
        pos = *p;
      }
      const std::size_t record = ctx.entities[slot].records[pos];
      const Record& rec = *ctx.records[record].record;
      step.attribute = rec.attribute.id;
      step.p_attribute = pa.value()[pos];
      tr = model.update_tracker_attribute(tr, ctx, emb, record, t);

      if (rec.attribute.is_numeric) {
        step.p_n = model.p_numeral(lm, tr, ctx).scalar();
        step.n = forced ? forced->n[t].value_or(0)
                        : static_cast<std::uint8_t>(*step.p_n >= 0.5);
      }
      step.token = render_value(rec, step.n);
    }

    const ad::Var context = model.context_vector(lm, tr, options.writer);
    if (!step.z) {
      const ad::Var py = model.word_distribution(context);
      std::size_t w = argmax(py.value());
      if (forced) {
        step.token = forced->tokens[t];
        w = model.word_id(step.token);
      } else {
        if (w == eod) {
          trace.ended = true;
          break;
        }
        step.token = model.vocab().words.token(w);
      }
      step.p_word = py.value()[w];
    }
    lm = model.advance_lm(lm, model.word_id(step.token), context);
    if (step.token == kPeriodToken) {
      tr = model.refresh_tracker(tr);
      step.refreshed = true;
    }
    step.mentioned = tr.mentioned.size();
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

LabeledSummary template_baseline(const GameData& game, std::size_t max_players) {
  LabeledSummary s;
  auto push = [&s](std::string tok, std::uint8_t z, std::optional<std::string> e,
                   std::optional<std::string> a, std::optional<std::uint8_t> n) {
    s.tokens.push_back(std::move(tok));
    s.z.push_back(z);
    s.e.push_back(std::move(e));
    s.a.push_back(std::move(a));
    s.n.push_back(n);
  };
  auto word = [&](std::string w) { push(std::move(w), 0, {}, {}, {}); };
  auto name = [&](const Entity& e) {
    for (const Record* r : game.records_of(e.id)) {
      if (!r->attribute.is_numeric) push(r->value, 1, e.id, r->attribute.id, {});
    }
  };
  auto number = [&](const Entity& e, const Record& r) {
    push(render_value(r, 0), 1, e.id, r.attribute.id, 0);
  };

  for (Side side : {Side::kHome, Side::kVisitor}) {
    const Entity* team = game.team(side);
    if (!team) continue;
    const Record* wins = game.find_record(team->id, "TEAM-WINS");
    const Record* losses = game.find_record(team->id, "TEAM-LOSSES");
    const Record* pts = game.find_record(team->id, "TEAM-PTS");
    if (!pts) continue;
    word("The");
    name(*team);
    if (wins && losses) {
      word("(");
      number(*team, *wins);
      word("-");
      number(*team, *losses);
      word(")");
    }
    word("scored");
    number(*team, *pts);
    word("points");
    word(".");
  }

  std::vector<std::pair<int, const Entity*>> players;
  for (const Entity& e : game.entities) {
    if (e.kind != EntityKind::kPlayer) continue;
    const Record* pts = game.find_record(e.id, "PTS");
    if (pts && pts->numeric_value()) players.emplace_back(*pts->numeric_value(), &e);
  }
  std::stable_sort(players.begin(), players.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  if (players.size() > max_players) players.resize(max_players);
  for (const auto& [points, e] : players) {
    name(*e);
    word("scored");
    number(*e, *game.find_record(e->id, "PTS"));
    word("points");
    const Record* reb = game.find_record(e->id, "REB");
    const Record* ast = game.find_record(e->id, "AST");
    if (reb && ast) {
      word(",");
      number(*e, *reb);
      word("rebounds");
      word("and");
      number(*e, *ast);
      word("assists");
    } else if (reb || ast) {
      word("and");
      number(*e, reb ? *reb : *ast);
      word(reb ? "rebounds" : "assists");
    }
    word(".");
  }
  return s;
}

std::string trace_to_json(const GenerationTrace& trace, int indent) {
  nlohmann::json j;
  j["game_id"] = trace.game_id;
  j["ended"] = trace.ended;
  j["truncated"] = trace.truncated;
  j["tokens"] = trace.tokens();
  auto steps = nlohmann::json::array();
  for (const TraceStep& s : trace.steps) {
    nlohmann::json o;
    o["token"] = s.token;
    o["z"] = s.z;
    o["p_z"] = s.p_z;
    if (s.entity) {
      o["entity"] = *s.entity;
      o["p_entity"] = *s.p_entity;
      o["used_snapshot"] = s.used_snapshot;
      o["attribute"] = *s.attribute;
      o["p_attribute"] = *s.p_attribute;
    }
    if (s.n) {
      o["n"] = *s.n;
      o["p_n"] = *s.p_n;
    }
    if (s.p_word) o["p_word"] = *s.p_word;
    if (s.refreshed) o["refreshed"] = true;
    o["mentioned"] = s.mentioned;
    steps.push_back(std::move(o));
  }
  j["steps"] = std::move(steps);
  return j.dump(indent);
}

}  // namespace saltrack
