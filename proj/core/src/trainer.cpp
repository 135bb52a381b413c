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

#include "saltrack/trainer.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "json.hpp"
#include "saltrack/annotator.hpp"
#include "saltrack/decoder.hpp"
#include "saltrack/metrics.hpp"

namespace saltrack {

using ad::Graph;
using ad::Var;

std::string_view head_name(std::size_t head) {
  static constexpr std::string_view kNames[] = {"z", "e", "a", "n", "y"};
  return head < kNumHeads ? kNames[head] : "?";
}

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& o) {
  z_loss += o.z_loss;
  e_loss += o.e_loss;
  a_loss += o.a_loss;
  n_loss += o.n_loss;
  y_loss += o.y_loss;
  for (std::size_t h = 0; h < kNumHeads; ++h) terms[h] += o.terms[h];
  return *this;
}

double HeadAccuracy::accuracy(std::size_t head) const {
  if (total[head] == 0) return 1.0;
  return static_cast<double>(correct[head]) / static_cast<double>(total[head]);
}

double HeadAccuracy::min_accuracy() const {
  double m = 1.0;
  for (std::size_t h = 0; h < kNumHeads; ++h) m = std::min(m, accuracy(h));
  return m;
}

HeadAccuracy& HeadAccuracy::operator+=(const HeadAccuracy& o) {
  for (std::size_t h = 0; h < kNumHeads; ++h) {
    correct[h] += o.correct[h];
    total[h] += o.total[h];
  }
  return *this;
}

namespace {

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

[[noreturn]] void label_error(const GameData& g, std::size_t t, const std::string& what) {
  throw std::invalid_argument(g.game_id + ": label error at position " +
                              std::to_string(t) + ": " + what);
}

}  // namespace

SequenceLoss sequence_loss(Graph& g, const Model& model, const GameData& game,
                           const LabeledSummary& summary, const LossOptions& options) {
  if (!summary.has_labels() || summary.e.size() != summary.size() ||
      summary.a.size() != summary.size() || summary.n.size() != summary.size()) {
    throw std::invalid_argument(game.game_id + ": label sequences do not match tokens");
  }
  const GameContext ctx = make_context(game, model.vocab());
  const GameEmbeddings emb = model.embed_game(g, ctx);
  auto [lm, tr] = model.init_states(g, emb);
  const std::size_t eod = model.word_id(kEodToken);

  SequenceLoss out;
  std::vector<Var> terms;
  auto add = [&](Var term, double& part, std::size_t head, bool correct) {
    terms.push_back(term);
    part += term.scalar();
    ++out.parts.terms[head];
    ++out.accuracy.total[head];
    if (correct) ++out.accuracy.correct[head];
  };

  const std::size_t T = summary.size();
  const std::size_t steps = T + (options.terminal_eod ? 1 : 0);
  for (std::size_t t = 0; t < steps; ++t) {
    const bool final_step = t == T;
    const bool z = !final_step && summary.z[t] != 0;

    const Var zl = model.transition_logit(lm, tr);
    add(ad::nll_sigmoid(zl, z), out.parts.z_loss, kHeadZ, (zl.scalar() >= 0.0) == z);

    if (z) {
      if (!summary.e[t] || !summary.a[t]) label_error(game, t, "Z=1 without entity/attribute");
      const auto slot = ctx.slot_of(*summary.e[t]);
      if (!slot) label_error(game, t, "entity '" + *summary.e[t] + "' not in game");
      const auto pos = ctx.attribute_position(*slot, *summary.a[t]);
      if (!pos) {
        label_error(game, t, "no record (" + *summary.e[t] + ", " + *summary.a[t] + ")");
      }
      const EntityScores es = model.entity_scores(lm, tr, emb);
      add(ad::nll_softmax(es.logits, *slot), out.parts.e_loss, kHeadE,
          argmax(es.logits.value()) == *slot);
      tr = model.update_tracker_entity(tr, *slot, emb);

      const Var al = model.attribute_scores(lm, tr, ctx, emb, *slot);
      add(ad::nll_softmax(al, *pos), out.parts.a_loss, kHeadA,
          argmax(al.value()) == *pos);
      const std::size_t record = ctx.entities[*slot].records[*pos];
      tr = model.update_tracker_attribute(tr, ctx, emb, record, t);

      if (ctx.records[record].is_numeric) {
        if (!summary.n[t]) label_error(game, t, "numeric attribute without N label");
        const bool n = *summary.n[t] != 0;
        const Var nl = model.numeral_logit(lm, tr, ctx);
        add(ad::nll_sigmoid(nl, n), out.parts.n_loss, kHeadN, (nl.scalar() >= 0.0) == n);
      }
    }

    const Var context = model.context_vector(lm, tr, options.writer);
    if (!z) {
      const std::size_t target = final_step ? eod : model.word_id(summary.tokens[t]);
      const Var wl = model.word_logits(context);
      add(ad::nll_softmax(wl, target), out.parts.y_loss, kHeadY,
          argmax(wl.value()) == target);
    }
    if (final_step) break;
    lm = model.advance_lm(lm, model.word_id(summary.tokens[t]), context);
    if (summary.tokens[t] == kPeriodToken) tr = model.refresh_tracker(tr);
  }
  out.total = terms.empty() ? g.constant(ad::Tensor({}, 0.0)) : ad::add_n(terms);
  return out;
}

AmsGrad::AmsGrad(const ad::ParameterStore& store, AmsGradConfig config)
    : config_(config) {
  for (const ad::Parameter* p : store.all()) {
    m_.emplace_back(p->value.shape());
    v_.emplace_back(p->value.shape());
    v_hat_.emplace_back(p->value.shape());
  }
}

void AmsGrad::step(ad::ParameterStore& store) {
  if (store.size() != m_.size()) {
    throw std::invalid_argument("AmsGrad: parameter count changed");
  }
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double lr = config_.learning_rate, eps = config_.epsilon;
  for (std::size_t i = 0; i < store.size(); ++i) {
    ad::Parameter& p = store[i];
    auto theta = p.value.data();
    auto g = p.grad.data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    auto vh = v_hat_[i].data();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * g[k];
      v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
      vh[k] = std::max(vh[k], v[k]);
      theta[k] -= lr * m[k] / (std::sqrt(vh[k]) + eps);
    }
  }
}

double clip_grad_norm(ad::ParameterStore& store, double max_norm) {
  double sq = 0.0;
  for (const ad::Parameter* p : std::as_const(store).all()) {
    for (double g : p->grad.data()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (ad::Parameter* p : store.all()) {
      for (double& g : p->grad.data()) g *= s;
    }
  }
  return norm;
}

TrainingDiverged::TrainingDiverged(std::size_t epoch, std::size_t step,
                                   const std::string& what)
    : std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                         ", step " + std::to_string(step) + ": " + what),
      epoch_(epoch),
      step_(step) {}

std::string epoch_log_json(const EpochLog& log) {
  nlohmann::json j;
  j["epoch"] = log.epoch;
  j["loss"] = {{"z", log.loss.z_loss}, {"e", log.loss.e_loss}, {"a", log.loss.a_loss},
               {"n", log.loss.n_loss}, {"y", log.loss.y_loss},
               {"total", log.loss.total()}};
  if (log.train_accuracy) {
    nlohmann::json acc;
    for (std::size_t h = 0; h < kNumHeads; ++h) {
      acc[std::string(head_name(h))] = log.train_accuracy->accuracy(h);
    }
    j["train_accuracy"] = acc;
  }
  j["dev_bleu"] = log.dev_bleu ? nlohmann::json(*log.dev_bleu) : nlohmann::json();
  j["seconds"] = log.seconds;
  return j.dump();
}

namespace {

std::optional<std::size_t> writer_of(const Model& model, const Document& doc,
                                     bool use_writer) {
  if (!use_writer) return std::nullopt;
  return model.writer_id(doc.game.writer);
}

std::vector<Document> ensure_labels(const std::vector<Document>& docs) {
  std::vector<Document> out = docs;
  for (Document& d : out) {
    if (!d.summary.has_labels()) d.summary = annotate(d.game, d.summary.tokens);
  }
  return out;
}

}  // namespace

HeadAccuracy teacher_forced_accuracy(const Model& model, const std::vector<Document>& docs,
                                     bool use_writer, bool terminal_eod) {
  HeadAccuracy acc;
  for (const Document& doc : docs) {
    Graph g;
    LossOptions opt;
    opt.terminal_eod = terminal_eod;
    opt.writer = writer_of(model, doc, use_writer);
    acc += sequence_loss(g, model, doc.game, doc.summary, opt).accuracy;
  }
  return acc;
}

double decode_bleu(const Model& model, const std::vector<Document>& docs,
                   bool use_writer, std::size_t max_len) {
  std::vector<std::vector<std::string>> cands, refs;
  for (const Document& doc : docs) {
    DecodeOptions opt;
    opt.max_len = max_len;
    opt.writer = writer_of(model, doc, use_writer);
    cands.push_back(generate(model, doc.game, opt).tokens());
    refs.push_back(doc.summary.tokens);
  }
  return bleu(cands, refs).score;
}

TrainResult train_model(Model& model, const std::vector<Document>& train_in,
                        const std::vector<Document>& dev_in, const TrainConfig& config,
                        const EpochCallback& on_epoch) {
  if (!(config.optimizer.learning_rate >= 0.0)) {
    throw std::invalid_argument("learning rate must be non-negative");
  }
  if (config.max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
  const std::vector<Document> train = ensure_labels(train_in);
  const std::vector<Document> dev = ensure_labels(dev_in);
  ad::ParameterStore& store = model.params();
  AmsGrad opt(store, config.optimizer);
  TrainResult result;
  std::vector<ad::Tensor> best;

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    if (config.shuffle) {
      std::mt19937_64 rng(config.seed * 1000003ull + epoch);
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng() % i]);
      }
    }
    EpochLog log;
    log.epoch = epoch;
    for (std::size_t step = 0; step < order.size(); ++step) {
      const Document& doc = train[order[step]];
      store.zero_grad();
      Graph g;
      LossOptions lo;
      lo.terminal_eod = config.terminal_eod;
      lo.writer = writer_of(model, doc, config.use_writer);
      SequenceLoss sl = sequence_loss(g, model, doc.game, doc.summary, lo);
      if (!std::isfinite(sl.total.scalar())) {
        throw TrainingDiverged(epoch, step, "non-finite loss on " + doc.game.game_id);
      }
      g.backward(sl.total);
      const double norm = clip_grad_norm(store, config.clip_norm);
      if (!std::isfinite(norm)) {
        throw TrainingDiverged(epoch, step, "non-finite gradient on " + doc.game.game_id);
      }
      opt.step(store);
      log.loss += sl.parts;
    }
    bool stop = false;
    if (config.stop_at_accuracy) {
      log.train_accuracy =
          teacher_forced_accuracy(model, train, config.use_writer, config.terminal_eod);
      stop = log.train_accuracy->min_accuracy() >= *config.stop_at_accuracy;
    }
    if (config.select_by_dev_bleu && !dev.empty()) {
      log.dev_bleu = decode_bleu(model, dev, config.use_writer, config.dev_max_len);
      if (!result.best_dev_bleu || *log.dev_bleu > *result.best_dev_bleu) {
        result.best_dev_bleu = log.dev_bleu;
        result.best_epoch = epoch;
        best.clear();
        for (const ad::Parameter* p : std::as_const(store).all()) best.push_back(p->value);
      }
    } else {
      result.best_epoch = epoch;
    }
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                      .count();
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
    if (stop) break;
  }
  if (!best.empty()) {
    for (std::size_t i = 0; i < store.size(); ++i) store[i].value = best[i];
  }
  store.zero_grad();
  return result;
}

TrainResult train(const Dataset& data, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  const std::vector<Document> train_docs = ensure_labels(data.train);
  auto model = std::make_unique<Model>(
      config.dims, build_vocabularies(train_docs, data.writers, config.min_word_freq));
  model->initialize(config.seed);
  TrainResult r = train_model(*model, train_docs, data.dev, config, on_epoch);
  r.model = std::move(model);
  return r;
}

}  // namespace saltrack
