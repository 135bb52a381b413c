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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "saltrack/annotator.hpp"
#include "saltrack/decoder.hpp"
#include "saltrack/gradcheck.hpp"
#include "saltrack/metrics.hpp"
#include "saltrack/trainer.hpp"

namespace saltrack {
namespace {

constexpr double kGradTolerance = 1e-4;
constexpr double kGradSeconds = 60.0;
constexpr ModelDims kGradDims{3, 4, 2};

constexpr std::uint64_t kOverfitSeed = 7;
constexpr std::size_t kOverfitGames = 10;
constexpr ModelDims kOverfitDims{32, 64, 8};
constexpr std::size_t kMaxEpochs = 500;
constexpr double kMinHeadAccuracy = 0.99;
constexpr double kMinOverfitBleu = 95.0;
constexpr double kOverfitSeconds = 600.0;

constexpr std::size_t kDldPairs = 1000;
constexpr std::size_t kDldMaxLen = 6;
constexpr double kBleuDecimals = 5e-5;  // four decimal places

constexpr double kMinAnnotatorRecovery = 0.99;
constexpr std::size_t kFuzzSequences = 1000;

constexpr std::uint64_t kWriterSeed = 11;
constexpr std::size_t kWriterGames = 5;
constexpr double kMinWriterTokenAccuracy = 0.95;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Shared by criteria 2 and 3.
struct OverfitRun {
  Dataset data;
  std::unique_ptr<Model> model;
  std::vector<GenerationTrace> traces;
  HeadAccuracy accuracy;
  double bleu = 0.0;
  std::size_t epochs = 0;
  double seconds = 0.0;
};

Dataset overfit_corpus(std::uint64_t seed, std::size_t games, std::size_t writers) {
  SynthOptions so;
  so.seed = seed;
  so.n_games = games;
  so.n_players = 8;
  so.n_writers = writers;
  so.every_writer_per_game = writers > 1;
  return synth_corpus(so);
}

TrainConfig overfit_config(bool use_writer) {
  TrainConfig cfg;
  cfg.dims = kOverfitDims;
  cfg.max_epochs = kMaxEpochs;
  cfg.seed = 1;
  cfg.min_word_freq = 1;
  cfg.use_writer = use_writer;
  cfg.stop_at_accuracy = 1.0;
  cfg.select_by_dev_bleu = false;
  return cfg;
}

OverfitRun& overfit() {
  static OverfitRun run = [] {
    OverfitRun r;
    r.data = overfit_corpus(kOverfitSeed, kOverfitGames, 1);
    const auto t0 = Clock::now();
    TrainResult tr = train(r.data, overfit_config(false));
    r.model = std::move(tr.model);
    r.epochs = tr.log.size();
    r.accuracy = teacher_forced_accuracy(*r.model, r.data.train, false);
    std::vector<std::vector<std::string>> cands, refs;
    for (const Document& d : r.data.train) {
      r.traces.push_back(generate(*r.model, d.game));
      cands.push_back(r.traces.back().tokens());
      refs.push_back(d.summary.tokens);
    }
    r.bleu = bleu(cands, refs).score;
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

Outcome gradient_integrity() {
  const auto t0 = Clock::now();
  const GradCheckSuite s = run_gradcheck_suite(1, kGradDims, kGradTolerance);
  const double secs = seconds_since(t0);
  std::string failed;
  for (const auto& c : s.checks) {
    if (!c.report.passed) failed += " " + c.name;
  }
  Outcome o;
  o.pass = s.passed && s.max_rel_error <= kGradTolerance && secs < kGradSeconds;
  o.detail = std::to_string(s.checks.size()) + " checks, max rel err " +
             fmt("%.2e", s.max_rel_error) + ", " + fmt("%.1f s", secs) +
             (failed.empty() ? "" : ", failed:" + failed);
  return o;
}

Outcome overfit_reproduction() {
  const OverfitRun& r = overfit();
  Outcome o;
  o.pass = r.accuracy.min_accuracy() >= kMinHeadAccuracy && r.bleu >= kMinOverfitBleu &&
           r.seconds < kOverfitSeconds && r.epochs <= kMaxEpochs;
  std::ostringstream ss;
  ss << r.epochs << " epochs, head accuracy";
  for (std::size_t h = 0; h < kNumHeads; ++h) {
    ss << ' ' << head_name(h) << '=' << fmt("%.4f", r.accuracy.accuracy(h));
  }
  ss << ", BLEU " << fmt("%.2f", r.bleu) << ", " << fmt("%.1f s", r.seconds);
  o.detail = ss.str();
  return o;
}

Outcome copy_faithfulness() {
  const OverfitRun& r = overfit();
  std::size_t copies = 0, unfaithful = 0;
  std::vector<RelationSeq> decoded, templated;
  std::vector<const GameData*> games;
  for (std::size_t i = 0; i < r.traces.size(); ++i) {
    const GameData& g = r.data.train[i].game;
    for (const TraceStep& s : r.traces[i].steps) {
      if (!s.z) continue;
      ++copies;
      const Record* rec = s.entity && s.attribute ? g.find_record(*s.entity, *s.attribute) : nullptr;
      if (!rec || render_value(*rec, s.n) != s.token) ++unfaithful;
    }
    decoded.push_back(extract_relations(r.traces[i].tokens(), g));
    templated.push_back(extract_relations(template_baseline(g).tokens, g));
    games.push_back(&g);
  }
  const RgResult dec = rg_corpus(decoded, games);
  const RgResult tmpl = rg_corpus(templated, games);
  Outcome o;
  o.pass = copies > 0 && unfaithful == 0 && !tmpl.empty && tmpl.precision == 100.0 &&
           !dec.empty && dec.precision == 100.0;
  o.detail = std::to_string(copies) + " copied tokens, " + std::to_string(unfaithful) +
             " unfaithful; template RG P " + fmt("%.2f", tmpl.precision) + " (" +
             fmt("%.1f", tmpl.count) + "/doc); decoder RG P " + fmt("%.2f", dec.precision) +
             " (" + fmt("%.1f", dec.count) + "/doc)";
  return o;
}

Outcome gold_identities() {
  SynthOptions so;
  so.seed = 5;
  so.n_games = 30;
  so.n_writers = 2;
  const Dataset ds = synth_corpus(so);
  std::vector<EvalItem> items;
  for (const Document& d : ds.train) items.push_back({&d.game, d.summary.tokens, d.summary.tokens});
  const MetricReport m = evaluate(items);
  Outcome o;
  o.pass = m.cs_precision == 100.0 && m.cs_recall == 100.0 && m.cs_f1 == 100.0 &&
           m.co_score == 100.0 && m.bleu == 100.0;
  o.detail = "CS P/R/F1 " + fmt("%.2f", m.cs_precision) + "/" + fmt("%.2f", m.cs_recall) + "/" +
             fmt("%.2f", m.cs_f1) + ", CO " + fmt("%.2f", m.co_score) + ", BLEU " +
             fmt("%.2f", m.bleu) + " over " + std::to_string(m.documents) + " documents";
  return o;
}

std::size_t osa_recursive(const std::vector<int>& a, const std::vector<int>& b, std::size_t i,
                          std::size_t j) {
  if (i == 0) return j;
  if (j == 0) return i;
  std::size_t best = std::min({osa_recursive(a, b, i - 1, j) + 1, osa_recursive(a, b, i, j - 1) + 1,
                               osa_recursive(a, b, i - 1, j - 1) + (a[i - 1] != b[j - 1])});
  if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
    best = std::min(best, osa_recursive(a, b, i - 2, j - 2) + 1);
  }
  return best;
}

Outcome metric_oracles() {
  std::mt19937_64 rng(20240);
  std::size_t mismatches = 0;
  for (std::size_t k = 0; k < kDldPairs; ++k) {
    std::vector<int> a(rng() % (kDldMaxLen + 1)), b(rng() % (kDldMaxLen + 1));
    for (int& x : a) x = static_cast<int>(rng() % 4);
    for (int& x : b) x = static_cast<int>(rng() % 4);
    if (dld(a, b) != osa_recursive(a, b, a.size(), b.size())) ++mismatches;
  }
  auto t = [](const char* s) { return split_tokens(s); };
  // Hand values: identical; p = 1, 3/4, 2/3, 1/2 with BP exp(-0.2); two
  // pooled segments with c = 9, r = 10.
  const double b1 = bleu({t("the cat sat on the mat")}, {t("the cat sat on the mat")}).score;
  const double b2 = bleu({t("the cat sat on mat")}, {t("the cat sat on the mat")}).score;
  const double b3 =
      bleu({t("a b c d"), t("x y z w v")}, {t("a b c d e"), t("x y z w v")}).score;
  const bool bleu_ok = std::abs(b1 - 100.0) < kBleuDecimals &&
                       std::abs(b2 - 57.8930) < kBleuDecimals &&
                       std::abs(b3 - 89.4839) < kBleuDecimals;
  Outcome o;
  o.pass = mismatches == 0 && bleu_ok;
  o.detail = std::to_string(mismatches) + " dld mismatches in " + std::to_string(kDldPairs) +
             " pairs; BLEU " + fmt("%.4f", b1) + ", " + fmt("%.4f", b2) + ", " + fmt("%.4f", b3);
  return o;
}

Outcome annotator_soundness() {
  std::vector<Document> docs;
  for (std::size_t writers : {1, 2}) {
    SynthOptions so;
    so.seed = 100 + writers;
    so.n_games = 50;
    so.n_writers = writers;
    for (Document& d : synth_corpus(so).train) docs.push_back(std::move(d));
  }
  const std::size_t n_synth = docs.size();
  for (std::size_t i = 0; i < n_synth; i += 2) {
    docs.push_back({docs[i].game, template_baseline(docs[i].game)});
  }
  std::size_t positions = 0, recovered = 0, copies = 0, unsound = 0;
  for (const Document& d : docs) {
    const LabeledSummary s = annotate(d.game, d.summary.tokens);
    for (std::size_t t = 0; t < s.size(); ++t) {
      ++positions;
      recovered += s.z[t] == d.summary.z[t] && s.e[t] == d.summary.e[t] &&
                   s.a[t] == d.summary.a[t] && s.n[t] == d.summary.n[t];
      if (!s.z[t]) continue;
      ++copies;
      const Record* rec = d.game.find_record(*s.e[t], *s.a[t]);
      if (!rec || render_value(*rec, s.n[t]) != s.tokens[t]) ++unsound;
    }
  }
  const double rate = static_cast<double>(recovered) / static_cast<double>(positions);
  Outcome o;
  o.pass = rate >= kMinAnnotatorRecovery && unsound == 0;
  o.detail = fmt("%.4f", rate) + " of " + std::to_string(positions) + " positions recovered over " +
             std::to_string(docs.size()) + " summaries; " + std::to_string(unsound) + " unsound of " +
             std::to_string(copies) + " Z=1 labels";
  return o;
}

std::vector<double> values(ad::Var v) { return {v.value().begin(), v.value().end()}; }

Outcome tracker_invariants() {
  std::vector<Document> docs = {testing::parker_document()};
  Model model({4, 6, 2}, testing::vocab_for(docs));
  model.initialize(17);
  const GameData& game = docs[0].game;
  const GameContext ctx = make_context(game, model.vocab());
  auto& store = model.params();
  const ad::GruCell gru_e = ad::GruCell::bind(store, "gru_e");
  std::mt19937_64 rng(31337);
  std::size_t steps = 0, repeats = 0, snapshot_steps = 0;
  std::size_t monotone_fail = 0, repeat_fail = 0, path_fail = 0;
  for (std::size_t seq = 0; seq < kFuzzSequences; ++seq) {
    ad::Graph g;
    const GameEmbeddings emb = model.embed_game(g, ctx);
    auto [lm, tr] = model.init_states(g, emb);
    std::set<std::size_t> seen;  // maintained independently of the tracker
    const std::size_t len = 1 + rng() % 30;
    for (std::size_t t = 0; t < len; ++t) {
      ++steps;
      const std::set<std::size_t> before_keys = [&] {
        std::set<std::size_t> k;
        for (const auto& [slot, snap] : tr.mentioned) k.insert(slot);
        return k;
      }();
      const std::uint64_t op = rng() % 4;
      if (op == 3) {
        tr = model.refresh_tracker(tr);
      } else {
        // Bias towards re-mentions so repeats and snapshots are exercised.
        std::size_t slot = rng() % ctx.entities.size();
        if (tr.prev_entity && rng() % 3 == 0) slot = *tr.prev_entity;
        const EntityScores sc = model.entity_scores(lm, tr, emb);
        for (std::size_t s = 0; s < ctx.entities.size(); ++s) {
          if (sc.used_snapshot[s] != (seen.count(s) > 0)) ++path_fail;
        }
        const bool repeat = tr.prev_entity == slot;
        const std::vector<double> h_before = values(tr.h_ent);
        TrackerState next = model.update_tracker_entity(tr, slot, emb);
        if (repeat) {
          ++repeats;
          if (values(next.h_ent) != h_before) ++repeat_fail;
        } else {
          // Expected input: projected snapshot for seen entities, the entity
          // embedding otherwise.
          ad::Var x = seen.count(slot)
                          ? ad::affine(g.param(store.get("snap.W")), g.param(store.get("snap.b_")),
                                       tr.mentioned.at(slot).state)
                          : emb.entities[slot];
          if (seen.count(slot)) ++snapshot_steps;
          if (values(gru_e.step(x, tr.h_ent)) != values(next.h_ent)) ++path_fail;
        }
        tr = next;
        seen.insert(slot);
        if (op >= 1) {
          const auto& recs = ctx.entities[slot].records;
          tr = model.update_tracker_attribute(tr, ctx, emb, recs[rng() % recs.size()], t);
        }
      }
      for (std::size_t k : before_keys) {
        if (!tr.mentioned.count(k)) ++monotone_fail;
      }
      if (tr.mentioned.size() != seen.size()) ++monotone_fail;
    }
  }
  Outcome o;
  o.pass = monotone_fail == 0 && repeat_fail == 0 && path_fail == 0 && repeats > 0 &&
           snapshot_steps > 0;
  o.detail = std::to_string(kFuzzSequences) + " sequences, " + std::to_string(steps) + " steps (" +
             std::to_string(repeats) + " repeats, " + std::to_string(snapshot_steps) +
             " snapshot re-mentions); violations: monotone " + std::to_string(monotone_fail) +
             ", repeat " + std::to_string(repeat_fail) + ", path " + std::to_string(path_fail);
  return o;
}

RelationSeq relations_of(const GameData& g, const std::string& text) {
  return extract_relations(split_tokens(text), g);
}

Outcome duplicate_machinery() {
  const GameData g = testing::bucks_knicks();
  // Distinct cued facts; each sentence yields exactly one relation.
  const std::vector<std::string> facts = {
      "Jabari Parker scored 15 points .",        "Greg Monroe grabbed nine rebounds .",
      "Malcolm Brogdon handed out eight assists .", "Carmelo Anthony scored 30 points .",
      "Giannis Antetokounmpo grabbed 13 rebounds .", "Derrick Rose handed out four assists ."};
  // Per-document construction: (duplicated facts, singleton facts, times repeated).
  struct Spec {
    std::size_t dup;
    std::size_t single;
    std::size_t reps;
  };
  const std::vector<Spec> specs = {{0, 3, 2}, {0, 0, 2}, {1, 2, 2}, {1, 0, 4}, {2, 1, 2},
                                   {2, 2, 3}, {3, 0, 2}, {4, 1, 2}, {5, 1, 3}, {0, 6, 2}};
  std::array<std::size_t, 4> expected{};
  std::vector<RelationSeq> seqs;
  std::size_t extraction_errors = 0;
  for (const Spec& s : specs) {
    std::string text;
    for (std::size_t r = 0; r < s.reps; ++r) {
      for (std::size_t k = 0; k < s.dup; ++k) text += facts[k] + " ";
    }
    for (std::size_t k = s.dup; k < s.dup + s.single && k < facts.size(); ++k) text += facts[k] + " ";
    const RelationSeq rel = relations_of(g, text);
    const std::size_t n_rel = s.dup * s.reps + std::min(s.single, facts.size() - s.dup);
    if (rel.size() != n_rel) ++extraction_errors;
    seqs.push_back(rel);
    ++expected[std::min<std::size_t>(s.dup, 3)];
  }
  const DuplicateReport r = duplicate_ratio(seqs);
  std::size_t with_dup = 0;
  for (const Spec& s : specs) with_dup += s.dup > 0;
  const double want_ratio = 100.0 * static_cast<double>(with_dup) / static_cast<double>(specs.size());
  Outcome o;
  o.pass = extraction_errors == 0 && r.histogram == expected && r.ratio == want_ratio;
  o.detail = "histogram [" + std::to_string(r.histogram[0]) + ", " + std::to_string(r.histogram[1]) +
             ", " + std::to_string(r.histogram[2]) + ", " + std::to_string(r.histogram[3]) +
             "] expected [" + std::to_string(expected[0]) + ", " + std::to_string(expected[1]) +
             ", " + std::to_string(expected[2]) + ", " + std::to_string(expected[3]) + "], ratio " +
             fmt("%.1f%%", r.ratio) + ", " + std::to_string(extraction_errors) + " extraction errors";
  return o;
}

double token_accuracy(const std::vector<std::string>& got, const std::vector<std::string>& want) {
  const std::size_t n = std::max(got.size(), want.size());
  if (n == 0) return 1.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) same += got[i] == want[i];
  return static_cast<double>(same) / static_cast<double>(n);
}

Outcome writer_conditioning() {
  const Dataset ds = overfit_corpus(kWriterSeed, kWriterGames, 2);

  // Random writer table: the two writers give different contexts.
  Model fresh(kOverfitDims, build_vocabularies(ds.train, ds.writers, 1));
  fresh.initialize(99);
  bool contexts_differ = false;
  {
    ad::Graph g;
    const GameContext ctx = make_context(ds.train[0].game, fresh.vocab());
    const GameEmbeddings emb = fresh.embed_game(g, ctx);
    auto [lm, tr] = fresh.init_states(g, emb);
    contexts_differ = values(fresh.context_vector(lm, tr, fresh.writer_id(ds.writers.name(1)))) !=
                      values(fresh.context_vector(lm, tr, fresh.writer_id(ds.writers.name(2))));
  }

  const auto t0 = Clock::now();
  const TrainResult tr = train(ds, overfit_config(true));
  const Model& m = *tr.model;
  double own_min = 1.0, own_sum = 0.0, cross_sum = 0.0;
  std::size_t swapped_identical = 0;
  for (const Document& d : ds.train) {
    DecodeOptions own;
    own.writer = m.writer_id(d.game.writer);
    const auto mine = generate(m, d.game, own).tokens();
    const double acc = token_accuracy(mine, d.summary.tokens);
    own_min = std::min(own_min, acc);
    own_sum += acc;
    const std::string& other_name =
        d.game.writer == ds.writers.name(1) ? ds.writers.name(2) : ds.writers.name(1);
    DecodeOptions other;
    other.writer = m.writer_id(other_name);
    const auto theirs = generate(m, d.game, other).tokens();
    cross_sum += token_accuracy(theirs, d.summary.tokens);
    swapped_identical += theirs == mine;
  }
  const double n = static_cast<double>(ds.train.size());
  Outcome o;
  o.pass = contexts_differ && own_min >= kMinWriterTokenAccuracy && swapped_identical == 0;
  o.detail = std::string("h' differs across writers: ") + (contexts_differ ? "yes" : "no") +
             "; own-writer token accuracy mean " + fmt("%.3f", own_sum / n) + " min " +
             fmt("%.3f", own_min) + "; swapped-writer accuracy " + fmt("%.3f", cross_sum / n) +
             ", identical outputs " + std::to_string(swapped_identical) + "; " +
             std::to_string(tr.log.size()) + " epochs, " + fmt("%.1f s", seconds_since(t0));
  return o;
}

}  // namespace
}  // namespace saltrack

int main() {
  using saltrack::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient integrity", saltrack::gradient_integrity},
      {"overfit reproduction", saltrack::overfit_reproduction},
      {"copy faithfulness / RG", saltrack::copy_faithfulness},
      {"gold identities", saltrack::gold_identities},
      {"metric oracles", saltrack::metric_oracles},
      {"annotator soundness", saltrack::annotator_soundness},
      {"tracker invariants", saltrack::tracker_invariants},
      {"duplicate-ratio machinery", saltrack::duplicate_machinery},
      {"writer conditioning", saltrack::writer_conditioning},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
