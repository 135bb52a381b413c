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

#include "saltrack/metrics.hpp"

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "saltrack/annotator.hpp"
#include "saltrack/numbers.hpp"

namespace saltrack {

RelationSeq extract_relations(const std::vector<std::string>& tokens,
                              const GameData& game) {
  RelationSeq out;
  const auto mentions = find_mentions(game, tokens);
  std::vector<bool> in_span(tokens.size(), false);
  for (const MentionSpan& m : mentions) {
    for (std::size_t k = m.begin; k < m.end; ++k) in_span[k] = true;
  }
  ResolveOptions opt;
  opt.permissive = true;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (in_span[t]) continue;
    auto res = resolve_entity(game, tokens, mentions, t, opt);
    if (!res) continue;
    const int v = *parse_number_token(tokens[t]);
    out.push_back({game.entities[res->entity].id, res->attribute, std::to_string(v)});
  }
  return out;
}

namespace {

bool supported(const Relation& r, const GameData& game) {
  const Record* rec = game.find_record(r.entity, r.attribute);
  return rec && rec->value == r.value;
}

double pct(std::size_t num, std::size_t den) {
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

RgResult rg(const RelationSeq& cand, const GameData& game) {
  return rg_corpus({cand}, {&game});
}

RgResult rg_corpus(const std::vector<RelationSeq>& cands,
                   const std::vector<const GameData*>& games) {
  if (cands.size() != games.size()) {
    throw std::invalid_argument("rg: candidate/game count mismatch");
  }
  RgResult out;
  std::size_t total = 0, correct = 0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (const Relation& r : cands[i]) {
      ++total;
      if (supported(r, *games[i])) ++correct;
    }
  }
  if (total == 0) {
    out.empty = true;
    return out;
  }
  out.count = static_cast<double>(total) / static_cast<double>(cands.size());
  out.precision = pct(correct, total);
  return out;
}

CsResult cs(const RelationSeq& cand, const RelationSeq& ref) {
  const std::set<Relation> c(cand.begin(), cand.end());
  const std::set<Relation> r(ref.begin(), ref.end());
  std::size_t inter = 0;
  for (const Relation& x : c) inter += r.count(x);
  CsResult out;
  out.empty_candidate = c.empty();
  out.empty_reference = r.empty();
  if (!c.empty()) out.precision = pct(inter, c.size());
  if (!r.empty()) out.recall = pct(inter, r.size());
  if (out.precision + out.recall > 0) {
    out.f1 = 2 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

CsResult cs_corpus(const std::vector<RelationSeq>& cands,
                   const std::vector<RelationSeq>& refs) {
  if (cands.size() != refs.size()) {
    throw std::invalid_argument("cs: candidate/reference count mismatch");
  }
  CsResult out;
  if (cands.empty()) return out;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    CsResult one = cs(cands[i], refs[i]);
    out.precision += one.precision;
    out.recall += one.recall;
    out.empty_candidate = out.empty_candidate || one.empty_candidate;
    out.empty_reference = out.empty_reference || one.empty_reference;
  }
  out.precision /= static_cast<double>(cands.size());
  out.recall /= static_cast<double>(cands.size());
  if (out.precision + out.recall > 0) {
    out.f1 = 2 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

double co(const RelationSeq& cand, const RelationSeq& ref, DldMode mode) {
  const std::size_t len = std::max(cand.size(), ref.size());
  if (len == 0) return 100.0;
  const std::size_t d = dld(cand, ref, mode);
  return 100.0 * (1.0 - static_cast<double>(d) / static_cast<double>(len));
}

double co_corpus(const std::vector<RelationSeq>& cands,
                 const std::vector<RelationSeq>& refs, DldMode mode) {
  if (cands.size() != refs.size()) {
    throw std::invalid_argument("co: candidate/reference count mismatch");
  }
  if (cands.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < cands.size(); ++i) sum += co(cands[i], refs[i], mode);
  return sum / static_cast<double>(cands.size());
}

BleuResult bleu(const std::vector<std::vector<std::string>>& candidates,
                const std::vector<std::vector<std::string>>& references) {
  if (candidates.size() != references.size()) {
    throw std::invalid_argument("bleu: candidate/reference count mismatch");
  }
  BleuResult out;
  std::array<std::size_t, 4> matched{}, possible{};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    const auto& r = references[i];
    out.candidate_length += c.size();
    out.reference_length += r.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      std::map<std::vector<std::string>, std::size_t> ref_counts, cand_counts;
      for (std::size_t k = 0; k + n <= r.size(); ++k) {
        ++ref_counts[{r.begin() + static_cast<std::ptrdiff_t>(k),
                      r.begin() + static_cast<std::ptrdiff_t>(k + n)}];
      }
      for (std::size_t k = 0; k + n <= c.size(); ++k) {
        ++cand_counts[{c.begin() + static_cast<std::ptrdiff_t>(k),
                       c.begin() + static_cast<std::ptrdiff_t>(k + n)}];
      }
      for (const auto& [gram, count] : cand_counts) {
        auto it = ref_counts.find(gram);
        matched[n - 1] += it == ref_counts.end() ? 0 : std::min(count, it->second);
        possible[n - 1] += count;
      }
    }
  }
  if (out.candidate_length == 0) {
    out.empty = true;
    return out;
  }
  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 0; n < 4; ++n) {
    out.precisions[n] = possible[n] ? static_cast<double>(matched[n]) /
                                          static_cast<double>(possible[n])
                                    : 0.0;
    if (out.precisions[n] == 0.0) zero = true;
    else log_sum += std::log(out.precisions[n]) / 4.0;
  }
  const double c = static_cast<double>(out.candidate_length);
  const double r = static_cast<double>(out.reference_length);
  out.brevity_penalty = c > r ? 1.0 : std::exp(1.0 - r / c);
  if (!zero) {
    // exp(0) must be exactly 1 so identical corpora score exactly 100.
    out.score = 100.0 * out.brevity_penalty * std::exp(log_sum);
  }
  return out;
}

std::size_t duplicate_count(const RelationSeq& seq) {
  std::map<Relation, std::size_t> counts;
  for (const Relation& r : seq) ++counts[r];
  std::size_t dup = 0;
  for (const auto& [rel, n] : counts) dup += n > 1 ? 1 : 0;
  return dup;
}

DuplicateReport duplicate_ratio(const std::vector<RelationSeq>& seqs) {
  DuplicateReport out;
  std::size_t with_dup = 0;
  for (const RelationSeq& s : seqs) {
    const std::size_t d = duplicate_count(s);
    out.per_summary.push_back(d);
    ++out.histogram[std::min<std::size_t>(d, 3)];
    if (d > 0) ++with_dup;
  }
  if (!seqs.empty()) out.ratio = pct(with_dup, seqs.size());
  return out;
}

MetricReport evaluate(const std::vector<EvalItem>& items, DldMode mode) {
  MetricReport rep;
  rep.documents = items.size();
  std::vector<RelationSeq> cand_rel, ref_rel;
  std::vector<const GameData*> games;
  std::vector<std::vector<std::string>> cands, refs;
  for (const EvalItem& it : items) {
    cand_rel.push_back(extract_relations(it.candidate, *it.game));
    ref_rel.push_back(extract_relations(it.reference, *it.game));
    games.push_back(it.game);
    cands.push_back(it.candidate);
    refs.push_back(it.reference);
  }
  const RgResult g = rg_corpus(cand_rel, games);
  rep.rg_count = g.count;
  rep.rg_precision = g.precision;
  const CsResult c = cs_corpus(cand_rel, ref_rel);
  rep.cs_precision = c.precision;
  rep.cs_recall = c.recall;
  rep.cs_f1 = c.f1;
  rep.co_score = co_corpus(cand_rel, ref_rel, mode);
  rep.bleu = bleu(cands, refs).score;
  const DuplicateReport d = duplicate_ratio(cand_rel);
  rep.duplicate_histogram = d.histogram;
  rep.duplicate_ratio = d.ratio;
  return rep;
}

}  // namespace saltrack
