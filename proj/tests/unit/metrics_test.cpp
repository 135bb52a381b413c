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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "fixtures.hpp"
#include "saltrack/metrics.hpp"

namespace saltrack {
namespace {

using Seq = std::vector<char>;

// Direct recursion over prefixes with adjacent transpositions.
std::size_t osa_recursive(const Seq& a, const Seq& b, std::size_t i, std::size_t j) {
  if (i == 0) return j;
  if (j == 0) return i;
  std::size_t best = std::min({osa_recursive(a, b, i - 1, j) + 1,
                               osa_recursive(a, b, i, j - 1) + 1,
                               osa_recursive(a, b, i - 1, j - 1) + (a[i - 1] != b[j - 1])});
  if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
    best = std::min(best, osa_recursive(a, b, i - 2, j - 2) + 1);
  }
  return best;
}

// Every string reachable from s with at most k unit edits.
std::vector<std::unordered_set<std::string>> balls(const std::string& s, std::size_t k,
                                                   const std::string& alphabet) {
  std::vector<std::unordered_set<std::string>> out{{s}};
  std::unordered_set<std::string> seen{s};
  for (std::size_t d = 1; d <= k; ++d) {
    std::unordered_set<std::string> next;
    for (const std::string& x : out.back()) {
      auto push = [&](std::string y) {
        if (seen.insert(y).second) next.insert(std::move(y));
      };
      for (std::size_t i = 0; i <= x.size(); ++i) {
        for (char c : alphabet) push(x.substr(0, i) + c + x.substr(i));
      }
      for (std::size_t i = 0; i < x.size(); ++i) {
        push(x.substr(0, i) + x.substr(i + 1));
        for (char c : alphabet) {
          std::string y = x;
          y[i] = c;
          push(y);
        }
        if (i + 1 < x.size()) {
          std::string y = x;
          std::swap(y[i], y[i + 1]);
          push(y);
        }
      }
    }
    out.push_back(std::move(next));
  }
  return out;
}

// Shortest edit path by meeting two breadth-first balls.
std::size_t true_distance(const std::string& a, const std::string& b) {
  const std::string alphabet = "abcd";
  const std::size_t half = (std::max(a.size(), b.size()) + 1) / 2;
  const auto ba = balls(a, half, alphabet);
  const auto bb = balls(b, half, alphabet);
  std::size_t best = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < ba.size(); ++i) {
    for (std::size_t j = 0; j < bb.size() && i + j < best; ++j) {
      for (const auto& x : ba[i]) {
        if (bb[j].count(x)) {
          best = std::min(best, i + j);
          break;
        }
      }
    }
  }
  return best;
}

Seq random_seq(std::mt19937_64& rng, std::size_t max_len) {
  Seq s(rng() % (max_len + 1));
  for (char& c : s) c = static_cast<char>('a' + rng() % 4);
  return s;
}

TEST(Dld, ClassicCases) {
  auto v = [](const char* s) { return Seq(s, s + std::char_traits<char>::length(s)); };
  EXPECT_EQ(dld(v("kitten"), v("sitting")), 3u);
  EXPECT_EQ(dld(v("ab"), v("ba")), 1u);
  EXPECT_EQ(dld(v("ca"), v("abc")), 3u);
  EXPECT_EQ(dld(v("ca"), v("abc"), DldMode::kUnrestricted), 2u);
  EXPECT_EQ(dld(v(""), v("abc")), 3u);
  EXPECT_EQ(dld(v("abc"), v("abc"), DldMode::kUnrestricted), 0u);
}

TEST(Dld, OsaMatchesRecursionOnRandomPairs) {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 1000; ++k) {
    const Seq a = random_seq(rng, 6), b = random_seq(rng, 6);
    ASSERT_EQ(dld(a, b), osa_recursive(a, b, a.size(), b.size()))
        << std::string(a.begin(), a.end()) << " / " << std::string(b.begin(), b.end());
  }
}

TEST(Dld, UnrestrictedMatchesShortestEditPath) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 300; ++k) {
    const Seq a = random_seq(rng, 4), b = random_seq(rng, 4);
    const std::string sa(a.begin(), a.end()), sb(b.begin(), b.end());
    ASSERT_EQ(dld(a, b, DldMode::kUnrestricted), true_distance(sa, sb)) << sa << " / " << sb;
  }
}

TEST(Dld, MetricProperties) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 300; ++k) {
    const Seq a = random_seq(rng, 6), b = random_seq(rng, 6), c = random_seq(rng, 6);
    for (DldMode m : {DldMode::kOptimalStringAlignment, DldMode::kUnrestricted}) {
      EXPECT_EQ(dld(a, b, m), dld(b, a, m));
      EXPECT_LE(dld(a, b, m), std::max(a.size(), b.size()));
      EXPECT_LE(dld(a, b, DldMode::kUnrestricted), dld(a, b));
      if (m == DldMode::kUnrestricted) EXPECT_LE(dld(a, c, m), dld(a, b, m) + dld(b, c, m));
    }
  }
}

std::vector<std::string> toks(const char* s) { return split_tokens(s); }

TEST(Bleu, HandComputedCases) {
  // Identical: every precision 1, no brevity penalty.
  EXPECT_EQ(bleu({toks("the cat sat on the mat")}, {toks("the cat sat on the mat")}).score, 100.0);
  // p = 5/5, 3/4, 2/3, 1/2 -> geometric mean 0.25^(1/4); BP = exp(1 - 6/5).
  const BleuResult short_one = bleu({toks("the cat sat on mat")}, {toks("the cat sat on the mat")});
  EXPECT_NEAR(short_one.score, 57.8930, 5e-5);
  EXPECT_NEAR(short_one.precisions[1], 0.75, 1e-15);
  // Two segments pooled: all n-grams match, c = 9, r = 10.
  const BleuResult pooled =
      bleu({toks("a b c d"), toks("x y z w v")}, {toks("a b c d e"), toks("x y z w v")});
  EXPECT_NEAR(pooled.score, 89.4839, 5e-5);
  EXPECT_EQ(pooled.candidate_length, 9u);
  EXPECT_EQ(pooled.reference_length, 10u);
}

TEST(Bleu, ClippingAndZeroPrecision) {
  const BleuResult r = bleu({toks("the the the the")}, {toks("the cat")});
  EXPECT_DOUBLE_EQ(r.precisions[0], 0.25);
  EXPECT_EQ(r.score, 0.0);
  EXPECT_TRUE(bleu({{}}, {toks("a")}).empty);
  EXPECT_THROW(bleu({toks("a")}, {}), std::invalid_argument);
}

TEST(Bleu, LongerCandidateHasNoPenalty) {
  const BleuResult r = bleu({toks("a b c d e f")}, {toks("a b c d e")});
  EXPECT_EQ(r.brevity_penalty, 1.0);
}

Relation rel(const char* e, const char* a, const char* v) { return {e, a, v}; }

TEST(Extraction, RunningExampleReference) {
  const GameData g = testing::bucks_knicks();
  const RelationSeq r = extract_relations(testing::parker_sentence(), g);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], rel(testing::kParker, "PTS", "15"));
  EXPECT_EQ(r[1], rel(testing::kParker, "REB", "4"));
  EXPECT_EQ(r[2], rel(testing::kParker, "AST", "3"));
}

TEST(Extraction, KeepsUnsupportedCuedValues) {
  const GameData g = testing::bucks_knicks();
  const RelationSeq r = extract_relations(split_tokens("Parker scored 40 points ."), g);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].value, "40");
  const RgResult res = rg(r, g);
  EXPECT_EQ(res.precision, 0.0);
  EXPECT_EQ(res.count, 1.0);
}

TEST(RelationGeneration, PrecisionAndCount) {
  const GameData g = testing::bucks_knicks();
  const RelationSeq a = {rel(testing::kParker, "PTS", "15"), rel(testing::kParker, "REB", "5")};
  const RelationSeq b = {rel("P:Greg Monroe", "PTS", "18")};
  const RgResult r = rg_corpus({a, b}, {&g, &g});
  EXPECT_NEAR(r.precision, 200.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.count, 1.5);
  const RgResult empty = rg({}, g);
  EXPECT_TRUE(empty.empty);
  EXPECT_EQ(empty.precision, 100.0);
}

TEST(ContentSelection, SetsIgnoreOrderAndRepeats) {
  const Relation x = rel("e", "PTS", "1"), y = rel("e", "REB", "2"), z = rel("f", "AST", "3");
  const CsResult r = cs({x, y, y}, {y, z});
  EXPECT_DOUBLE_EQ(r.precision, 50.0);
  EXPECT_DOUBLE_EQ(r.recall, 50.0);
  EXPECT_DOUBLE_EQ(r.f1, 50.0);
  const CsResult c = cs_corpus({{x}, {x, z}}, {{x}, {y}});
  EXPECT_DOUBLE_EQ(c.precision, 50.0);
  EXPECT_DOUBLE_EQ(c.recall, 50.0);
  EXPECT_TRUE(cs({}, {x}).empty_candidate);
}

TEST(ContentOrdering, NormalizedDistance) {
  const Relation x = rel("e", "PTS", "1"), y = rel("e", "REB", "2"), z = rel("f", "AST", "3");
  EXPECT_DOUBLE_EQ(co({x, y, z}, {x, y, z}), 100.0);
  EXPECT_NEAR(co({y, x, z}, {x, y, z}), 100.0 * (1.0 - 1.0 / 3.0), 1e-12);
  EXPECT_DOUBLE_EQ(co({}, {}), 100.0);
  EXPECT_DOUBLE_EQ(co({}, {x}), 0.0);
}

TEST(Duplicates, CountsDistinctRepeatedRelations) {
  const Relation x = rel("e", "PTS", "1"), y = rel("e", "REB", "2"), z = rel("f", "AST", "3");
  EXPECT_EQ(duplicate_count({x, y, z}), 0u);
  EXPECT_EQ(duplicate_count({x, x, x}), 1u);
  EXPECT_EQ(duplicate_count({x, y, x, y}), 2u);
  const DuplicateReport r =
      duplicate_ratio({{x}, {x, x}, {x, x, y, y}, {x, x, y, y, z, z}, {x, y, z, x, y, z}, {}});
  EXPECT_EQ(r.per_summary, (std::vector<std::size_t>{0, 1, 2, 3, 3, 0}));
  EXPECT_EQ(r.histogram, (std::array<std::size_t, 4>{2, 1, 1, 2}));
  EXPECT_NEAR(r.ratio, 400.0 / 6.0, 1e-12);
}

TEST(Evaluate, GoldIdentities) {
  SynthOptions so;
  so.n_games = 5;
  const Dataset ds = synth_corpus(so);
  std::vector<EvalItem> items;
  for (const auto& d : ds.train) items.push_back({&d.game, d.summary.tokens, d.summary.tokens});
  const MetricReport m = evaluate(items);
  EXPECT_EQ(m.cs_precision, 100.0);
  EXPECT_EQ(m.cs_recall, 100.0);
  EXPECT_EQ(m.cs_f1, 100.0);
  EXPECT_EQ(m.co_score, 100.0);
  EXPECT_EQ(m.bleu, 100.0);
  EXPECT_EQ(m.rg_precision, 100.0);
  EXPECT_EQ(m.documents, 5u);
}

// Leading eigenvector by power iteration on the sample covariance.
std::vector<double> power_iteration(const std::vector<std::vector<double>>& x) {
  const std::size_t n = x.size(), d = x[0].size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : x) for (std::size_t j = 0; j < d; ++j) mean[j] += r[j] / n;
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (const auto& r : x)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]) / (n - 1);
  std::vector<double> v(d, 1.0);
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> w(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) w[i] += cov[i][j] * v[j];
    double norm = 0.0;
    for (double e : w) norm += e * e;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / norm;
  }
  return v;
}

TEST(Pca, MatchesPowerIteration) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> x(40, std::vector<double>(5));
  for (auto& r : x) {
    const double t = nd(rng) * 3.0;
    for (std::size_t j = 0; j < 5; ++j) r[j] = t * (j + 1) * 0.3 + nd(rng) * 0.2;
  }
  const PcaResult p = pca_project(x, 2);
  const auto v = power_iteration(x);
  const double sign = p.components[0][4] * v[4] > 0 ? 1.0 : -1.0;
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(p.components[0][j], sign * v[j], 1e-8);
  EXPECT_GT(p.explained_ratio[0], 0.95);
  EXPECT_GE(p.explained_variance[0], p.explained_variance[1]);
  ASSERT_EQ(p.coordinates.size(), 40u);
  double mean0 = 0.0;
  for (const auto& c : p.coordinates) mean0 += c[0];
  EXPECT_NEAR(mean0, 0.0, 1e-9);
}

TEST(Pca, SignConvention) {
  const std::vector<std::vector<double>> x = {{0, 0}, {1, -2}, {2, -4}, {3, -6.1}};
  const PcaResult p = pca_project(x, 1);
  const auto& c = p.components[0];
  EXPECT_GT(std::abs(c[1]) > std::abs(c[0]) ? c[1] : c[0], 0.0);
}

}  // namespace
}  // namespace saltrack
