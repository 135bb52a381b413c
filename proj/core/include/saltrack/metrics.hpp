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

// Extractive evaluation: relation generation (RG), content selection (CS),
// content ordering (CO), corpus BLEU, duplicate-relation counts and a PCA
// projection for inspecting embeddings.

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "saltrack/records.hpp"

namespace saltrack {

struct Relation {
  std::string entity;
  std::string attribute;
  std::string value;  // canonical digits

  friend bool operator==(const Relation&, const Relation&) = default;
  friend auto operator<=>(const Relation&, const Relation&) = default;
};

using RelationSeq = std::vector<Relation>;

// Numeric relations in textual order. Uses the annotator's resolution rules
// in permissive mode, so cued values without a matching record are kept.
RelationSeq extract_relations(const std::vector<std::string>& tokens,
                              const GameData& game);

struct RgResult {
  double count = 0.0;  // extracted relations per summary
  double precision = 100.0;
  bool empty = false;
};
RgResult rg(const RelationSeq& cand, const GameData& game);
RgResult rg_corpus(const std::vector<RelationSeq>& cands,
                   const std::vector<const GameData*>& games);

struct CsResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool empty_reference = false;
  bool empty_candidate = false;
};
CsResult cs(const RelationSeq& cand, const RelationSeq& ref);
// Mean per-document precision and recall; F1 from the means.
CsResult cs_corpus(const std::vector<RelationSeq>& cands,
                   const std::vector<RelationSeq>& refs);

enum class DldMode { kOptimalStringAlignment, kUnrestricted };

// Damerau-Levenshtein distance over arbitrary equality-comparable items.
template <class T>
std::size_t dld(const std::vector<T>& a, const std::vector<T>& b,
                DldMode mode = DldMode::kOptimalStringAlignment);

double co(const RelationSeq& cand, const RelationSeq& ref,
          DldMode mode = DldMode::kOptimalStringAlignment);
double co_corpus(const std::vector<RelationSeq>& cands,
                 const std::vector<RelationSeq>& refs,
                 DldMode mode = DldMode::kOptimalStringAlignment);

struct BleuResult {
  double score = 0.0;  // 0..100
  std::array<double, 4> precisions{};
  double brevity_penalty = 0.0;
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;
  bool empty = false;
};
// Corpus BLEU-4, one reference per candidate, no smoothing.
BleuResult bleu(const std::vector<std::vector<std::string>>& candidates,
                const std::vector<std::vector<std::string>>& references);

struct DuplicateReport {
  std::vector<std::size_t> per_summary;  // relations extracted more than once
  std::array<std::size_t, 4> histogram{};  // 0, 1, 2, >=3
  double ratio = 0.0;  // % of summaries with at least one duplicate
};
std::size_t duplicate_count(const RelationSeq& seq);
DuplicateReport duplicate_ratio(const std::vector<RelationSeq>& seqs);

struct MetricReport {
  double rg_count = 0.0;
  double rg_precision = 0.0;
  double cs_precision = 0.0;
  double cs_recall = 0.0;
  double cs_f1 = 0.0;
  double co_score = 0.0;
  double bleu = 0.0;
  std::array<std::size_t, 4> duplicate_histogram{};
  double duplicate_ratio = 0.0;
  std::size_t documents = 0;
};

struct EvalItem {
  const GameData* game = nullptr;
  std::vector<std::string> candidate;
  std::vector<std::string> reference;
};
MetricReport evaluate(const std::vector<EvalItem>& items,
                      DldMode mode = DldMode::kOptimalStringAlignment);

struct PcaResult {
  std::vector<std::vector<double>> coordinates;  // n x k
  std::vector<std::vector<double>> components;   // k x d, unit length
  std::vector<double> explained_variance;        // k
  std::vector<double> explained_ratio;           // k, share of total variance
};
// Top-k principal components of the centered covariance. Each component is
// signed so that its largest-magnitude coordinate is positive.
PcaResult pca_project(const std::vector<std::vector<double>>& vectors,
                      std::size_t k = 2);

template <class T>
std::size_t dld(const std::vector<T>& a, const std::vector<T>& b, DldMode mode) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<std::size_t>> d(n + 2, std::vector<std::size_t>(m + 2, 0));
  if (mode == DldMode::kOptimalStringAlignment) {
    for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 1; j <= m; ++j) {
        const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
        std::size_t v = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                  d[i - 1][j - 1] + cost});
        if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
          v = std::min(v, d[i - 2][j - 2] + 1);
        }
        d[i][j] = v;
      }
    }
    return d[n][m];
  }
  // Lowrance-Wagner with an alphabet of the items seen so far. The table is
  // shifted by one so row/column 0 hold the "infinity" sentinel.
  const std::size_t inf = n + m;
  std::vector<std::pair<T, std::size_t>> last_row;  // item -> last row in a
  auto last_seen = [&](const T& x) -> std::size_t {
    for (const auto& [item, row] : last_row) {
      if (item == x) return row;
    }
    return 0;
  };
  d[0][0] = inf;
  for (std::size_t i = 0; i <= n; ++i) {
    d[i + 1][0] = inf;
    d[i + 1][1] = i;
  }
  for (std::size_t j = 0; j <= m; ++j) {
    d[0][j + 1] = inf;
    d[1][j + 1] = j;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t db = 0;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t i1 = last_seen(b[j - 1]);
      const std::size_t j1 = db;
      std::size_t cost = 1;
      if (a[i - 1] == b[j - 1]) {
        cost = 0;
        db = j;
      }
      d[i + 1][j + 1] = std::min({d[i][j] + cost, d[i + 1][j] + 1, d[i][j + 1] + 1,
                                  d[i1][j1] + (i - i1 - 1) + 1 + (j - j1 - 1)});
    }
    bool found = false;
    for (auto& [item, row] : last_row) {
      if (item == a[i - 1]) {
        row = i;
        found = true;
      }
    }
    if (!found) last_row.emplace_back(a[i - 1], i);
  }
  return d[n + 1][m + 1];
}

}  // namespace saltrack
