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

// Greedy generation: at each step decide Z by p(Z) >= 0.5; on Z = 1 pick
// the argmax entity and attribute, update the tracker and copy the record
// value (rendered in words when p(N) >= 0.5); on Z = 0 emit the argmax
// word. The tracker is refreshed after every ".". Argmax ties go to the
// lowest index.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "saltrack/model.hpp"
#include "saltrack/records.hpp"

namespace saltrack {

struct TraceStep {
  std::string token;
  std::uint8_t z = 0;
  double p_z = 0.0;  // p(Z = 1)
  std::optional<std::string> entity;
  std::optional<double> p_entity;
  bool used_snapshot = false;
  std::optional<std::string> attribute;
  std::optional<double> p_attribute;
  std::optional<std::uint8_t> n;
  std::optional<double> p_n;  // p(N = 1)
  std::optional<double> p_word;
  bool refreshed = false;
  std::size_t mentioned = 0;  // size of the mentioned set after the step
};

struct GenerationTrace {
  std::string game_id;
  std::vector<TraceStep> steps;  // excludes the final <EoD>
  bool ended = false;            // <EoD> emitted
  bool truncated = false;        // max_len reached first

  std::vector<std::string> tokens() const;
  LabeledSummary labels() const;
};

struct DecodeOptions {
  std::size_t max_len = 700;
  std::optional<std::size_t> writer;  // vocabulary id
  // Replays these decisions instead of taking argmaxes; generation stops
  // after the last forced token.
  const LabeledSummary* forced = nullptr;
};

GenerationTrace generate(const Model& model, const GameData& game,
                         const DecodeOptions& options = {});

// Digits for n = 0, English words for n = 1 (digits when outside the
// lexicon), the stored token for non-numeric records.
std::string render_value(const Record& record, std::optional<std::uint8_t> n);

// Deterministic template summary: team lines and the top scorers' points,
// rebounds and assists, every value copied as digits.
LabeledSummary template_baseline(const GameData& game, std::size_t max_players = 6);

std::string trace_to_json(const GenerationTrace& trace, int indent = -1);

}  // namespace saltrack
