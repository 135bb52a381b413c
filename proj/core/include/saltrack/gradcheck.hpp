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

// Finite-difference checks of every autodiff primitive and of the full
// sequence loss on a 2-token labeled example.

#include <cstdint>
#include <string>
#include <vector>

#include "saltrack/autodiff.hpp"
#include "saltrack/model.hpp"

namespace saltrack {

struct NamedGradCheck {
  std::string name;
  ad::GradCheckReport report;
};

struct GradCheckSuite {
  std::vector<NamedGradCheck> checks;
  double max_rel_error = 0.0;
  bool passed = true;
};

// One check per primitive with random shapes drawn from `seed`.
std::vector<NamedGradCheck> check_primitives(std::uint64_t seed, double tolerance = 1e-4);

// Full loss on a synthetic game with a two-token summary (surname, points)
// and the terminal <EoD> step, so all five heads contribute.
NamedGradCheck check_sequence_loss(std::uint64_t seed, const ModelDims& dims,
                                   double tolerance = 1e-4);

GradCheckSuite run_gradcheck_suite(std::uint64_t seed,
                                   const ModelDims& dims = {3, 4, 2},
                                   double tolerance = 1e-4);

}  // namespace saltrack
