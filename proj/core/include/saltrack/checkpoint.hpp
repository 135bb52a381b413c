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

// Named-tensor checkpoints. Layout (all integers little-endian):
//   "SALTCKP1" | u32 version | u32 count |
//   count x { u32 name_len | name | u32 rank | rank x u64 dim | f64 data... }
// A model directory holds params.bin plus a model.json sidecar with the
// dimensions, vocabularies and the training config. See docs/checkpoint.md.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "saltrack/autodiff.hpp"
#include "saltrack/model.hpp"

namespace saltrack {

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using NamedTensors = std::vector<std::pair<std::string, ad::Tensor>>;

void save_tensors(const std::filesystem::path& path, const ad::ParameterStore& store);
NamedTensors load_tensors(const std::filesystem::path& path);
// Every stored tensor must exist in `store` with the same shape and every
// parameter of `store` must be present.
void load_into(ad::ParameterStore& store, const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

struct ModelBundle {
  std::unique_ptr<Model> model;
  std::string config_json;  // as written by save_model
  std::uint64_t config_hash = 0;
};

// Writes {dir}/params.bin and {dir}/model.json. config_json must be a JSON
// object; its canonical form is hashed into the sidecar.
void save_model(const std::filesystem::path& dir, const Model& model,
                std::string_view config_json);
ModelBundle load_model(const std::filesystem::path& dir);

}  // namespace saltrack
