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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "saltrack/decoder.hpp"
#include "saltrack/metrics.hpp"
#include "saltrack/trainer.hpp"

namespace saltrack::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

struct RunConfig {
  std::uint64_t seed = 1;
  TrainConfig train;
  std::size_t max_len = 700;
  std::optional<std::string> writer;
  DldMode dld = DldMode::kOptimalStringAlignment;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses a JSON config; unknown keys raise ConfigError. Every key left at
// its default is logged.
RunConfig parse_config(const std::string& json_text, bool log_defaults = true);
// Canonical JSON of the fully resolved config.
std::string config_json(const RunConfig& config);

// Runs one subcommand. Errors go to `err` as a JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace saltrack::cli
