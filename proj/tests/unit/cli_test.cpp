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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

namespace saltrack::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "saltrack");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<json> lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("saltrack_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const char* name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST(Config, DefaultsAndOverrides) {
  const RunConfig c = parse_config(R"({"seed": 4, "model": {"embed": 16}, "train": {"max_epochs": 3}})");
  EXPECT_EQ(c.seed, 4u);
  EXPECT_EQ(c.train.seed, 4u);
  EXPECT_EQ(c.train.dims.embed, 16u);
  EXPECT_EQ(c.train.dims.hidden, 512u);
  EXPECT_EQ(c.train.max_epochs, 3u);
  EXPECT_EQ(c.dld, DldMode::kOptimalStringAlignment);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config(R"({"sed": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"train": {"lr": 1}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"train": {"max_epochs": "many"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"train": {"max_epochs": 0}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"metrics": {"dld": "fast"}})"), ConfigError);
  EXPECT_THROW(parse_config("[1]"), ConfigError);
  EXPECT_THROW(parse_config("{"), ConfigError);
}

TEST(Config, CanonicalJsonRoundTrips) {
  const RunConfig c = parse_config(R"({"decode": {"writer": "alice"}, "metrics": {"dld": "unrestricted"}})");
  const RunConfig back = parse_config(config_json(c));
  EXPECT_EQ(config_json(back), config_json(c));
  EXPECT_EQ(back.writer, "alice");
  EXPECT_EQ(back.dld, DldMode::kUnrestricted);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(call({}).code, kUsage);
  EXPECT_EQ(call({"frobnicate"}).code, kUsage);
  const Result r = call({"train", "--data-dir", path("nope"), "--out", path("m")});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_EQ(json::parse(r.err)["error"]["kind"], "missing_data_dir");
  EXPECT_EQ(call({"--help"}).code, kOk);
}

TEST_F(CliTest, EndToEnd) {
  const std::string data = path("data");
  Result r = call({"prepare", "--synth", "--seed", "3", "--games", "3", "--dev-games", "1",
                   "--test-games", "1", "--out", data});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["train"], 3);

  {
    std::ofstream cfg(path("cfg.json"));
    cfg << R"({"seed": 2, "model": {"embed": 8, "hidden": 12, "side": 2},
               "train": {"max_epochs": 2, "min_word_freq": 1}, "decode": {"max_len": 40}})";
  }
  r = call({"train", "--config", path("cfg.json"), "--data-dir", data, "--out", path("m")});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto epochs = lines(r.out);
  ASSERT_EQ(epochs.size(), 3u);  // two epochs and a summary line
  EXPECT_EQ(epochs[0]["epoch"], 1);
  const std::string hash = epochs.back()["config_hash"];
  EXPECT_EQ(hash.size(), 16u);
  EXPECT_TRUE(fs::exists(path("m/params.bin")));
  EXPECT_TRUE(fs::exists(path("m/train_log.jsonl")));

  r = call({"generate", "--ckpt", path("m"), "--data-dir", data, "--split", "test", "--out",
            path("gen.jsonl"), "--trace", path("trace.json")});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::ifstream gen(path("gen.jsonl"));
  std::string first;
  std::getline(gen, first);
  const json g = json::parse(first);
  EXPECT_EQ(g["config_hash"], hash);
  EXPECT_LE(g["summary"].size(), 40u);

  r = call({"evaluate", "--generated", (dir_ / "data" / "test.jsonl").string(), "--reference",
            (dir_ / "data" / "test.jsonl").string(), "--data-dir", data});
  ASSERT_EQ(r.code, kOk) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_EQ(rep["bleu"], 100.0);
  EXPECT_EQ(rep["co_score"], 100.0);

  r = call({"evaluate", "--generated", path("gen.jsonl"), "--reference",
            (dir_ / "data" / "test.jsonl").string(), "--data-dir", data, "--pca-csv",
            path("pca.csv"), "--ckpt", path("m")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(fs::exists(path("pca.csv")));

  r = call({"annotate", "--data-dir", data, "--split", "train", "--out", path("lab.jsonl")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["documents"], 3);
}

TEST_F(CliTest, GenerateRejectsBadCheckpoint) {
  ASSERT_EQ(call({"prepare", "--synth", "--games", "1", "--out", path("d")}).code, kOk);
  fs::create_directories(path("empty"));
  const Result r = call({"generate", "--ckpt", path("empty"), "--data-dir", path("d")});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_EQ(json::parse(r.err)["error"]["kind"], "bad_checkpoint");
}

TEST(Cli, GradcheckPasses) {
  const Result r = call({"gradcheck", "--seed", "2"});
  EXPECT_EQ(r.code, kOk) << r.out;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_LE(j["max_rel_error"].get<double>(), 1e-4);
}

}  // namespace
}  // namespace saltrack::cli
