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

#include "cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "saltrack/annotator.hpp"
#include "saltrack/checkpoint.hpp"
#include "saltrack/gradcheck.hpp"

namespace saltrack::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Failure carrying its exit code and a short machine-readable kind.
class CliError : public std::runtime_error {
 public:
  CliError(int code, std::string kind, const std::string& what)
      : std::runtime_error(what), code_(code), kind_(std::move(kind)) {}
  int code() const { return code_; }
  const std::string& kind() const { return kind_; }

 private:
  int code_;
  std::string kind_;
};

std::shared_ptr<spdlog::logger> logger() {
  if (auto l = spdlog::get("saltrack")) return l;
  auto l = spdlog::stderr_color_mt("saltrack");
  l->set_pattern("[%l] %v");
  l->set_level(spdlog::level::info);
  if (const char* env = std::getenv("SALTRACK_LOG_LEVEL")) {
    l->set_level(spdlog::level::from_str(env));
  }
  return l;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kUsage, "missing_file", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw CliError(kFailure, "io_error", "cannot write " + path.string());
  out << text;
}

void require_dir(const std::string& dir, const char* flag) {
  if (dir.empty()) throw CliError(kUsage, "missing_argument", std::string(flag) + " is required");
  if (!fs::is_directory(dir)) {
    throw CliError(kUsage, "missing_data_dir", std::string(flag) + " '" + dir +
                                                   "' is not a directory");
  }
}

// Reads `key` from `obj` into `dst` if present; records defaults otherwise.
class Section {
 public:
  Section(const json& parent, const std::string& name, std::vector<std::string>& defaulted)
      : name_(name), defaulted_(defaulted) {
    if (parent.contains(name)) {
      if (!parent[name].is_object()) throw ConfigError("config: '" + name + "' must be an object");
      obj_ = parent[name];
    } else {
      obj_ = json::object();
    }
  }

  template <class T>
  void get(const std::string& key, T& dst) {
    seen_.insert(key);
    if (!obj_.contains(key)) {
      defaulted_.push_back(name_ + "." + key + " = " + json(dst).dump());
      return;
    }
    try {
      dst = obj_[key].get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: " + name_ + "." + key + " has the wrong type");
    }
  }

  template <class T>
  void get_optional(const std::string& key, std::optional<T>& dst) {
    seen_.insert(key);
    if (!obj_.contains(key) || obj_[key].is_null()) {
      defaulted_.push_back(name_ + "." + key + " = " +
                           (dst ? json(*dst).dump() : std::string("null")));
      return;
    }
    try {
      dst = obj_[key].get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: " + name_ + "." + key + " has the wrong type");
    }
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError("config: unknown key '" + name_ + "." + key + "'");
    }
  }

 private:
  std::string name_;
  json obj_;
  std::set<std::string> seen_;
  std::vector<std::string>& defaulted_;
};

}  // namespace

RunConfig parse_config(const std::string& json_text, bool log_defaults) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  static const std::set<std::string> kSections = {"seed", "model", "train", "decode",
                                                  "metrics"};
  for (const auto& [key, value] : root.items()) {
    if (!kSections.count(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
  RunConfig c;
  std::vector<std::string> defaulted;
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) throw ConfigError("config: seed must be unsigned");
    c.seed = root["seed"].get<std::uint64_t>();
  } else {
    defaulted.push_back("seed = " + std::to_string(c.seed));
  }

  Section model(root, "model", defaulted);
  model.get("embed", c.train.dims.embed);
  model.get("hidden", c.train.dims.hidden);
  model.get("side", c.train.dims.side);
  model.finish();

  Section tr(root, "train", defaulted);
  tr.get("learning_rate", c.train.optimizer.learning_rate);
  tr.get("beta1", c.train.optimizer.beta1);
  tr.get("beta2", c.train.optimizer.beta2);
  tr.get("epsilon", c.train.optimizer.epsilon);
  tr.get("max_epochs", c.train.max_epochs);
  tr.get("clip_norm", c.train.clip_norm);
  tr.get("min_word_freq", c.train.min_word_freq);
  tr.get("use_writer", c.train.use_writer);
  tr.get("shuffle", c.train.shuffle);
  tr.get("terminal_eod", c.train.terminal_eod);
  tr.get_optional("stop_at_accuracy", c.train.stop_at_accuracy);
  tr.get("select_by_dev_bleu", c.train.select_by_dev_bleu);
  tr.get("dev_max_len", c.train.dev_max_len);
  tr.finish();

  Section dec(root, "decode", defaulted);
  dec.get("max_len", c.max_len);
  dec.get_optional("writer", c.writer);
  dec.finish();

  Section met(root, "metrics", defaulted);
  std::string dld = "osa";
  met.get("dld", dld);
  met.finish();
  if (dld == "osa") {
    c.dld = DldMode::kOptimalStringAlignment;
  } else if (dld == "unrestricted") {
    c.dld = DldMode::kUnrestricted;
  } else {
    throw ConfigError("config: metrics.dld must be 'osa' or 'unrestricted'");
  }

  if (!(c.train.optimizer.learning_rate >= 0)) throw ConfigError("config: learning_rate < 0");
  if (c.train.max_epochs < 1) throw ConfigError("config: max_epochs must be >= 1");
  if (c.train.dims.embed == 0 || c.train.dims.hidden == 0 || c.train.dims.side == 0) {
    throw ConfigError("config: model dimensions must be positive");
  }
  c.train.seed = c.seed;
  for (const auto& d : defaulted) {
    if (log_defaults) logger()->info("config default: {}", d);
  }
  return c;
}

std::string config_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["model"] = {{"embed", c.train.dims.embed},
                {"hidden", c.train.dims.hidden},
                {"side", c.train.dims.side}};
  const auto& t = c.train;
  j["train"] = {{"learning_rate", t.optimizer.learning_rate},
                {"beta1", t.optimizer.beta1},
                {"beta2", t.optimizer.beta2},
                {"epsilon", t.optimizer.epsilon},
                {"max_epochs", t.max_epochs},
                {"clip_norm", t.clip_norm},
                {"min_word_freq", t.min_word_freq},
                {"use_writer", t.use_writer},
                {"shuffle", t.shuffle},
                {"terminal_eod", t.terminal_eod},
                {"stop_at_accuracy",
                 t.stop_at_accuracy ? json(*t.stop_at_accuracy) : json(nullptr)},
                {"select_by_dev_bleu", t.select_by_dev_bleu},
                {"dev_max_len", t.dev_max_len}};
  j["decode"] = {{"max_len", c.max_len},
                 {"writer", c.writer ? json(*c.writer) : json(nullptr)}};
  j["metrics"] = {{"dld", c.dld == DldMode::kUnrestricted ? "unrestricted" : "osa"}};
  return j.dump();
}

namespace {

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig load_config(const std::string& path) {
  return parse_config(path.empty() ? std::string("{}") : read_text(path));
}

const Document* find_doc(const Dataset& ds, const std::string& game_id) {
  return ds.find(game_id);
}

std::vector<const Document*> split_docs(const Dataset& ds, const std::string& split) {
  std::vector<const Document*> out;
  auto add = [&](const std::vector<Document>& v) {
    for (const auto& d : v) out.push_back(&d);
  };
  if (split == "train" || split == "all") add(ds.train);
  if (split == "valid" || split == "dev" || split == "all") add(ds.dev);
  if (split == "test" || split == "all") add(ds.test);
  if (split != "train" && split != "valid" && split != "dev" && split != "test" &&
      split != "all") {
    throw CliError(kUsage, "bad_argument", "unknown split '" + split + "'");
  }
  return out;
}

// {"game_id": ..., "summary": [...]} per line.
std::vector<std::pair<std::string, std::vector<std::string>>> load_summaries(
    const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kUsage, "missing_file", "cannot open " + path.string());
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      const json& summary = j.at("summary");
      out.emplace_back(j.at("game_id").get<std::string>(),
                       summary.is_string() ? split_tokens(summary.get<std::string>())
                                           : summary.get<std::vector<std::string>>());
    } catch (const json::exception& e) {
      throw CliError(kFailure, "bad_input",
                     path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

int cmd_prepare(bool synth, const SynthOptions& so, const std::string& data_dir,
                const std::string& out_dir, std::ostream& out) {
  if (out_dir.empty()) throw CliError(kUsage, "missing_argument", "--out is required");
  Dataset ds;
  if (synth) {
    ds = synth_corpus(so);
  } else {
    require_dir(data_dir, "--data-dir");
    ds = load_dataset(fs::path(data_dir));
    std::size_t bad = 0;
    for (const auto* split : {&ds.train, &ds.dev, &ds.test}) {
      for (const Document& d : *split) {
        for (const auto& v : validate_game(d.game)) {
          logger()->warn("{}: {}", d.game.game_id, v);
          ++bad;
        }
      }
    }
    if (bad) {
      throw CliError(kFailure, "invalid_data",
                     std::to_string(bad) + " validation errors; see log");
    }
  }
  save_dataset(fs::path(out_dir), ds);
  std::vector<Document> all = ds.train;
  all.insert(all.end(), ds.dev.begin(), ds.dev.end());
  all.insert(all.end(), ds.test.begin(), ds.test.end());
  const CorpusStats st = corpus_stats(all);
  json j = {{"train", ds.train.size()}, {"valid", ds.dev.size()}, {"test", ds.test.size()},
            {"writers", ds.writers.size() - 1}, {"avg_tokens", st.avg_tokens},
            {"avg_records", st.avg_records}, {"out", out_dir}};
  out << j.dump() << '\n';
  return kOk;
}

int cmd_annotate(const std::string& data_dir, const std::string& split,
                 const std::string& out_path, std::ostream& out) {
  require_dir(data_dir, "--data-dir");
  if (out_path.empty()) throw CliError(kUsage, "missing_argument", "--out is required");
  const Dataset ds = load_dataset(fs::path(data_dir));
  std::vector<Document> labeled;
  std::size_t copied = 0, positions = 0;
  for (const Document* d : split_docs(ds, split)) {
    Document doc = *d;
    doc.summary = annotate(doc.game, doc.summary.tokens);
    for (auto z : doc.summary.z) copied += z;
    positions += doc.summary.size();
    labeled.push_back(std::move(doc));
  }
  save_jsonl(fs::path(out_path), labeled);
  out << json{{"documents", labeled.size()}, {"positions", positions},
              {"copy_positions", copied}, {"out", out_path}}
             .dump()
      << '\n';
  return kOk;
}

int cmd_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_dir, std::ostream& out) {
  require_dir(data_dir, "--data-dir");
  if (out_dir.empty()) throw CliError(kUsage, "missing_argument", "--out is required");
  const RunConfig cfg = load_config(config_path);
  const std::string cfg_json = config_json(cfg);
  const std::string hash = hash_hex(fnv1a64(cfg_json));
  const Dataset ds = load_dataset(fs::path(data_dir));
  if (ds.train.empty()) throw CliError(kFailure, "empty_data", "no training documents");
  fs::create_directories(out_dir);
  std::ofstream log(fs::path(out_dir) / "train_log.jsonl", std::ios::trunc);
  logger()->info("training on {} documents, config hash {}", ds.train.size(), hash);
  TrainResult r = train(ds, cfg.train, [&](const EpochLog& e) {
    json j = json::parse(epoch_log_json(e));
    j["config_hash"] = hash;
    log << j.dump() << '\n';
    log.flush();
    out << j.dump() << '\n';
  });
  save_model(fs::path(out_dir), *r.model, cfg_json);
  out << json{{"checkpoint", out_dir}, {"epochs", r.log.size()},
              {"best_epoch", r.best_epoch},
              {"best_dev_bleu", r.best_dev_bleu ? json(*r.best_dev_bleu) : json(nullptr)},
              {"config_hash", hash}}
             .dump()
      << '\n';
  return kOk;
}

int cmd_generate(const std::string& ckpt, const std::string& data_dir,
                 const std::string& game_id, const std::string& split,
                 const std::optional<std::string>& writer_flag,
                 std::optional<std::size_t> max_len_flag, const std::string& trace_path,
                 const std::string& out_path, std::ostream& out) {
  require_dir(data_dir, "--data-dir");
  if (ckpt.empty()) throw CliError(kUsage, "missing_argument", "--ckpt is required");
  ModelBundle bundle;
  try {
    bundle = load_model(fs::path(ckpt));
  } catch (const CheckpointError& e) {
    throw CliError(kUsage, "bad_checkpoint", e.what());
  }
  const RunConfig cfg = parse_config(bundle.config_json, false);
  const std::string hash = hash_hex(bundle.config_hash);
  const Dataset ds = load_dataset(fs::path(data_dir));
  std::vector<const Document*> docs;
  if (!game_id.empty()) {
    const Document* d = find_doc(ds, game_id);
    if (!d) throw CliError(kUsage, "unknown_game", "game '" + game_id + "' not found");
    docs.push_back(d);
  } else {
    docs = split_docs(ds, split);
  }
  const Model& model = *bundle.model;
  const std::optional<std::string> writer = writer_flag ? writer_flag : cfg.writer;
  std::vector<std::string> lines;
  json traces = json::array();
  for (const Document* d : docs) {
    DecodeOptions opt;
    opt.max_len = max_len_flag.value_or(cfg.max_len);
    if (writer) {
      opt.writer = model.writer_id(*writer);
    } else if (cfg.train.use_writer) {
      opt.writer = model.writer_id(d->game.writer);
    }
    const GenerationTrace trace = generate(model, d->game, opt);
    if (trace.truncated) logger()->warn("{}: truncated at {} tokens", d->game.game_id, opt.max_len);
    json line = {{"game_id", d->game.game_id}, {"summary", trace.tokens()},
                 {"truncated", trace.truncated}, {"config_hash", hash}};
    lines.push_back(line.dump());
    json tj = json::parse(trace_to_json(trace));
    tj["config_hash"] = hash;
    traces.push_back(std::move(tj));
    if (docs.size() == 1) out << join_tokens(trace.tokens()) << '\n';
  }
  if (!trace_path.empty()) {
    write_text(trace_path, (docs.size() == 1 ? traces[0] : traces).dump(2) + "\n");
  }
  if (!out_path.empty()) {
    std::string text;
    for (const auto& l : lines) text += l + "\n";
    write_text(out_path, text);
  } else if (docs.size() > 1) {
    for (const auto& l : lines) out << l << '\n';
  }
  return kOk;
}

json report_json(const MetricReport& r) {
  return {{"documents", r.documents},
          {"rg_count", r.rg_count},
          {"rg_precision", r.rg_precision},
          {"cs_precision", r.cs_precision},
          {"cs_recall", r.cs_recall},
          {"cs_f1", r.cs_f1},
          {"co_score", r.co_score},
          {"bleu", r.bleu},
          {"duplicate_histogram", r.duplicate_histogram},
          {"duplicate_ratio", r.duplicate_ratio}};
}

int cmd_evaluate(const std::string& generated, const std::string& reference,
                 const std::string& data_dir, const std::string& dld_flag,
                 const std::string& out_path, const std::string& pca_csv,
                 const std::string& ckpt, std::ostream& out) {
  require_dir(data_dir, "--data-dir");
  if (generated.empty() || reference.empty()) {
    throw CliError(kUsage, "missing_argument", "--generated and --reference are required");
  }
  DldMode mode = DldMode::kOptimalStringAlignment;
  if (dld_flag == "unrestricted") {
    mode = DldMode::kUnrestricted;
  } else if (dld_flag != "osa") {
    throw CliError(kUsage, "bad_argument", "--dld must be osa or unrestricted");
  }
  const Dataset ds = load_dataset(fs::path(data_dir));
  const auto gen = load_summaries(generated);
  const auto ref = load_summaries(reference);
  std::map<std::string, const std::vector<std::string>*> ref_by_id;
  for (const auto& [id, toks] : ref) ref_by_id[id] = &toks;
  std::vector<EvalItem> items;
  for (const auto& [id, toks] : gen) {
    const Document* d = find_doc(ds, id);
    if (!d) throw CliError(kFailure, "unknown_game", "game '" + id + "' not in --data-dir");
    auto it = ref_by_id.find(id);
    if (it == ref_by_id.end()) {
      throw CliError(kFailure, "missing_reference", "no reference for game '" + id + "'");
    }
    items.push_back({&d->game, toks, *it->second});
  }
  const MetricReport rep = evaluate(items, mode);
  if (rep.rg_count == 0.0) logger()->info("no relations extracted; RG precision reported as 100");
  json j = report_json(rep);
  j["dld"] = mode == DldMode::kUnrestricted ? "unrestricted" : "osa";
  if (!pca_csv.empty()) {
    if (ckpt.empty()) throw CliError(kUsage, "missing_argument", "--pca-csv needs --ckpt");
    ModelBundle b = load_model(fs::path(ckpt));
    const ad::Parameter& table = b.model->params().get("emb.entity");
    const auto& names = b.model->vocab().entities;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 1; i < names.size(); ++i) {
      auto row = table.value.data().subspan(i * table.value.cols(), table.value.cols());
      rows.emplace_back(row.begin(), row.end());
    }
    if (rows.size() >= 2) {
      const PcaResult p = pca_project(rows, 2);
      std::ostringstream csv;
      csv << "entity,pc1,pc2\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        csv << '"' << names.token(i + 1) << "\"," << p.coordinates[i][0] << ','
            << p.coordinates[i][1] << '\n';
      }
      write_text(pca_csv, csv.str());
      j["pca_explained_ratio"] = p.explained_ratio;
    }
  }
  if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
  out << j.dump() << '\n';
  return kOk;
}

int cmd_gradcheck(std::uint64_t seed, std::size_t embed, std::size_t hidden,
                  double tolerance, std::ostream& out) {
  const GradCheckSuite suite = run_gradcheck_suite(seed, {embed, hidden, 2}, tolerance);
  json checks = json::array();
  for (const auto& c : suite.checks) {
    checks.push_back({{"name", c.name},
                      {"max_rel_error", c.report.max_rel_error},
                      {"passed", c.report.passed}});
  }
  out << json{{"passed", suite.passed}, {"max_rel_error", suite.max_rel_error},
              {"tolerance", tolerance}, {"floor", ad::kGradCheckFloor},
              {"checks", checks}}
             .dump()
      << '\n';
  return suite.passed ? kOk : kFailure;
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"saltrack: saliency-tracking data-to-text generation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "saltrack 0.1.0");

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Write a synthetic corpus or normalize one");
  bool synth = false;
  SynthOptions so;
  std::string data_dir, out_dir, config_path;
  prepare->add_flag("--synth", synth, "Generate a synthetic corpus");
  prepare->add_option("--data-dir", data_dir, "Corpus to ingest");
  prepare->add_option("--out", out_dir, "Output directory");
  prepare->add_option("--seed", so.seed, "Generator seed");
  prepare->add_option("--games", so.n_games, "Training games");
  prepare->add_option("--players", so.n_players, "Players per game");
  prepare->add_option("--writers", so.n_writers, "Writing styles (1 or 2)");
  prepare->add_flag("--every-writer", so.every_writer_per_game,
                    "Write every game once per writer");
  prepare->add_option("--dev-games", so.dev_games, "Validation games");
  prepare->add_option("--test-games", so.test_games, "Test games");

  // annotate
  auto* annotate_cmd = app.add_subcommand("annotate", "Label summaries with Z/E/A/N");
  std::string split = "all", out_path;
  annotate_cmd->add_option("--data-dir", data_dir, "Corpus directory");
  annotate_cmd->add_option("--out", out_path, "Labeled JSONL output");
  annotate_cmd->add_option("--split", split, "train, valid, test or all");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--config", config_path, "JSON config");
  train_cmd->add_option("--data-dir", data_dir, "Corpus directory");
  train_cmd->add_option("--out", out_dir, "Checkpoint directory");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "Greedy-decode summaries");
  std::string ckpt, game_id, trace_path;
  std::optional<std::string> writer;
  std::optional<std::size_t> max_len;
  std::string gen_split = "test";
  gen_cmd->add_option("--ckpt", ckpt, "Checkpoint directory");
  gen_cmd->add_option("--data-dir", data_dir, "Corpus directory");
  gen_cmd->add_option("--game-id", game_id, "Decode one game");
  gen_cmd->add_option("--split", gen_split, "Split to decode when no --game-id");
  gen_cmd->add_option("--writer", writer, "Writer name");
  gen_cmd->add_option("--max-len", max_len, "Maximum tokens");
  gen_cmd->add_option("--trace", trace_path, "Trace JSON output");
  gen_cmd->add_option("--out", out_path, "Generated JSONL output");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Score generated summaries");
  std::string generated, reference, dld = "osa", pca_csv;
  eval_cmd->add_option("--generated", generated, "Generated JSONL");
  eval_cmd->add_option("--reference", reference, "Reference JSONL");
  eval_cmd->add_option("--data-dir", data_dir, "Corpus directory");
  eval_cmd->add_option("--dld", dld, "osa or unrestricted");
  eval_cmd->add_option("--out", out_path, "Report JSON output");
  eval_cmd->add_option("--pca-csv", pca_csv, "Entity embedding PCA coordinates");
  eval_cmd->add_option("--ckpt", ckpt, "Checkpoint for --pca-csv");

  // gradcheck
  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  std::uint64_t gc_seed = 1;
  std::size_t gc_embed = 3, gc_hidden = 4;
  double gc_tol = 1e-4;
  gc_cmd->add_option("--seed", gc_seed, "Seed");
  gc_cmd->add_option("--embed", gc_embed, "Embedding size");
  gc_cmd->add_option("--hidden", gc_hidden, "Hidden size");
  gc_cmd->add_option("--tolerance", gc_tol, "Max relative error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << "saltrack 0.1.0\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what());
    return kUsage;
  }

  try {
    if (*prepare) return cmd_prepare(synth, so, data_dir, out_dir, out);
    if (*annotate_cmd) return cmd_annotate(data_dir, split, out_path, out);
    if (*train_cmd) return cmd_train(config_path, data_dir, out_dir, out);
    if (*gen_cmd) {
      return cmd_generate(ckpt, data_dir, game_id, gen_split, writer, max_len, trace_path,
                          out_path, out);
    }
    if (*eval_cmd) {
      return cmd_evaluate(generated, reference, data_dir, dld, out_path, pca_csv, ckpt, out);
    }
    if (*gc_cmd) return cmd_gradcheck(gc_seed, gc_embed, gc_hidden, gc_tol, out);
  } catch (const CliError& e) {
    emit_error(err, e.kind(), e.what());
    return e.code();
  } catch (const ConfigError& e) {
    emit_error(err, "config", e.what());
    return kUsage;
  } catch (const DataError& e) {
    emit_error(err, "data", e.what());
    return kFailure;
  } catch (const TrainingDiverged& e) {
    emit_error(err, "diverged", e.what());
    return kFailure;
  } catch (const std::exception& e) {
    emit_error(err, "internal", e.what());
    return kFailure;
  }
  return kUsage;
}

}  // namespace saltrack::cli
