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

#include "saltrack/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace saltrack {

namespace {

constexpr char kMagic[8] = {'S', 'A', 'L', 'T', 'C', 'K', 'P', '1'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const std::filesystem::path& path, const char* what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw CheckpointError(path.string() + ": truncated while reading " + what);
  }
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json vocab_json(const Vocab& v) { return v.tokens(); }

Vocab vocab_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].empty()) {
    throw CheckpointError(std::string("model.json: missing vocabulary '") + key + "'");
  }
  Vocab v;
  for (const auto& t : j[key]) v.add(t.get<std::string>());
  return v;
}

}  // namespace

void save_tensors(const std::filesystem::path& path, const ad::ParameterStore& store) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(store.size()));
  for (const ad::Parameter* p : store.all()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p->value.rank()));
    for (std::size_t d : p->value.shape()) put<std::uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(p->value.data().data()),
              static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  }
  if (!out) throw CheckpointError("write failed for " + path.string());
}

NamedTensors load_tensors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw CheckpointError(path.string() + ": not a checkpoint (bad magic)");
  }
  const auto version = get<std::uint32_t>(in, path, "version");
  if (version != kCheckpointVersion) {
    throw CheckpointError(path.string() + ": unsupported version " +
                          std::to_string(version));
  }
  const auto count = get<std::uint32_t>(in, path, "tensor count");
  NamedTensors out;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = get<std::uint32_t>(in, path, "name length");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) {
      throw CheckpointError(path.string() + ": truncated tensor name");
    }
    const auto rank = get<std::uint32_t>(in, path, "rank");
    if (rank > 8) throw CheckpointError(path.string() + ": implausible rank for " + name);
    ad::Shape shape;
    for (std::uint32_t k = 0; k < rank; ++k) {
      shape.push_back(static_cast<std::size_t>(get<std::uint64_t>(in, path, "dim")));
    }
    std::vector<double> data(ad::shape_size(shape));
    if (!in.read(reinterpret_cast<char*>(data.data()),
                 static_cast<std::streamsize>(data.size() * sizeof(double)))) {
      throw CheckpointError(path.string() + ": truncated data for " + name);
    }
    out.emplace_back(std::move(name), ad::Tensor(std::move(shape), std::move(data)));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw CheckpointError(path.string() + ": trailing bytes after last tensor");
  }
  return out;
}

void load_into(ad::ParameterStore& store, const std::filesystem::path& path) {
  NamedTensors tensors = load_tensors(path);
  if (tensors.size() != store.size()) {
    throw CheckpointError(path.string() + ": holds " + std::to_string(tensors.size()) +
                          " tensors, model expects " + std::to_string(store.size()));
  }
  for (auto& [name, t] : tensors) {
    ad::Parameter* p = store.find(name);
    if (!p) throw CheckpointError(path.string() + ": unknown tensor '" + name + "'");
    if (p->value.shape() != t.shape()) {
      throw CheckpointError(path.string() + ": shape mismatch for '" + name + "': " +
                            ad::shape_string(t.shape()) + " vs " +
                            ad::shape_string(p->value.shape()));
    }
  }
  for (auto& [name, t] : tensors) {
    ad::Parameter& p = store.get(name);
    p.value = std::move(t);
    p.zero_grad();
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void save_model(const std::filesystem::path& dir, const Model& model,
                std::string_view config_json) {
  std::filesystem::create_directories(dir);
  save_tensors(dir / "params.bin", model.params());
  nlohmann::json config = nlohmann::json::parse(config_json);
  const std::string canonical = config.dump();
  nlohmann::json side;
  side["format_version"] = kCheckpointVersion;
  side["dims"] = {{"embed", model.dims().embed},
                  {"hidden", model.dims().hidden},
                  {"side", model.dims().side}};
  const Vocabularies& v = model.vocab();
  side["vocab"] = {{"entities", vocab_json(v.entities)},
                   {"attributes", vocab_json(v.attributes)},
                   {"values", vocab_json(v.values)},
                   {"words", vocab_json(v.words)},
                   {"writers", vocab_json(v.writers)}};
  side["config"] = config;
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical)));
  side["config_hash"] = hex;
  std::ofstream out(dir / "model.json", std::ios::trunc);
  if (!out) throw CheckpointError("cannot write " + (dir / "model.json").string());
  out << side.dump(2) << '\n';
}

ModelBundle load_model(const std::filesystem::path& dir) {
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(read_file(dir / "model.json"));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError((dir / "model.json").string() + ": " + e.what());
  }
  if (side.value("format_version", 0u) != kCheckpointVersion) {
    throw CheckpointError("model.json: unsupported format_version");
  }
  ModelDims dims;
  const auto& d = side.at("dims");
  dims.embed = d.at("embed").get<std::size_t>();
  dims.hidden = d.at("hidden").get<std::size_t>();
  dims.side = d.at("side").get<std::size_t>();
  const auto& vj = side.at("vocab");
  Vocabularies v;
  v.entities = vocab_from(vj, "entities");
  v.attributes = vocab_from(vj, "attributes");
  v.values = vocab_from(vj, "values");
  v.words = vocab_from(vj, "words");
  v.writers = vocab_from(vj, "writers");
  ModelBundle b;
  b.model = std::make_unique<Model>(dims, std::move(v));
  load_into(b.model->params(), dir / "params.bin");
  b.config_json = side.value("config", nlohmann::json::object()).dump();
  b.config_hash = fnv1a64(b.config_json);
  const std::string stored = side.value("config_hash", "");
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(b.config_hash));
  if (!stored.empty() && stored != hex) {
    throw CheckpointError("model.json: config_hash does not match config");
  }
  return b;
}

}  // namespace saltrack
