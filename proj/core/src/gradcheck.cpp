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

#include "saltrack/gradcheck.hpp"

#include <functional>
#include <random>

#include "saltrack/trainer.hpp"

namespace saltrack {

namespace {

using ad::Graph;
using ad::Parameter;
using ad::ParameterStore;
using ad::Var;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  std::size_t dim(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(gen_() % (hi - lo + 1));
  }
  void fill(ad::Tensor& t, double lo = -1.0, double hi = 1.0) {
    for (double& v : t.data()) v = uniform(lo, hi);
  }

 private:
  std::mt19937_64 gen_;
};

struct Case {
  ParameterStore store;
  std::function<Var(Graph&)> f;
};

// Reduces any output to a scalar with fixed random weights so every output
// coordinate carries a distinct upstream gradient.
Var project(Graph& g, Var y, const ad::Tensor& w) {
  return ad::dot(y, g.constant(w));
}

NamedGradCheck check(const std::string& name, ParameterStore& store,
                     const std::function<Var(Graph&)>& f, double tolerance) {
  auto params = store.all();
  return {name, ad::grad_check(f, params, 1e-5, tolerance)};
}

}  // namespace

std::vector<NamedGradCheck> check_primitives(std::uint64_t seed, double tolerance) {
  std::vector<NamedGradCheck> out;
  Rng rng(seed);
  auto param = [&](ParameterStore& s, const std::string& name, ad::Shape shape,
                   double lo = -1.0, double hi = 1.0) -> Parameter& {
    Parameter& p = s.add(name, std::move(shape));
    rng.fill(p.value, lo, hi);
    return p;
  };
  auto weights = [&](std::size_t n) {
    ad::Tensor w({n});
    rng.fill(w);
    return w;
  };

  const std::size_t m = rng.dim(1, 5), n = rng.dim(1, 5), k = rng.dim(1, 5);

  {
    ParameterStore s;
    Parameter& a = param(s, "a", {m, k});
    Parameter& b = param(s, "b", {k, n});
    const auto w = weights(m * n);
    out.push_back(check("matmul", s, [&](Graph& g) {
      return project(g, ad::matmul(g.param(a), g.param(b)), w);
    }, tolerance));
  }
  {
    ParameterStore s;
    Parameter& W = param(s, "W", {m, n});
    Parameter& x = param(s, "x", {n});
    Parameter& b = param(s, "b", {m});
    const auto w = weights(m);
    out.push_back(check("matvec", s, [&](Graph& g) {
      return project(g, ad::matvec(g.param(W), g.param(x)), w);
    }, tolerance));
    out.push_back(check("affine", s, [&](Graph& g) {
      return project(g, ad::affine(g.param(W), g.param(b), g.param(x)), w);
    }, tolerance));
  }
  {
    ParameterStore s;
    Parameter& u = param(s, "u", {m});
    Parameter& W = param(s, "W", {m, n});
    Parameter& v = param(s, "v", {n});
    out.push_back(check("bilinear", s, [&](Graph& g) {
      return ad::bilinear(g.param(u), g.param(W), g.param(v));
    }, tolerance));
  }
  {
    ParameterStore s;
    Parameter& a = param(s, "a", {n});
    Parameter& b = param(s, "b", {n});
    Parameter& c = param(s, "c", {n}, 0.5, 2.0);  // positive for log
    const auto w = weights(n);
    out.push_back(check("dot", s, [&](Graph& g) {
      return ad::sigmoid(ad::dot(g.param(a), g.param(b)));
    }, tolerance));
    out.push_back(check("add", s, [&](Graph& g) {
      return project(g, g.param(a) + g.param(b), w);
    }, tolerance));
    out.push_back(check("sub", s, [&](Graph& g) {
      return project(g, g.param(a) - g.param(b), w);
    }, tolerance));
    out.push_back(check("mul", s, [&](Graph& g) {
      return project(g, g.param(a) * g.param(b), w);
    }, tolerance));
    out.push_back(check("scale", s, [&](Graph& g) {
      return project(g, ad::scale(g.param(a), -1.7), w);
    }, tolerance));
    out.push_back(check("tanh", s, [&](Graph& g) {
      return project(g, ad::tanh(g.param(a)), w);
    }, tolerance));
    out.push_back(check("sigmoid", s, [&](Graph& g) {
      return project(g, ad::sigmoid(g.param(a)), w);
    }, tolerance));
    out.push_back(check("exp", s, [&](Graph& g) {
      return project(g, ad::exp(g.param(a)), w);
    }, tolerance));
    out.push_back(check("log", s, [&](Graph& g) {
      return project(g, ad::log(g.param(c)), w);
    }, tolerance));
    out.push_back(check("sum", s, [&](Graph& g) {
      return ad::sum(g.param(a) * g.param(b));
    }, tolerance));
    out.push_back(check("add_n", s, [&](Graph& g) {
      std::vector<Var> t{g.param(a), g.param(b), g.param(a)};
      return project(g, ad::add_n(t), w);
    }, tolerance));
    out.push_back(check("mean_n", s, [&](Graph& g) {
      std::vector<Var> t{g.param(a), g.param(b), g.param(c)};
      return project(g, ad::mean_n(t), w);
    }, tolerance));
    out.push_back(check("softmax", s, [&](Graph& g) {
      return project(g, ad::softmax(g.param(a)), w);
    }, tolerance));
    out.push_back(check("log_softmax", s, [&](Graph& g) {
      return project(g, ad::log_softmax(g.param(a)), w);
    }, tolerance));
    const std::size_t target = rng.dim(0, n - 1);
    out.push_back(check("nll_softmax", s, [&, target](Graph& g) {
      return ad::nll_softmax(g.param(a), target);
    }, tolerance));
    out.push_back(check("nll_sigmoid", s, [&](Graph& g) {
      return ad::nll_sigmoid(ad::dot(g.param(a), g.param(b)), true) +
             ad::nll_sigmoid(ad::dot(g.param(a), g.param(c)), false);
    }, tolerance));
  }
  {
    ParameterStore s;
    Parameter& a = param(s, "a", {m});
    Parameter& b = param(s, "b", {n});
    const auto w = weights(m + n);
    const std::size_t off = rng.dim(0, m + n - 1);
    const std::size_t len = rng.dim(1, m + n - off);
    const auto ws = weights(len);
    out.push_back(check("concat", s, [&](Graph& g) {
      return project(g, ad::concat({g.param(a), g.param(b)}), w);
    }, tolerance));
    out.push_back(check("slice", s, [&, off, len](Graph& g) {
      return project(g, ad::slice(ad::concat({g.param(a), g.param(b)}), off, len), ws);
    }, tolerance));
    const std::size_t idx = rng.dim(0, m - 1);
    out.push_back(check("pick", s, [&, idx](Graph& g) {
      return ad::tanh(ad::pick(g.param(a), idx));
    }, tolerance));
  }
  {
    ParameterStore s;
    Parameter& table = param(s, "table", {m + 1, n});
    const std::size_t row = rng.dim(0, m);
    const auto w = weights(n);
    out.push_back(check("embedding_lookup", s, [&, row](Graph& g) {
      return project(g, ad::tanh(g.lookup(table, row)), w);
    }, tolerance));
  }
  {
    ParameterStore s;
    ad::GruCell gru = ad::GruCell::create(s, "gru", n, m);
    for (Parameter* p : s.all()) rng.fill(p->value, -0.8, 0.8);
    Parameter& x = param(s, "x", {n});
    Parameter& h = param(s, "h", {m});
    const auto w = weights(m);
    out.push_back(check("gru_cell", s, [&](Graph& g) {
      Var h1 = gru.step(g.param(x), g.param(h));
      return project(g, gru.step(g.param(x), h1), w);
    }, tolerance));
  }
  {
    ParameterStore s;
    ad::LstmCell lstm = ad::LstmCell::create(s, "lstm", n, m);
    for (Parameter* p : s.all()) rng.fill(p->value, -0.8, 0.8);
    Parameter& x = param(s, "x", {n});
    Parameter& h = param(s, "h", {m});
    Parameter& c = param(s, "c", {m});
    const auto w = weights(2 * m);
    out.push_back(check("lstm_cell", s, [&](Graph& g) {
      ad::LstmState st = lstm.step(g.param(x), {g.param(h), g.param(c)});
      st = lstm.step(g.param(x), st);
      return project(g, ad::concat({st.h, st.c}), w);
    }, tolerance));
  }
  return out;
}

NamedGradCheck check_sequence_loss(std::uint64_t seed, const ModelDims& dims,
                                   double tolerance) {
  SynthOptions so;
  so.seed = seed;
  so.n_games = 1;
  so.n_players = 2;
  so.dnp_probability = 0.0;
  Dataset ds = synth_corpus(so);
  Document doc = ds.train.at(0);
  const GameData& game = doc.game;
  const Entity* player = nullptr;
  for (const Entity& e : game.entities) {
    if (e.kind == EntityKind::kPlayer) {
      player = &e;
      break;
    }
  }
  LabeledSummary s;
  s.tokens = {game.find_record(player->id, "SECOND_NAME")->value,
              game.find_record(player->id, "PTS")->value};
  s.z = {1, 1};
  s.e = {player->id, player->id};
  s.a = {std::string("SECOND_NAME"), std::string("PTS")};
  s.n = {std::nullopt, std::uint8_t{0}};
  doc.summary = s;

  Model model(dims, build_vocabularies({doc}, ds.writers, 1));
  model.initialize(seed);
  auto params = model.params().all();
  auto report = ad::grad_check(
      [&](Graph& g) { return sequence_loss(g, model, doc.game, doc.summary).total; },
      params, 1e-5, tolerance);
  return {"sequence_loss", std::move(report)};
}

GradCheckSuite run_gradcheck_suite(std::uint64_t seed, const ModelDims& dims,
                                   double tolerance) {
  GradCheckSuite suite;
  suite.checks = check_primitives(seed, tolerance);
  suite.checks.push_back(check_sequence_loss(seed, dims, tolerance));
  for (const auto& c : suite.checks) {
    suite.max_rel_error = std::max(suite.max_rel_error, c.report.max_rel_error);
    suite.passed = suite.passed && c.report.passed;
  }
  return suite;
}

}  // namespace saltrack
