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

// Minimal reverse-mode automatic differentiation over dense double tensors.
//
// A Graph is a tape: every op appends a node holding its value and a
// backward rule, so node order is a topological order. backward() walks the
// tape once in reverse. Parameters live outside graphs; a graph reads them
// through param()/lookup() leaves and accumulates into Parameter::grad.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace saltrack::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor vector(std::initializer_list<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::initializer_list<double> row_major);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::size_t rank() const { return shape_.size(); }
  std::size_t rows() const { return shape_.empty() ? 1 : shape_[0]; }
  std::size_t cols() const { return shape_.size() < 2 ? 1 : shape_[1]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  void fill(double v);
  bool all_finite() const;

 private:
  Shape shape_;
  std::vector<double> data_;
};

struct Parameter {
  Parameter(std::string name, Tensor value);

  std::string name;
  Tensor value;
  Tensor grad;

  void zero_grad() { grad.fill(0.0); }
};

// Owns parameters at stable addresses, in insertion order.
class ParameterStore {
 public:
  Parameter& add(std::string name, Shape shape);
  Parameter* find(std::string_view name);
  const Parameter* find(std::string_view name) const;
  Parameter& get(std::string_view name);

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return *params_[i]; }
  const Parameter& operator[](std::size_t i) const { return *params_[i]; }
  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;

  std::size_t scalar_count() const;
  void zero_grad();

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

class Graph;

// Handle to a graph node. Cheap to copy; valid while its graph lives.
class Var {
 public:
  Var() = default;

  bool valid() const { return graph_ != nullptr; }
  std::size_t id() const { return id_; }
  Graph& graph() const { return *graph_; }

  const Shape& shape() const;
  std::size_t size() const;
  std::span<const double> value() const;
  double scalar() const;
  // Empty until backward() reached this node.
  std::span<const double> grad() const;

  friend bool operator==(const Var& a, const Var& b) {
    return a.graph_ == b.graph_ && a.id_ == b.id_;
  }

 private:
  friend class Graph;
  Var(Graph* g, std::size_t id) : graph_(g), id_(id) {}

  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

class Graph {
 public:
  using Backward = std::function<void(Graph&, std::size_t self)>;

  struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;  // lazily sized by grad_of()
    Backward backward;
  };

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor t);
  // Leaf reading p.value; cached so a parameter appears once per graph.
  Var param(Parameter& p);
  // One row of a rank-2 table; the gradient goes straight into table.grad.
  Var lookup(Parameter& table, std::size_t row);

  // Requires a single-element loss. Gradients accumulate into parameters.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

  // Op-implementation interface.
  Var emit(Shape shape, std::vector<double> value, Backward backward = {});
  Node& node(std::size_t id) { return nodes_[id]; }
  const Node& node(std::size_t id) const { return nodes_[id]; }
  std::vector<double>& grad_of(std::size_t id);

 private:
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
};

// Linear algebra. Vectors are rank 1, matrices rank 2, scalars have
// exactly one element.
Var matmul(Var a, Var b);
Var matvec(Var w, Var x);
Var affine(Var w, Var b, Var x);  // w x + b
Var bilinear(Var u, Var w, Var v);  // u^T w v
Var dot(Var a, Var b);

// Elementwise, equal shapes.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var tanh(Var a);
Var sigmoid(Var a);
Var exp(Var a);
Var log(Var a);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }

Var sum(Var a);
Var add_n(std::span<const Var> terms);
Var mean_n(std::span<const Var> terms);

Var concat(std::span<const Var> parts);
inline Var concat(std::initializer_list<Var> parts) {
  return concat(std::span<const Var>(parts.begin(), parts.size()));
}
Var slice(Var a, std::size_t offset, std::size_t length);
Var pick(Var a, std::size_t index);

Var softmax(Var logits);
Var log_softmax(Var logits);

// -log softmax(logits)[target], computed stably.
Var nll_softmax(Var logits, std::size_t target);
// -log sigmoid(logit) for target 1, -log(1 - sigmoid(logit)) for target 0.
Var nll_sigmoid(Var logit, bool target);

// Gate order for the stacked weights is documented in docs/checkpoint.md.
//
// GRU, gates stacked [reset; update; candidate]:
//   r  = sigmoid(W_ir x + b_ir + W_hr h + b_hr)
//   u  = sigmoid(W_iu x + b_iu + W_hu h + b_hu)
//   n  = tanh(W_in x + b_in + r * (W_hn h + b_hn))
//   h' = (1 - u) * n + u * h
class GruCell {
 public:
  GruCell() = default;
  static GruCell create(ParameterStore& store, const std::string& name,
                        std::size_t input, std::size_t hidden);
  static GruCell bind(ParameterStore& store, const std::string& name);

  Var step(Var x, Var h) const;
  std::size_t input_size() const { return input_; }
  std::size_t hidden_size() const { return hidden_; }

 private:
  Parameter* w_ih_ = nullptr;
  Parameter* w_hh_ = nullptr;
  Parameter* b_ih_ = nullptr;
  Parameter* b_hh_ = nullptr;
  std::size_t input_ = 0;
  std::size_t hidden_ = 0;
};

struct LstmState {
  Var h;
  Var c;
};

// LSTM, gates stacked [input; forget; cell; output]:
//   i = sigmoid(.), f = sigmoid(.), g = tanh(.), o = sigmoid(.)
//   c' = f * c + i * g,  h' = o * tanh(c')
class LstmCell {
 public:
  LstmCell() = default;
  static LstmCell create(ParameterStore& store, const std::string& name,
                         std::size_t input, std::size_t hidden);
  static LstmCell bind(ParameterStore& store, const std::string& name);

  LstmState step(Var x, LstmState state) const;
  std::size_t input_size() const { return input_; }
  std::size_t hidden_size() const { return hidden_; }

 private:
  Parameter* w_ih_ = nullptr;
  Parameter* w_hh_ = nullptr;
  Parameter* b_ih_ = nullptr;
  Parameter* b_hh_ = nullptr;
  std::size_t input_ = 0;
  std::size_t hidden_ = 0;
};

struct GradCheckEntry {
  std::string name;
  std::size_t checked = 0;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

// Relative error between analytic and numeric derivatives:
//   |a - n| / max(|a|, |n|, floor)
// The floor keeps vanishing derivatives from turning round-off into
// arbitrarily large ratios.
inline constexpr double kGradCheckFloor = 1e-3;

// Compares backward() against central differences of f for every scalar of
// every listed parameter. f must build a deterministic single-element loss.
GradCheckReport grad_check(const std::function<Var(Graph&)>& f,
                           std::span<Parameter* const> params,
                           double epsilon = 1e-5, double tolerance = 1e-4);

}  // namespace saltrack::ad
