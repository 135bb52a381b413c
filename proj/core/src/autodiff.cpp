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

#include "saltrack/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace saltrack::ad {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

const std::vector<double>& val(Graph& g, std::size_t id) {
  return g.node(id).value;
}

void require_same(Var a, Var b, const char* op) {
  require(a.shape() == b.shape(), std::string(op) + ": shape mismatch " +
                                      shape_string(a.shape()) + " vs " +
                                      shape_string(b.shape()));
}

template <class F, class D>
Var unary(Var a, F f, D df_from_xy) {
  Graph& g = a.graph();
  const auto& x = a.value();
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  const std::size_t ia = a.id();
  return g.emit(a.shape(), std::move(y), [ia, df_from_xy](Graph& g, std::size_t self) {
    const auto& out = g.node(self);
    const auto& x = val(g, ia);
    auto& gx = g.grad_of(ia);
    for (std::size_t i = 0; i < x.size(); ++i) {
      gx[i] += out.grad[i] * df_from_xy(x[i], out.value[i]);
    }
  });
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  require(data_.size() == shape_size(shape_),
          "Tensor: data length " + std::to_string(data_.size()) +
              " does not match shape " + shape_string(shape_));
}

Tensor Tensor::vector(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::initializer_list<double> row_major) {
  return Tensor({rows, cols}, std::vector<double>(row_major));
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Parameter::Parameter(std::string n, Tensor v)
    : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

Parameter& ParameterStore::add(std::string name, Shape shape) {
  if (index_.count(name)) {
    throw std::invalid_argument("duplicate parameter '" + name + "'");
  }
  index_.emplace(name, params_.size());
  params_.push_back(
      std::make_unique<Parameter>(std::move(name), Tensor(std::move(shape))));
  return *params_.back();
}

Parameter* ParameterStore::find(std::string_view name) {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : params_[it->second].get();
}

const Parameter* ParameterStore::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : params_[it->second].get();
}

Parameter& ParameterStore::get(std::string_view name) {
  Parameter* p = find(name);
  if (!p) throw std::out_of_range("no parameter '" + std::string(name) + "'");
  return *p;
}

std::vector<Parameter*> ParameterStore::all() {
  std::vector<Parameter*> out;
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParameterStore::all() const {
  std::vector<const Parameter*> out;
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

const Shape& Var::shape() const { return graph_->node(id_).shape; }
std::size_t Var::size() const { return graph_->node(id_).value.size(); }
std::span<const double> Var::value() const { return graph_->node(id_).value; }
std::span<const double> Var::grad() const { return graph_->node(id_).grad; }

double Var::scalar() const {
  require(size() == 1, "scalar(): node has shape " + shape_string(shape()));
  return value()[0];
}

Var Graph::emit(Shape shape, std::vector<double> value, Backward backward) {
  nodes_.push_back({std::move(shape), std::move(value), {}, std::move(backward)});
  return Var(this, nodes_.size() - 1);
}

std::vector<double>& Graph::grad_of(std::size_t id) {
  auto& n = nodes_[id];
  if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
  return n.grad;
}

Var Graph::constant(Tensor t) {
  Shape shape = t.shape();
  return emit(std::move(shape), std::move(t.storage()));
}

Var Graph::param(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) {
    return Var(this, it->second);
  }
  Parameter* pp = &p;
  Var v = emit(p.value.shape(),
               std::vector<double>(p.value.data().begin(), p.value.data().end()),
               [pp](Graph& g, std::size_t self) {
                 const auto& gr = g.node(self).grad;
                 auto dst = pp->grad.data();
                 for (std::size_t i = 0; i < gr.size(); ++i) dst[i] += gr[i];
               });
  param_nodes_.emplace(&p, v.id());
  return v;
}

Var Graph::lookup(Parameter& table, std::size_t row) {
  require(table.value.rank() == 2, "lookup: table '" + table.name +
                                       "' must be rank 2, got " +
                                       shape_string(table.value.shape()));
  require(row < table.value.rows(),
          "lookup: row " + std::to_string(row) + " out of range for '" +
              table.name + "' " + shape_string(table.value.shape()));
  const std::size_t d = table.value.cols();
  auto src = table.value.data().subspan(row * d, d);
  Parameter* tp = &table;
  return emit({d}, std::vector<double>(src.begin(), src.end()),
              [tp, row, d](Graph& g, std::size_t self) {
                const auto& gr = g.node(self).grad;
                auto dst = tp->grad.data().subspan(row * d, d);
                for (std::size_t i = 0; i < d; ++i) dst[i] += gr[i];
              });
}

void Graph::backward(Var loss) {
  if (!loss.valid() || &loss.graph() != this) {
    throw std::invalid_argument("backward: loss does not belong to this graph");
  }
  if (loss.size() != 1) {
    throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                shape_string(loss.shape()));
  }
  for (auto& n : nodes_) n.grad.clear();
  grad_of(loss.id())[0] = 1.0;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    auto& n = nodes_[i];
    if (n.grad.empty() || !n.backward) continue;
    n.backward(*this, i);
  }
}

Var matvec(Var w, Var x) {
  require(w.shape().size() == 2 && x.shape().size() == 1 &&
              w.shape()[1] == x.shape()[0],
          "matvec: cannot multiply " + shape_string(w.shape()) + " by " +
              shape_string(x.shape()));
  Graph& g = w.graph();
  const std::size_t m = w.shape()[0], n = w.shape()[1];
  const auto& W = w.value();
  const auto& X = x.value();
  std::vector<double> y(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = W.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * X[j];
    y[i] = acc;
  }
  const std::size_t iw = w.id(), ix = x.id();
  return g.emit({m}, std::move(y), [iw, ix, m, n](Graph& g, std::size_t self) {
    const auto& gy = g.node(self).grad;
    const auto& W = val(g, iw);
    const auto& X = val(g, ix);
    auto& gw = g.grad_of(iw);
    auto& gx = g.grad_of(ix);
    for (std::size_t i = 0; i < m; ++i) {
      const double gi = gy[i];
      if (gi == 0.0) continue;
      double* gw_row = gw.data() + i * n;
      const double* w_row = W.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        gw_row[j] += gi * X[j];
        gx[j] += gi * w_row[j];
      }
    }
  });
}

Var affine(Var w, Var b, Var x) {
  require(b.shape().size() == 1 && w.shape().size() == 2 &&
              b.shape()[0] == w.shape()[0],
          "affine: bias " + shape_string(b.shape()) + " does not match " +
              shape_string(w.shape()));
  return add(matvec(w, x), b);
}

Var matmul(Var a, Var b) {
  if (b.shape().size() == 1) return matvec(a, b);
  require(a.shape().size() == 2 && b.shape().size() == 2 &&
              a.shape()[1] == b.shape()[0],
          "matmul: cannot multiply " + shape_string(a.shape()) + " by " +
              shape_string(b.shape()));
  Graph& g = a.graph();
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  const auto& A = a.value();
  const auto& B = b.value();
  std::vector<double> c(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aip * B[p * n + j];
    }
  }
  const std::size_t ia = a.id(), ib = b.id();
  return g.emit({m, n}, std::move(c), [ia, ib, m, k, n](Graph& g, std::size_t self) {
    const auto& gc = g.node(self).grad;
    const auto& A = val(g, ia);
    const auto& B = val(g, ib);
    auto& ga = g.grad_of(ia);
    auto& gb = g.grad_of(ib);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          acc += gc[i * n + j] * B[p * n + j];
          gb[p * n + j] += A[i * k + p] * gc[i * n + j];
        }
        ga[i * k + p] += acc;
      }
    }
  });
}

Var dot(Var a, Var b) {
  require(a.size() == b.size(), "dot: length mismatch " +
                                    shape_string(a.shape()) + " vs " +
                                    shape_string(b.shape()));
  Graph& g = a.graph();
  const auto& x = a.value();
  const auto& y = b.value();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  const std::size_t ia = a.id(), ib = b.id();
  return g.emit({}, {s}, [ia, ib](Graph& g, std::size_t self) {
    const double gs = g.node(self).grad[0];
    const auto& x = val(g, ia);
    const auto& y = val(g, ib);
    auto& gx = g.grad_of(ia);
    auto& gy = g.grad_of(ib);
    for (std::size_t i = 0; i < x.size(); ++i) {
      gx[i] += gs * y[i];
      gy[i] += gs * x[i];
    }
  });
}

Var bilinear(Var u, Var w, Var v) {
  require(w.shape().size() == 2 && u.size() == w.shape()[0] &&
              v.size() == w.shape()[1],
          "bilinear: " + shape_string(u.shape()) + " x " +
              shape_string(w.shape()) + " x " + shape_string(v.shape()));
  return dot(u, matvec(w, v));
}

Var add(Var a, Var b) {
  require_same(a, b, "add");
  Graph& g = a.graph();
  const auto& x = a.value();
  const auto& y = b.value();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  const std::size_t ia = a.id(), ib = b.id();
  return g.emit(a.shape(), std::move(out), [ia, ib](Graph& g, std::size_t self) {
    const auto& go = g.node(self).grad;
    auto& gx = g.grad_of(ia);
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
    auto& gy = g.grad_of(ib);
    for (std::size_t i = 0; i < go.size(); ++i) gy[i] += go[i];
  });
}

Var sub(Var a, Var b) {
  require_same(a, b, "sub");
  Graph& g = a.graph();
  const auto& x = a.value();
  const auto& y = b.value();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  const std::size_t ia = a.id(), ib = b.id();
  return g.emit(a.shape(), std::move(out), [ia, ib](Graph& g, std::size_t self) {
    const auto& go = g.node(self).grad;
    auto& gx = g.grad_of(ia);
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
    auto& gy = g.grad_of(ib);
    for (std::size_t i = 0; i < go.size(); ++i) gy[i] -= go[i];
  });
}

Var mul(Var a, Var b) {
  require_same(a, b, "mul");
  Graph& g = a.graph();
  const auto& x = a.value();
  const auto& y = b.value();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
  const std::size_t ia = a.id(), ib = b.id();
  return g.emit(a.shape(), std::move(out), [ia, ib](Graph& g, std::size_t self) {
    const auto& go = g.node(self).grad;
    const auto& x = val(g, ia);
    const auto& y = val(g, ib);
    auto& gx = g.grad_of(ia);
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i] * y[i];
    auto& gy = g.grad_of(ib);
    for (std::size_t i = 0; i < go.size(); ++i) gy[i] += go[i] * x[i];
  });
}

Var scale(Var a, double s) {
  return unary(
      a, [s](double x) { return s * x; },
      [s](double, double) { return s; });
}

Var tanh(Var a) {
  return unary(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var a) {
  return unary(a, stable_sigmoid,
               [](double, double y) { return y * (1.0 - y); });
}

Var exp(Var a) {
  return unary(
      a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Var log(Var a) {
  for (double x : a.value()) {
    if (!(x > 0.0)) throw std::domain_error("log: non-positive input");
  }
  return unary(
      a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Var sum(Var a) {
  Graph& g = a.graph();
  double s = 0.0;
  for (double x : a.value()) s += x;
  const std::size_t ia = a.id();
  return g.emit({}, {s}, [ia](Graph& g, std::size_t self) {
    const double gs = g.node(self).grad[0];
    auto& gx = g.grad_of(ia);
    for (double& v : gx) v += gs;
  });
}

Var add_n(std::span<const Var> terms) {
  require(!terms.empty(), "add_n: no terms");
  Graph& g = terms[0].graph();
  std::vector<double> out(terms[0].value().begin(), terms[0].value().end());
  std::vector<std::size_t> ids{terms[0].id()};
  for (std::size_t t = 1; t < terms.size(); ++t) {
    require_same(terms[0], terms[t], "add_n");
    const auto& x = terms[t].value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += x[i];
    ids.push_back(terms[t].id());
  }
  return g.emit(terms[0].shape(), std::move(out),
                [ids = std::move(ids)](Graph& g, std::size_t self) {
                  const auto& go = g.node(self).grad;
                  for (std::size_t id : ids) {
                    auto& gx = g.grad_of(id);
                    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
                  }
                });
}

Var mean_n(std::span<const Var> terms) {
  return scale(add_n(terms), 1.0 / static_cast<double>(terms.size()));
}

Var concat(std::span<const Var> parts) {
  require(!parts.empty(), "concat: no parts");
  Graph& g = parts[0].graph();
  std::vector<double> out;
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // (id, length)
  for (const Var& p : parts) {
    require(p.shape().size() <= 1,
            "concat: expects vectors, got " + shape_string(p.shape()));
    const auto& x = p.value();
    out.insert(out.end(), x.begin(), x.end());
    spans.emplace_back(p.id(), x.size());
  }
  const std::size_t n = out.size();
  return g.emit({n}, std::move(out),
                [spans = std::move(spans)](Graph& g, std::size_t self) {
                  const auto& go = g.node(self).grad;
                  std::size_t off = 0;
                  for (auto [id, len] : spans) {
                    auto& gx = g.grad_of(id);
                    for (std::size_t i = 0; i < len; ++i) gx[i] += go[off + i];
                    off += len;
                  }
                });
}

Var slice(Var a, std::size_t offset, std::size_t length) {
  require(a.shape().size() == 1 && offset + length <= a.size(),
          "slice: [" + std::to_string(offset) + ", " +
              std::to_string(offset + length) + ") out of range for " +
              shape_string(a.shape()));
  Graph& g = a.graph();
  auto x = a.value().subspan(offset, length);
  const std::size_t ia = a.id();
  return g.emit({length}, std::vector<double>(x.begin(), x.end()),
                [ia, offset](Graph& g, std::size_t self) {
                  const auto& go = g.node(self).grad;
                  auto& gx = g.grad_of(ia);
                  for (std::size_t i = 0; i < go.size(); ++i) {
                    gx[offset + i] += go[i];
                  }
                });
}

Var pick(Var a, std::size_t index) {
  require(index < a.size(), "pick: index " + std::to_string(index) +
                                " out of range for " + shape_string(a.shape()));
  Graph& g = a.graph();
  const std::size_t ia = a.id();
  return g.emit({}, {a.value()[index]}, [ia, index](Graph& g, std::size_t self) {
    g.grad_of(ia)[index] += g.node(self).grad[0];
  });
}

Var softmax(Var logits) {
  require(logits.shape().size() == 1 && logits.size() > 0,
          "softmax: expects a non-empty vector, got " +
              shape_string(logits.shape()));
  Graph& g = logits.graph();
  const auto& x = logits.value();
  const double mx = *std::max_element(x.begin(), x.end());
  std::vector<double> p(x.size());
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) z += (p[i] = std::exp(x[i] - mx));
  for (double& v : p) v /= z;
  const std::size_t ia = logits.id();
  return g.emit(logits.shape(), std::move(p), [ia](Graph& g, std::size_t self) {
    const auto& out = g.node(self);
    double inner = 0.0;
    for (std::size_t i = 0; i < out.value.size(); ++i) {
      inner += out.grad[i] * out.value[i];
    }
    auto& gx = g.grad_of(ia);
    for (std::size_t i = 0; i < out.value.size(); ++i) {
      gx[i] += out.value[i] * (out.grad[i] - inner);
    }
  });
}

Var log_softmax(Var logits) {
  require(logits.shape().size() == 1 && logits.size() > 0,
          "log_softmax: expects a non-empty vector, got " +
              shape_string(logits.shape()));
  Graph& g = logits.graph();
  const auto& x = logits.value();
  const double mx = *std::max_element(x.begin(), x.end());
  double z = 0.0;
  for (double v : x) z += std::exp(v - mx);
  const double lz = mx + std::log(z);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - lz;
  const std::size_t ia = logits.id();
  return g.emit(logits.shape(), std::move(out), [ia](Graph& g, std::size_t self) {
    const auto& node = g.node(self);
    double total = 0.0;
    for (double v : node.grad) total += v;
    auto& gx = g.grad_of(ia);
    for (std::size_t i = 0; i < node.value.size(); ++i) {
      gx[i] += node.grad[i] - std::exp(node.value[i]) * total;
    }
  });
}

Var nll_softmax(Var logits, std::size_t target) {
  require(logits.shape().size() == 1 && target < logits.size(),
          "nll_softmax: target " + std::to_string(target) +
              " out of range for " + shape_string(logits.shape()));
  Graph& g = logits.graph();
  const auto& x = logits.value();
  const double mx = *std::max_element(x.begin(), x.end());
  double z = 0.0;
  for (double v : x) z += std::exp(v - mx);
  const double loss = mx + std::log(z) - x[target];
  const std::size_t ia = logits.id();
  return g.emit({}, {loss}, [ia, target](Graph& g, std::size_t self) {
    const double gl = g.node(self).grad[0];
    const auto& x = val(g, ia);
    const double mx = *std::max_element(x.begin(), x.end());
    double z = 0.0;
    for (double v : x) z += std::exp(v - mx);
    auto& gx = g.grad_of(ia);
    for (std::size_t i = 0; i < x.size(); ++i) {
      gx[i] += gl * (std::exp(x[i] - mx) / z - (i == target ? 1.0 : 0.0));
    }
  });
}

Var nll_sigmoid(Var logit, bool target) {
  require(logit.size() == 1, "nll_sigmoid: expects a scalar, got " +
                                 shape_string(logit.shape()));
  Graph& g = logit.graph();
  const double x = logit.value()[0];
  const double loss = target ? softplus(-x) : softplus(x);
  const std::size_t ia = logit.id();
  return g.emit({}, {loss}, [ia, target](Graph& g, std::size_t self) {
    const double gl = g.node(self).grad[0];
    const double p = stable_sigmoid(val(g, ia)[0]);
    g.grad_of(ia)[0] += gl * (p - (target ? 1.0 : 0.0));
  });
}

GruCell GruCell::create(ParameterStore& store, const std::string& name,
                        std::size_t input, std::size_t hidden) {
  store.add(name + ".w_ih", {3 * hidden, input});
  store.add(name + ".w_hh", {3 * hidden, hidden});
  store.add(name + ".b_ih", {3 * hidden});
  store.add(name + ".b_hh", {3 * hidden});
  return bind(store, name);
}

GruCell GruCell::bind(ParameterStore& store, const std::string& name) {
  GruCell c;
  c.w_ih_ = &store.get(name + ".w_ih");
  c.w_hh_ = &store.get(name + ".w_hh");
  c.b_ih_ = &store.get(name + ".b_ih");
  c.b_hh_ = &store.get(name + ".b_hh");
  c.hidden_ = c.w_hh_->value.cols();
  c.input_ = c.w_ih_->value.cols();
  return c;
}

Var GruCell::step(Var x, Var h) const {
  require(x.size() == input_ && h.size() == hidden_,
          "gru_cell: expected input " + std::to_string(input_) + " and state " +
              std::to_string(hidden_) + ", got " + shape_string(x.shape()) +
              " and " + shape_string(h.shape()));
  Graph& g = x.graph();
  const std::size_t H = hidden_;
  Var gi = affine(g.param(*w_ih_), g.param(*b_ih_), x);
  Var gh = affine(g.param(*w_hh_), g.param(*b_hh_), h);
  Var r = sigmoid(slice(gi, 0, H) + slice(gh, 0, H));
  Var u = sigmoid(slice(gi, H, H) + slice(gh, H, H));
  Var n = tanh(slice(gi, 2 * H, H) + r * slice(gh, 2 * H, H));
  return n + u * (h - n);
}

LstmCell LstmCell::create(ParameterStore& store, const std::string& name,
                          std::size_t input, std::size_t hidden) {
  store.add(name + ".w_ih", {4 * hidden, input});
  store.add(name + ".w_hh", {4 * hidden, hidden});
  store.add(name + ".b_ih", {4 * hidden});
  store.add(name + ".b_hh", {4 * hidden});
  return bind(store, name);
}

LstmCell LstmCell::bind(ParameterStore& store, const std::string& name) {
  LstmCell c;
  c.w_ih_ = &store.get(name + ".w_ih");
  c.w_hh_ = &store.get(name + ".w_hh");
  c.b_ih_ = &store.get(name + ".b_ih");
  c.b_hh_ = &store.get(name + ".b_hh");
  c.hidden_ = c.w_hh_->value.cols();
  c.input_ = c.w_ih_->value.cols();
  return c;
}

LstmState LstmCell::step(Var x, LstmState s) const {
  require(x.size() == input_ && s.h.size() == hidden_ && s.c.size() == hidden_,
          "lstm_cell: expected input " + std::to_string(input_) +
              " and state " + std::to_string(hidden_) + ", got " +
              shape_string(x.shape()) + " and " + shape_string(s.h.shape()));
  Graph& g = x.graph();
  const std::size_t H = hidden_;
  Var gates = affine(g.param(*w_ih_), g.param(*b_ih_), x) +
              affine(g.param(*w_hh_), g.param(*b_hh_), s.h);
  Var i = sigmoid(slice(gates, 0, H));
  Var f = sigmoid(slice(gates, H, H));
  Var c_hat = tanh(slice(gates, 2 * H, H));
  Var o = sigmoid(slice(gates, 3 * H, H));
  Var c = f * s.c + i * c_hat;
  return {o * tanh(c), c};
}

GradCheckReport grad_check(const std::function<Var(Graph&)>& f,
                           std::span<Parameter* const> params, double epsilon,
                           double tolerance) {
  GradCheckReport report;
  report.tolerance = tolerance;
  for (Parameter* p : params) p->zero_grad();
  {
    Graph g;
    g.backward(f(g));
  }
  std::vector<Tensor> analytic;
  for (Parameter* p : params) analytic.push_back(p->grad);

  auto eval = [&f]() {
    Graph g;
    return f(g).scalar();
  };
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    GradCheckEntry entry{p.name, 0, 0.0, 0.0};
    auto data = p.value.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double saved = data[i];
      data[i] = saved + epsilon;
      const double up = eval();
      data[i] = saved - epsilon;
      const double down = eval();
      data[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic[k][i];
      const double abs_err = std::abs(a - numeric);
      const double rel_err =
          abs_err / std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
      entry.max_abs_error = std::max(entry.max_abs_error, abs_err);
      entry.max_rel_error = std::max(entry.max_rel_error, rel_err);
      ++entry.checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.entries.push_back(std::move(entry));
  }
  for (std::size_t k = 0; k < params.size(); ++k) params[k]->grad = analytic[k];
  report.passed = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace saltrack::ad
