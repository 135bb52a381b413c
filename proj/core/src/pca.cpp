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

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "saltrack/metrics.hpp"

namespace saltrack {

PcaResult pca_project(const std::vector<std::vector<double>>& vectors, std::size_t k) {
  if (vectors.empty()) throw std::invalid_argument("pca: no vectors");
  const auto n = static_cast<Eigen::Index>(vectors.size());
  const auto d = static_cast<Eigen::Index>(vectors[0].size());
  if (k == 0 || static_cast<Eigen::Index>(k) > d) {
    throw std::invalid_argument("pca: k must be in [1, dimension]");
  }
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(vectors[i].size()) != d) {
      throw std::invalid_argument("pca: ragged input");
    }
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = vectors[i][j];
  }
  x.rowwise() -= x.colwise().mean();
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  const Eigen::MatrixXd cov = (x.transpose() * x) / denom;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("pca: eigensolver failed");
  // Eigenvalues come back ascending.
  const Eigen::VectorXd values = eig.eigenvalues();
  const double total = std::max(values.sum(), 0.0);
  PcaResult out;
  Eigen::MatrixXd basis(d, static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < k; ++c) {
    const Eigen::Index col = d - 1 - static_cast<Eigen::Index>(c);
    Eigen::VectorXd v = eig.eigenvectors().col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    basis.col(static_cast<Eigen::Index>(c)) = v;
    const double var = std::max(values(col), 0.0);
    out.explained_variance.push_back(var);
    out.explained_ratio.push_back(total > 0 ? var / total : 0.0);
    out.components.emplace_back(v.data(), v.data() + d);
  }
  const Eigen::MatrixXd proj = x * basis;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.coordinates.emplace_back(k);
    for (std::size_t c = 0; c < k; ++c) {
      out.coordinates.back()[c] = proj(i, static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

}  // namespace saltrack
