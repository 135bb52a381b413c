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

// Teacher-forced training of the factored log-likelihood
//   sum_t log p(Z_t) + sum_{Z_t=1} [log p(E_t) + log p(A_t) + log p(N_t)]
//                    + sum_{Z_t=0} log p(Y_t)
// with AMSGrad, global-norm clipping and dev-BLEU model selection.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "saltrack/autodiff.hpp"
#include "saltrack/model.hpp"
#include "saltrack/records.hpp"

namespace saltrack {

enum Head : std::size_t { kHeadZ, kHeadE, kHeadA, kHeadN, kHeadY, kNumHeads };

std::string_view head_name(std::size_t head);

struct LossBreakdown {
  double z_loss = 0.0;
  double e_loss = 0.0;
  double a_loss = 0.0;
  double n_loss = 0.0;
  double y_loss = 0.0;
  std::array<std::size_t, kNumHeads> terms{};  // positions contributing

  double total() const { return z_loss + e_loss + a_loss + n_loss + y_loss; }
  LossBreakdown& operator+=(const LossBreakdown& o);
};

// Teacher-forced argmax accuracy per head.
struct HeadAccuracy {
  std::array<std::size_t, kNumHeads> correct{};
  std::array<std::size_t, kNumHeads> total{};

  double accuracy(std::size_t head) const;  // 1.0 for heads with no terms
  double min_accuracy() const;
  HeadAccuracy& operator+=(const HeadAccuracy& o);
};

struct LossOptions {
  // Scores one extra step that must predict Z = 0 and the word <EoD>.
  bool terminal_eod = true;
  std::optional<std::size_t> writer;  // writer vocabulary id
};

struct SequenceLoss {
  ad::Var total;
  LossBreakdown parts;
  HeadAccuracy accuracy;
};

// Throws std::invalid_argument naming the position on label errors.
SequenceLoss sequence_loss(ad::Graph& g, const Model& model, const GameData& game,
                           const LabeledSummary& summary,
                           const LossOptions& options = {});

struct AmsGradConfig {
  double learning_rate = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// AMSGrad without bias correction:
//   m = b1 m + (1 - b1) g;  v = b2 v + (1 - b2) g^2;  vhat = max(vhat, v)
//   theta -= lr m / (sqrt(vhat) + eps)
class AmsGrad {
 public:
  AmsGrad(const ad::ParameterStore& store, AmsGradConfig config);

  void step(ad::ParameterStore& store);
  const AmsGradConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

  const ad::Tensor& m(std::size_t i) const { return m_[i]; }
  const ad::Tensor& v(std::size_t i) const { return v_[i]; }
  const ad::Tensor& v_hat(std::size_t i) const { return v_hat_[i]; }

 private:
  AmsGradConfig config_;
  std::vector<ad::Tensor> m_, v_, v_hat_;
};

// Scales gradients so their global L2 norm is at most max_norm. Returns the
// norm before clipping.
double clip_grad_norm(ad::ParameterStore& store, double max_norm);

struct TrainConfig {
  ModelDims dims;
  AmsGradConfig optimizer;
  std::size_t max_epochs = 30;
  std::uint64_t seed = 1;
  double clip_norm = 5.0;
  std::size_t min_word_freq = 2;
  bool use_writer = false;
  bool shuffle = true;
  bool terminal_eod = true;
  // Stop once teacher-forced accuracy on the training set reaches this value
  // on every head (checked after each epoch).
  std::optional<double> stop_at_accuracy;
  // Keep the parameters of the epoch with the best dev BLEU.
  bool select_by_dev_bleu = true;
  std::size_t dev_max_len = 700;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  LossBreakdown loss;     // summed over the epoch's training documents
  std::optional<HeadAccuracy> train_accuracy;
  std::optional<double> dev_bleu;
  double seconds = 0.0;
};

std::string epoch_log_json(const EpochLog& log);

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::size_t epoch, std::size_t step, const std::string& what);
  std::size_t epoch() const { return epoch_; }
  std::size_t step() const { return step_; }

 private:
  std::size_t epoch_;
  std::size_t step_;
};

struct TrainResult {
  std::unique_ptr<Model> model;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  std::optional<double> best_dev_bleu;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Documents without labels are annotated first.
TrainResult train(const Dataset& data, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Trains an existing model in place. The returned result has no model.
TrainResult train_model(Model& model, const std::vector<Document>& train,
                                  const std::vector<Document>& dev,
                                  const TrainConfig& config,
                                  const EpochCallback& on_epoch = {});

HeadAccuracy teacher_forced_accuracy(const Model& model,
                                     const std::vector<Document>& docs,
                                     bool use_writer, bool terminal_eod = true);

// Greedy-decodes each document and scores against its reference tokens.
double decode_bleu(const Model& model, const std::vector<Document>& docs,
                   bool use_writer, std::size_t max_len = 700);

}  // namespace saltrack
