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

#include <cmath>

#include "fixtures.hpp"
#include "saltrack/trainer.hpp"

namespace saltrack {
namespace {

class ParkerLoss : public ::testing::Test {
 protected:
  ParkerLoss() : docs_{testing::parker_document()}, model_({4, 6, 2}, testing::vocab_for(docs_)) {
    model_.initialize(11);
  }
  std::vector<Document> docs_;
  Model model_;
};

TEST_F(ParkerLoss, HeadCountsWithoutTerminalStep) {
  ad::Graph g;
  LossOptions opt;
  opt.terminal_eod = false;
  const SequenceLoss l = sequence_loss(g, model_, docs_[0].game, docs_[0].summary, opt);
  EXPECT_EQ(l.parts.terms[kHeadZ], 11u);
  EXPECT_EQ(l.parts.terms[kHeadE], 5u);
  EXPECT_EQ(l.parts.terms[kHeadA], 5u);
  EXPECT_EQ(l.parts.terms[kHeadN], 3u);
  EXPECT_EQ(l.parts.terms[kHeadY], 6u);
  EXPECT_NEAR(l.total.scalar(), l.parts.total(), 1e-9);
}

TEST_F(ParkerLoss, TerminalStepAddsZAndY) {
  ad::Graph g;
  const SequenceLoss l = sequence_loss(g, model_, docs_[0].game, docs_[0].summary);
  EXPECT_EQ(l.parts.terms[kHeadZ], 12u);
  EXPECT_EQ(l.parts.terms[kHeadY], 7u);
  EXPECT_EQ(l.parts.terms[kHeadE], 5u);
  for (std::size_t h = 0; h < kNumHeads; ++h) EXPECT_EQ(l.accuracy.total[h], l.parts.terms[h]);
}

TEST_F(ParkerLoss, PartsArePositiveLogLikelihoods) {
  ad::Graph g;
  const SequenceLoss l = sequence_loss(g, model_, docs_[0].game, docs_[0].summary);
  EXPECT_GT(l.parts.z_loss, 0.0);
  EXPECT_GT(l.parts.e_loss, 0.0);
  EXPECT_GT(l.parts.a_loss, 0.0);
  EXPECT_GT(l.parts.n_loss, 0.0);
  EXPECT_GT(l.parts.y_loss, 0.0);
  // Five-way and eleven-way choices cannot be certain at initialization.
  EXPECT_GT(l.parts.e_loss, 5.0 * 0.1);
}

TEST_F(ParkerLoss, LabelErrorsNamePosition) {
  LabeledSummary bad = docs_[0].summary;
  bad.a[3] = "TEAM-PTS";
  ad::Graph g;
  try {
    sequence_loss(g, model_, docs_[0].game, bad);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("position 3"), std::string::npos) << e.what();
  }
  bad = docs_[0].summary;
  bad.n[6].reset();
  ad::Graph g2;
  EXPECT_THROW(sequence_loss(g2, model_, docs_[0].game, bad), std::invalid_argument);
}

TEST_F(ParkerLoss, BackwardTouchesEveryHead) {
  ad::Graph g;
  const SequenceLoss l = sequence_loss(g, model_, docs_[0].game, docs_[0].summary);
  model_.params().zero_grad();
  g.backward(l.total);
  for (const char* name : {"z.W", "old.W", "new.W", "attr.W", "n.W", "y.W", "gru_e.w_ih",
                           "gru_a.w_ih", "lstm.w_ih", "record.W"}) {
    double norm = 0.0;
    for (double v : model_.params().find(name)->grad.data()) norm += v * v;
    EXPECT_GT(norm, 0.0) << name;
  }
}

TEST(AmsGrad, ScalarOracle) {
  ad::ParameterStore s;
  ad::Parameter& p = s.add("w", {1});
  p.value[0] = 0.5;
  AmsGradConfig cfg;
  cfg.learning_rate = 0.01;
  AmsGrad opt(s, cfg);
  const double grads[] = {1.0, -0.5, 0.25, 2.0};
  double theta = 0.5, m = 0.0, v = 0.0, vh = 0.0;
  for (double grad : grads) {
    p.grad[0] = grad;
    opt.step(s);
    m = 0.9 * m + (1.0 - 0.9) * grad;
    v = 0.999 * v + (1.0 - 0.999) * grad * grad;
    vh = std::max(vh, v);
    theta -= 0.01 * m / (std::sqrt(vh) + 1e-8);
    EXPECT_NEAR(p.value[0], theta, 1e-15);
    EXPECT_NEAR(opt.v_hat(0)[0], vh, 1e-18);
  }
}

TEST(AmsGrad, FirstStepMagnitude) {
  ad::ParameterStore s;
  ad::Parameter& p = s.add("w", {1});
  AmsGrad opt(s, {});
  p.grad[0] = 1.0;
  opt.step(s);
  EXPECT_NEAR(p.value[0], -2e-3 * 0.1 / (std::sqrt(0.001) + 1e-8), 1e-15);
}

TEST(AmsGrad, VHatNeverDecreases) {
  ad::ParameterStore s;
  ad::Parameter& p = s.add("w", {1});
  AmsGrad opt(s, {});
  double prev = 0.0;
  for (int i = 0; i < 50; ++i) {
    p.grad[0] = i < 5 ? 3.0 : 0.01;
    opt.step(s);
    EXPECT_GE(opt.v_hat(0)[0], prev);
    prev = opt.v_hat(0)[0];
  }
}

TEST(ClipGradNorm, ScalesToMaximum) {
  ad::ParameterStore s;
  ad::Parameter& a = s.add("a", {2});
  ad::Parameter& b = s.add("b", {1});
  a.grad[0] = 3.0;
  a.grad[1] = 0.0;
  b.grad[0] = 4.0;
  EXPECT_DOUBLE_EQ(clip_grad_norm(s, 1.0), 5.0);
  EXPECT_NEAR(a.grad[0], 0.6, 1e-15);
  EXPECT_NEAR(b.grad[0], 0.8, 1e-15);
  EXPECT_NEAR(clip_grad_norm(s, 10.0), 1.0, 1e-15);
  EXPECT_NEAR(b.grad[0], 0.8, 1e-15);
}

TEST(HeadAccuracy, EmptyHeadCountsAsPerfect) {
  HeadAccuracy a;
  a.total[kHeadZ] = 4;
  a.correct[kHeadZ] = 3;
  EXPECT_DOUBLE_EQ(a.accuracy(kHeadZ), 0.75);
  EXPECT_DOUBLE_EQ(a.accuracy(kHeadN), 1.0);
  EXPECT_DOUBLE_EQ(a.min_accuracy(), 0.75);
  EXPECT_EQ(head_name(kHeadY), "y");
}

TEST(Training, LossDecreasesOverFirstEpochs) {
  SynthOptions so;
  so.seed = 7;
  so.n_games = 10;
  const Dataset ds = synth_corpus(so);
  TrainConfig cfg;
  cfg.dims = {32, 64, 8};
  cfg.max_epochs = 5;
  cfg.seed = 1;
  cfg.min_word_freq = 1;
  cfg.select_by_dev_bleu = false;
  std::vector<double> losses;
  const TrainResult r = train(ds, cfg, [&](const EpochLog& e) { losses.push_back(e.loss.total()); });
  ASSERT_EQ(losses.size(), 5u);
  for (std::size_t i = 1; i < losses.size(); ++i) {
    EXPECT_LT(losses[i], losses[i - 1]) << "epoch " << i + 1;
  }
  ASSERT_TRUE(r.model);
  EXPECT_EQ(r.log.size(), 5u);
}

TEST(Training, DeterministicForFixedSeed) {
  SynthOptions so;
  so.seed = 3;
  so.n_games = 3;
  const Dataset ds = synth_corpus(so);
  TrainConfig cfg;
  cfg.dims = {8, 12, 2};
  cfg.max_epochs = 2;
  cfg.min_word_freq = 1;
  cfg.select_by_dev_bleu = false;
  const TrainResult a = train(ds, cfg);
  const TrainResult b = train(ds, cfg);
  EXPECT_EQ(a.log.back().loss.total(), b.log.back().loss.total());
  const auto wa = a.model->params().find("y.W")->value.data();
  const auto wb = b.model->params().find("y.W")->value.data();
  EXPECT_TRUE(std::equal(wa.begin(), wa.end(), wb.begin()));
}

TEST(Training, EpochLogJson) {
  EpochLog e;
  e.epoch = 2;
  e.loss.z_loss = 1.5;
  e.dev_bleu = 12.0;
  const std::string j = epoch_log_json(e);
  EXPECT_NE(j.find("\"epoch\":2"), std::string::npos) << j;
  EXPECT_NE(j.find("\"dev_bleu\":12"), std::string::npos) << j;
}

}  // namespace
}  // namespace saltrack
