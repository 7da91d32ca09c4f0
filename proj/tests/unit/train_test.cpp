// Copyright 2026 The r2c Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "r2c/neuralnet.hpp"

namespace r2c {
namespace {

// y = A x for a fixed random A: learnable by the column network.
TrainingSet linear_task(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.3);
  Matrix a(2 * n, 2 * n);
  std::mt19937_64 arng(99);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = normal(arng);
  TrainingSet set{Matrix(2 * n, count), Matrix()};
  for (Index i = 0; i < set.inputs.size(); ++i) set.inputs.data()[i] = normal(rng);
  set.targets = 0.5 * (a * set.inputs).array().tanh().matrix();
  return set;
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.max_epochs = 30;
  cfg.patience = 5;
  cfg.seed = 7;
  return cfg;
}

Network init_net(int n, std::uint64_t seed) {
  Network net = make_col_net(n);
  std::mt19937_64 rng(seed);
  net.initialize(rng);
  return net;
}

TEST(Train, ReducesLoss) {
  const TrainingSet tr = linear_task(4, 128, 1), va = linear_task(4, 32, 2);
  const TrainResult res = train(init_net(4, 3), MseObjective{}, tr, va, small_config());
  ASSERT_FALSE(res.history.empty());
  EXPECT_LT(res.best_val_loss, 0.5 * res.history.front().val_loss);
}

TEST(Train, IsDeterministicForSeed) {
  const TrainingSet tr = linear_task(4, 100, 1), va = linear_task(4, 20, 2);
  const TrainResult a = train(init_net(4, 3), MseObjective{}, tr, va, small_config());
  const TrainResult b = train(init_net(4, 3), MseObjective{}, tr, va, small_config());
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
    EXPECT_EQ(a.history[i].val_loss, b.history[i].val_loss);
  }
  for (std::size_t l = 0; l < a.best.params().layers.size(); ++l) {
    EXPECT_EQ(a.best.params().layers[l].weight, b.best.params().layers[l].weight);
  }
}

TEST(Train, ReturnsBestValidationEpoch) {
  const TrainingSet tr = linear_task(4, 64, 1), va = linear_task(4, 16, 2);
  TrainConfig cfg = small_config();
  cfg.learning_rate = 0.05;  // noisy enough to regress
  cfg.max_epochs = 40;
  const TrainResult res = train(init_net(4, 3), MseObjective{}, tr, va, cfg);
  ASSERT_LE(res.history.size(), 40u);
  const auto best = std::min_element(res.history.begin(), res.history.end(),
                                     [](const EpochRecord& x, const EpochRecord& y) { return x.val_loss < y.val_loss; });
  EXPECT_EQ(best->epoch, res.best_epoch);
  EXPECT_EQ(best->val_loss, res.best_val_loss);
  EXPECT_EQ(evaluate_loss(res.best, MseObjective{}, va), res.best_val_loss);
  // Early stopping: at most `patience` epochs after the best one.
  EXPECT_LE(static_cast<int>(res.history.size()), res.best_epoch + cfg.patience);
}

TEST(Train, StopsAtMaxEpochs) {
  const TrainingSet tr = linear_task(2, 32, 1), va = linear_task(2, 8, 2);
  TrainConfig cfg = small_config();
  cfg.max_epochs = 3;
  cfg.patience = 100;
  const TrainResult res = train(init_net(2, 1), MseObjective{}, tr, va, cfg);
  EXPECT_EQ(res.history.size(), 3u);
}

TEST(Train, ReportsEveryEpoch) {
  const TrainingSet tr = linear_task(2, 32, 1), va = linear_task(2, 8, 2);
  TrainConfig cfg = small_config();
  cfg.max_epochs = 4;
  int calls = 0;
  train(init_net(2, 1), MseObjective{}, tr, va, cfg, [&](const EpochRecord& r) { EXPECT_EQ(r.epoch, ++calls); });
  EXPECT_EQ(calls, 4);
}

TEST(Train, DetectsDivergence) {
  TrainingSet tr = linear_task(2, 32, 1), va = linear_task(2, 8, 2);
  tr.targets(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(train(init_net(2, 1), MseObjective{}, tr, va, small_config()), DivergedLoss);
}

TEST(Train, ValidatesInputs) {
  const TrainingSet tr = linear_task(2, 32, 1), va = linear_task(2, 8, 2);
  TrainConfig cfg = small_config();
  cfg.batch_size = 0;
  EXPECT_THROW(train(init_net(2, 1), MseObjective{}, tr, va, cfg), ConfigError);
  EXPECT_THROW(train(init_net(3, 1), MseObjective{}, tr, va, small_config()), DimensionMismatch);
  EXPECT_THROW(train(init_net(2, 1), MseObjective{}, TrainingSet{}, va, small_config()), ConfigError);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Network net = make_col_net(1);
  std::mt19937_64 rng(1);
  net.initialize(rng);
  const NetworkParams before = net.params();
  std::vector<LayerParams> grads = net.zeros_like();
  grads[0].weight.setConstant(3.0);
  grads[0].bias.setConstant(-0.01);
  AdamState state = AdamState::for_network(net);
  TrainConfig cfg;
  adam_step(net.params(), grads, state, cfg);
  // Bias-corrected first step is lr * sign(g) up to eps.
  EXPECT_NEAR(net.params().layers[0].weight(0, 0) - before.layers[0].weight(0, 0), -cfg.learning_rate, 1e-9);
  EXPECT_NEAR(net.params().layers[0].bias(0) - before.layers[0].bias(0), cfg.learning_rate, 1e-6);
  EXPECT_EQ(net.params().layers[1].weight, before.layers[1].weight);
  EXPECT_EQ(state.step, 1);
}

TEST(EvaluateLoss, IndependentOfBatchSize) {
  const TrainingSet va = linear_task(3, 50, 2);
  const Network net = init_net(3, 4);
  EXPECT_NEAR(evaluate_loss(net, MseObjective{}, va, 7), evaluate_loss(net, MseObjective{}, va, 256), 1e-14);
}

}  // namespace
}  // namespace r2c
