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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "r2c/neuralnet.hpp"

namespace r2c {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
  if (adam_beta1 < 0.0 || adam_beta1 >= 1.0) throw ConfigError("train.adam_beta1 must lie in [0, 1)");
  if (adam_beta2 < 0.0 || adam_beta2 >= 1.0) throw ConfigError("train.adam_beta2 must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("train.adam_eps must be > 0");
  if (max_epochs < 1) throw ConfigError("train.max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("train.patience must be >= 1");
}

AdamState AdamState::for_network(const Network& net) {
  AdamState s;
  s.m = net.zeros_like();
  s.v = net.zeros_like();
  return s;
}

void adam_step(NetworkParams& params, const std::vector<LayerParams>& grads, AdamState& state,
               const TrainConfig& cfg) {
  if (grads.size() != params.layers.size() || state.m.size() != params.layers.size()) {
    throw DimensionMismatch("adam_step: layer count mismatch");
  }
  ++state.step;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    if (p.size() != g.size()) throw DimensionMismatch("adam_step: parameter shape mismatch");
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseAbs2();
    p.array() -= cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.adam_eps);
  };
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    if (params.layers[i].weight.size() == 0) continue;
    update(params.layers[i].weight, grads[i].weight, state.m[i].weight, state.v[i].weight);
    update(params.layers[i].bias, grads[i].bias, state.m[i].bias, state.v[i].bias);
  }
}

double evaluate_loss(const Network& net, const Objective& objective, const TrainingSet& set, int batch_size) {
  const Index n = set.count();
  if (n == 0) throw ConfigError("evaluate_loss: empty set");
  double total = 0.0;
  for (Index start = 0; start < n; start += batch_size) {
    const Index len = std::min<Index>(batch_size, n - start);
    const Matrix out = net.forward(set.inputs.middleCols(start, len));
    total += objective.evaluate(out, set.targets.middleCols(start, len)).loss * static_cast<double>(len);
  }
  return total / static_cast<double>(n);
}

TrainResult train(Network net, const Objective& objective, const TrainingSet& train_set,
                  const TrainingSet& val_set, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.count() == 0 || val_set.count() == 0) throw ConfigError("train: datasets must be nonempty");
  if (train_set.inputs.rows() != net.input_shape().size() || val_set.inputs.rows() != net.input_shape().size()) {
    throw DimensionMismatch("train: input size does not match the network");
  }

  std::mt19937_64 rng(cfg.seed);
  AdamState adam = AdamState::for_network(net);
  std::vector<Index> order(static_cast<std::size_t>(train_set.count()));
  std::iota(order.begin(), order.end(), Index{0});

  TrainResult result;
  result.best = net;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;
  std::vector<LayerCache> caches;
  Matrix xb;
  Matrix tb;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double train_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t len = std::min<std::size_t>(cfg.batch_size, order.size() - start);
      xb.resize(train_set.inputs.rows(), static_cast<Index>(len));
      tb.resize(train_set.targets.rows(), static_cast<Index>(len));
      for (std::size_t j = 0; j < len; ++j) {
        xb.col(static_cast<Index>(j)) = train_set.inputs.col(order[start + j]);
        tb.col(static_cast<Index>(j)) = train_set.targets.col(order[start + j]);
      }
      const Matrix out = net.forward(xb, caches);
      const LossValue lv = objective.evaluate(out, tb);
      if (!std::isfinite(lv.loss)) {
        throw DivergedLoss("training loss became non-finite at epoch " + std::to_string(epoch));
      }
      adam_step(net.params(), net.backward(caches, lv.grad), adam, cfg);
      train_sum += lv.loss * static_cast<double>(len);
    }

    EpochRecord rec{epoch, train_sum / static_cast<double>(order.size()), evaluate_loss(net, objective, val_set)};
    if (!std::isfinite(rec.val_loss)) {
      throw DivergedLoss("validation loss became non-finite at epoch " + std::to_string(epoch));
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (rec.val_loss < result.best_val_loss) {
      result.best_val_loss = rec.val_loss;
      result.best_epoch = epoch;
      result.best = net;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

GradCheckReport grad_check(Network net, const Objective& objective, const Matrix& input, const Matrix& target,
                           double eps, std::size_t count, std::mt19937_64& rng) {
  if (eps < 1e-7 || eps > 1e-3) throw ConfigError("grad_check: eps must lie in [1e-7, 1e-3]");
  std::vector<LayerCache> caches;
  const Matrix out = net.forward(input, caches);
  const std::vector<LayerParams> grads = net.backward(caches, objective.evaluate(out, target).grad);

  std::vector<double> analytic;
  analytic.reserve(net.parameter_count());
  for (const LayerParams& g : grads) {
    analytic.insert(analytic.end(), g.weight.data(), g.weight.data() + g.weight.size());
    analytic.insert(analytic.end(), g.bias.data(), g.bias.data() + g.bias.size());
  }

  std::vector<std::size_t> picks(analytic.size());
  std::iota(picks.begin(), picks.end(), std::size_t{0});
  std::shuffle(picks.begin(), picks.end(), rng);
  picks.resize(std::min(count, picks.size()));

  // Structurally zero components (e.g. Im r_0 of the column output) only
  // see rounding noise, so tiny magnitudes are measured against a floor.
  double largest = 0.0;
  for (double g : analytic) largest = std::max(largest, std::abs(g));
  const double floor = std::max(1e-8 * largest, std::numeric_limits<double>::min());

  auto loss_at = [&]() { return objective.evaluate(net.forward(input), target).loss; };
  GradCheckReport report;
  for (std::size_t idx : picks) {
    double& p = net.parameter(idx);
    const double saved = p;
    p = saved + eps;
    const double up = loss_at();
    p = saved - eps;
    const double down = loss_at();
    p = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double denom = std::max({std::abs(analytic[idx]), std::abs(numeric), floor});
    report.max_relative_error = std::max(report.max_relative_error, std::abs(analytic[idx] - numeric) / denom);
    ++report.checked;
  }
  return report;
}

}  // namespace r2c
