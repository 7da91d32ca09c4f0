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

#ifndef R2C_NEURALNET_HPP
#define R2C_NEURALNET_HPP

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "r2c/covariance.hpp"
#include "r2c/spectrum.hpp"
#include "r2c/types.hpp"

namespace r2c {

// Activations travel through the network as (features x batch) matrices;
// each column holds one sample laid out channel-major.

enum class LayerKind { conv1d, max_pool1d, up_sample1d, fully_connected, leaky_relu, tanh };

struct LayerSpec {
  LayerKind kind = LayerKind::fully_connected;
  int in_channels = 0;
  int out_channels = 0;
  int kernel_size = 0;
  int padding = 0;
  int factor = 0;
  int in_dim = 0;
  int out_dim = 0;
  double negative_slope = 0.0;

  static LayerSpec conv1d(int in_channels, int out_channels, int kernel_size, int padding);
  static LayerSpec max_pool1d(int factor);
  static LayerSpec up_sample1d(int factor);
  static LayerSpec fully_connected(int in_dim, int out_dim);
  static LayerSpec leaky_relu(double negative_slope);
  static LayerSpec tanh();

  bool has_params() const noexcept {
    return kind == LayerKind::conv1d || kind == LayerKind::fully_connected;
  }
  bool operator==(const LayerSpec&) const = default;
};

std::string to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& name);

struct FeatureShape {
  int channels = 1;
  int length = 1;

  int size() const noexcept { return channels * length; }
  bool operator==(const FeatureShape&) const = default;
};

/// Throws DimensionMismatch when `in` does not fit the layer.
FeatureShape output_shape(const LayerSpec& spec, FeatureShape in);

/// conv1d weight is out x (in * kernel), column c * kernel + t;
/// fully_connected weight is out x in.
struct LayerParams {
  Matrix weight;
  Vector bias;
};

struct LayerCache {
  Matrix input;    // fully_connected, leaky_relu
  Matrix output;   // tanh
  Matrix columns;  // conv1d im2col buffer
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> argmax;  // max_pool1d
};

Matrix layer_forward(const LayerSpec& spec, FeatureShape in, const LayerParams& params, const Matrix& x,
                     LayerCache* cache = nullptr);

/// Returns the gradient with respect to the layer input. Parameter
/// gradients are written to `grad_params` for layers that have them.
Matrix layer_backward(const LayerSpec& spec, FeatureShape in, const LayerParams& params,
                      const LayerCache& cache, const Matrix& grad_out, LayerParams* grad_params);

/// Row-major tensor used for serialization.
struct Tensor {
  std::vector<Index> shape;
  Vector data;

  Index count() const;
  bool operator==(const Tensor&) const = default;
};

enum class ModelKind { aps, col };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct NetworkParams {
  std::vector<LayerParams> layers;
  /// Input scale: inputs are divided by it, outputs multiplied by it.
  double normalizer = 1.0;
};

class Network {
 public:
  Network() = default;
  Network(ModelKind model, std::vector<LayerSpec> specs, FeatureShape input);

  ModelKind model() const noexcept { return model_; }
  const std::vector<LayerSpec>& specs() const noexcept { return specs_; }
  FeatureShape input_shape() const noexcept { return shapes_.front(); }
  FeatureShape output_shape() const noexcept { return shapes_.back(); }
  /// shapes()[i] is the input shape of layer i; the last entry is the output.
  const std::vector<FeatureShape>& shapes() const noexcept { return shapes_; }

  NetworkParams& params() noexcept { return params_; }
  const NetworkParams& params() const noexcept { return params_; }

  Matrix forward(const Matrix& x) const;
  Matrix forward(const Matrix& x, std::vector<LayerCache>& caches) const;
  std::vector<LayerParams> backward(const std::vector<LayerCache>& caches, const Matrix& grad_out,
                                    Matrix* grad_input = nullptr) const;

  std::vector<LayerParams> zeros_like() const;
  std::size_t parameter_count() const;
  /// Flat view over every weight and bias, layer by layer.
  double& parameter(std::size_t index);

  /// Glorot-uniform weights, zero biases.
  void initialize(std::mt19937_64& rng);

  Tensor weight_tensor(std::size_t layer) const;
  Tensor bias_tensor(std::size_t layer) const;

 private:
  ModelKind model_ = ModelKind::aps;
  std::vector<LayerSpec> specs_;
  std::vector<FeatureShape> shapes_;
  NetworkParams params_;
};

/// Fully convolutional encoder-decoder for log-scale APS translation.
std::vector<LayerSpec> aps_net_layers();
Network make_aps_net(int n);

/// Three hidden tanh layers of width 4N over the 2-channel column.
std::vector<LayerSpec> col_net_layers(int n);
Network make_col_net(int n);

Aps aps_net_apply(const Network& net, const Aps& radar_log);
ToeplitzColumn col_net_apply(const Network& net, const ToeplitzColumn& radar_column);

/// [Re col / s; Im col / s] with s the normalizer.
Vector encode_column(const ToeplitzColumn& r, double normalizer);
/// Inverse of encode_column; the imaginary part of entry 0 is discarded.
ToeplitzColumn decode_column(const Eigen::Ref<const Vector>& x, double normalizer);

struct LossValue {
  double loss = 0.0;
  Matrix grad;
};

LossValue mse_loss(const Matrix& pred, const Matrix& target);

/// Real linear map from the 2-channel column to the APS of T(r).
Matrix column_aps_operator(const DftGrid& grid);

/// ||aps(T(r_hat)) - d_c||^2 / N, unclamped, with its gradient with respect to
/// the 2-channel column representation [Re r_hat; Im r_hat].
LossValue col_aps_loss(const ToeplitzColumn& r_hat, const Aps& target, const DftGrid& grid);

/// Loss on raw network outputs for a batch of targets (columns).
class Objective {
 public:
  virtual ~Objective() = default;
  virtual LossValue evaluate(const Matrix& output, const Matrix& target) const = 0;
};

class MseObjective final : public Objective {
 public:
  LossValue evaluate(const Matrix& output, const Matrix& target) const override;
};

/// Column network loss; targets are linear APS columns.
class ColApsObjective final : public Objective {
 public:
  ColApsObjective(const DftGrid& grid, double normalizer);
  LossValue evaluate(const Matrix& output, const Matrix& target) const override;

 private:
  Matrix op_;
  double normalizer_;
};

struct TrainConfig {
  int batch_size = 64;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_epochs = 1000;
  int patience = 20;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct AdamState {
  std::vector<LayerParams> m;
  std::vector<LayerParams> v;
  long step = 0;

  static AdamState for_network(const Network& net);
};

void adam_step(NetworkParams& params, const std::vector<LayerParams>& grads, AdamState& state,
               const TrainConfig& cfg);

struct TrainingSet {
  Matrix inputs;   // one sample per column, already normalized
  Matrix targets;  // one sample per column

  Index count() const noexcept { return inputs.cols(); }
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  Network best;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

/// Loss of `net` over a whole set, accumulated batch by batch in sample order.
double evaluate_loss(const Network& net, const Objective& objective, const TrainingSet& set,
                     int batch_size = 256);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam with per-epoch shuffling and early stopping on the
/// validation loss. Returns the best-validation parameters.
TrainResult train(Network net, const Objective& objective, const TrainingSet& train_set,
                  const TrainingSet& val_set, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
};

/// Central-difference check of the end-to-end gradient over `count`
/// randomly chosen parameters (all of them when fewer exist).
GradCheckReport grad_check(Network net, const Objective& objective, const Matrix& input,
                           const Matrix& target, double eps, std::size_t count, std::mt19937_64& rng);

}  // namespace r2c

#endif  // R2C_NEURALNET_HPP
