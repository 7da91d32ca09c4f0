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

#include <cmath>
#include <string>

#include "r2c/neuralnet.hpp"

namespace r2c {

Index Tensor::count() const {
  Index n = 1;
  for (Index d : shape) n *= d;
  return n;
}

std::string to_string(ModelKind kind) { return kind == ModelKind::aps ? "aps" : "col"; }

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "aps") return ModelKind::aps;
  if (name == "col") return ModelKind::col;
  throw ConfigError("unknown model '" + name + "' (expected aps or col)");
}

Network::Network(ModelKind model, std::vector<LayerSpec> specs, FeatureShape input)
    : model_(model), specs_(std::move(specs)) {
  shapes_.push_back(input);
  for (const LayerSpec& spec : specs_) shapes_.push_back(r2c::output_shape(spec, shapes_.back()));
  params_.layers = zeros_like();
}

std::vector<LayerParams> Network::zeros_like() const {
  std::vector<LayerParams> out(specs_.size());
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSpec& s = specs_[i];
    if (s.kind == LayerKind::conv1d) {
      out[i].weight = Matrix::Zero(s.out_channels, static_cast<Index>(s.in_channels) * s.kernel_size);
      out[i].bias = Vector::Zero(s.out_channels);
    } else if (s.kind == LayerKind::fully_connected) {
      out[i].weight = Matrix::Zero(s.out_dim, s.in_dim);
      out[i].bias = Vector::Zero(s.out_dim);
    }
  }
  return out;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const LayerParams& p : params_.layers) n += static_cast<std::size_t>(p.weight.size() + p.bias.size());
  return n;
}

double& Network::parameter(std::size_t index) {
  for (LayerParams& p : params_.layers) {
    const auto w = static_cast<std::size_t>(p.weight.size());
    if (index < w) return p.weight.data()[index];
    index -= w;
    const auto b = static_cast<std::size_t>(p.bias.size());
    if (index < b) return p.bias[static_cast<Index>(index)];
    index -= b;
  }
  throw DimensionMismatch("Network::parameter: index out of range");
}

void Network::initialize(std::mt19937_64& rng) {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSpec& s = specs_[i];
    if (!s.has_params()) continue;
    double fan_in = 0.0;
    double fan_out = 0.0;
    if (s.kind == LayerKind::conv1d) {
      fan_in = static_cast<double>(s.in_channels) * s.kernel_size;
      fan_out = static_cast<double>(s.out_channels) * s.kernel_size;
    } else {
      fan_in = s.in_dim;
      fan_out = s.out_dim;
    }
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    LayerParams& p = params_.layers[i];
    // Row-major fill order so the draw sequence matches the serialized layout.
    for (Index r = 0; r < p.weight.rows(); ++r) {
      for (Index c = 0; c < p.weight.cols(); ++c) p.weight(r, c) = dist(rng);
    }
    p.bias.setZero();
  }
}

Matrix Network::forward(const Matrix& x) const {
  Matrix a = x;
  for (std::size_t i = 0; i < specs_.size(); ++i) a = layer_forward(specs_[i], shapes_[i], params_.layers[i], a);
  return a;
}

Matrix Network::forward(const Matrix& x, std::vector<LayerCache>& caches) const {
  caches.assign(specs_.size(), LayerCache{});
  Matrix a = x;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    a = layer_forward(specs_[i], shapes_[i], params_.layers[i], a, &caches[i]);
  }
  return a;
}

std::vector<LayerParams> Network::backward(const std::vector<LayerCache>& caches, const Matrix& grad_out,
                                           Matrix* grad_input) const {
  if (caches.size() != specs_.size()) throw DimensionMismatch("Network::backward: cache size mismatch");
  std::vector<LayerParams> grads(specs_.size());
  Matrix g = grad_out;
  for (std::size_t i = specs_.size(); i-- > 0;) {
    g = layer_backward(specs_[i], shapes_[i], params_.layers[i], caches[i], g,
                       specs_[i].has_params() ? &grads[i] : nullptr);
  }
  if (grad_input) *grad_input = std::move(g);
  return grads;
}

Tensor Network::weight_tensor(std::size_t layer) const {
  const LayerSpec& s = specs_.at(layer);
  const Matrix& w = params_.layers.at(layer).weight;
  Tensor t;
  if (s.kind == LayerKind::conv1d) {
    t.shape = {s.out_channels, s.in_channels, s.kernel_size};
  } else {
    t.shape = {w.rows(), w.cols()};
  }
  t.data.resize(w.size());
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(t.data.data(), w.rows(),
                                                                                      w.cols()) = w;
  return t;
}

Tensor Network::bias_tensor(std::size_t layer) const {
  const Vector& b = params_.layers.at(layer).bias;
  return Tensor{{b.size()}, b};
}

std::vector<LayerSpec> aps_net_layers() {
  constexpr double kSlope = 0.1;
  return {
      LayerSpec::conv1d(1, 16, 5, 2),  LayerSpec::leaky_relu(kSlope), LayerSpec::max_pool1d(2),
      LayerSpec::conv1d(16, 32, 5, 2), LayerSpec::leaky_relu(kSlope), LayerSpec::max_pool1d(2),
      LayerSpec::conv1d(32, 32, 3, 1), LayerSpec::leaky_relu(kSlope), LayerSpec::up_sample1d(2),
      LayerSpec::conv1d(32, 16, 3, 1), LayerSpec::leaky_relu(kSlope), LayerSpec::up_sample1d(2),
      LayerSpec::conv1d(16, 1, 3, 1),
  };
}

Network make_aps_net(int n) { return Network(ModelKind::aps, aps_net_layers(), FeatureShape{1, n}); }

std::vector<LayerSpec> col_net_layers(int n) {
  return {
      LayerSpec::fully_connected(2 * n, 4 * n), LayerSpec::tanh(),
      LayerSpec::fully_connected(4 * n, 4 * n), LayerSpec::tanh(),
      LayerSpec::fully_connected(4 * n, 4 * n), LayerSpec::tanh(),
      LayerSpec::fully_connected(4 * n, 2 * n),
  };
}

Network make_col_net(int n) { return Network(ModelKind::col, col_net_layers(n), FeatureShape{2, n}); }

Aps aps_net_apply(const Network& net, const Aps& radar_log) {
  if (net.model() != ModelKind::aps) throw DimensionMismatch("aps_net_apply: network is not an APS network");
  if (radar_log.scale != ApsScale::log_db) throw ConfigError("aps_net_apply: input must be log-scale");
  if (radar_log.size() != net.input_shape().size()) throw DimensionMismatch("aps_net_apply: input length mismatch");
  const double s = net.params().normalizer;
  const Matrix y = net.forward(radar_log.values / s);
  return Aps(Vector(y.col(0) * s), ApsScale::log_db);
}

Vector encode_column(const ToeplitzColumn& r, double normalizer) {
  const Index n = r.size();
  Vector x(2 * n);
  x.head(n) = r.col.real() / normalizer;
  x.tail(n) = r.col.imag() / normalizer;
  return x;
}

ToeplitzColumn decode_column(const Eigen::Ref<const Vector>& x, double normalizer) {
  if (x.size() % 2 != 0) throw DimensionMismatch("decode_column: odd length");
  const Index n = x.size() / 2;
  ToeplitzColumn r{CVector(n)};
  for (Index i = 0; i < n; ++i) r.col[i] = Complex(x[i], x[n + i]) * normalizer;
  r.col[0] = Complex(r.col[0].real(), 0.0);
  return r;
}

ToeplitzColumn col_net_apply(const Network& net, const ToeplitzColumn& radar_column) {
  if (net.model() != ModelKind::col) throw DimensionMismatch("col_net_apply: network is not a column network");
  if (2 * radar_column.size() != net.input_shape().size()) {
    throw DimensionMismatch("col_net_apply: column length mismatch");
  }
  const double s = net.params().normalizer;
  const Matrix y = net.forward(encode_column(radar_column, s));
  return decode_column(y.col(0), s);
}

LossValue mse_loss(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw DimensionMismatch("mse_loss: shape mismatch");
  }
  const double count = static_cast<double>(pred.size());
  const Matrix diff = pred - target;
  return {diff.squaredNorm() / count, (2.0 / count) * diff};
}

Matrix column_aps_operator(const DftGrid& grid) {
  // d_i = N r_0 + 2 sum_{l>=1} (N - l) Re(r_l F(l, i)), F(l, i) = exp(-j l w_i).
  const Index n = grid.matrix.rows();
  Matrix op = Matrix::Zero(grid.size(), 2 * n);
  for (Index i = 0; i < grid.size(); ++i) {
    op(i, 0) = static_cast<double>(n);
    for (Index l = 1; l < n; ++l) {
      const double weight = 2.0 * static_cast<double>(n - l);
      op(i, l) = weight * grid.matrix(l, i).real();
      op(i, n + l) = -weight * grid.matrix(l, i).imag();
    }
  }
  return op;
}

LossValue col_aps_loss(const ToeplitzColumn& r_hat, const Aps& target, const DftGrid& grid) {
  if (target.scale != ApsScale::linear) throw ConfigError("col_aps_loss: target must be linear");
  if (r_hat.size() != grid.matrix.rows() || target.size() != grid.size()) {
    throw DimensionMismatch("col_aps_loss: length mismatch");
  }
  const Matrix op = column_aps_operator(grid);
  const Vector residual = op * encode_column(r_hat, 1.0) - target.values;
  const double n = static_cast<double>(target.size());
  return {residual.squaredNorm() / n, (2.0 / n) * (op.transpose() * residual)};
}

LossValue MseObjective::evaluate(const Matrix& output, const Matrix& target) const {
  return mse_loss(output, target);
}

ColApsObjective::ColApsObjective(const DftGrid& grid, double normalizer)
    : op_(column_aps_operator(grid)), normalizer_(normalizer) {}

LossValue ColApsObjective::evaluate(const Matrix& output, const Matrix& target) const {
  if (output.rows() != op_.cols() || target.rows() != op_.rows() || output.cols() != target.cols()) {
    throw DimensionMismatch("ColApsObjective: shape mismatch");
  }
  const Matrix residual = normalizer_ * (op_ * output) - target;
  const double count = static_cast<double>(residual.size());
  return {residual.squaredNorm() / count, (2.0 * normalizer_ / count) * (op_.transpose() * residual)};
}

}  // namespace r2c
