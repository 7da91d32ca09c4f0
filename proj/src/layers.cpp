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

LayerSpec LayerSpec::conv1d(int in_channels, int out_channels, int kernel_size, int padding) {
  LayerSpec s;
  s.kind = LayerKind::conv1d;
  s.in_channels = in_channels;
  s.out_channels = out_channels;
  s.kernel_size = kernel_size;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::max_pool1d(int factor) {
  LayerSpec s;
  s.kind = LayerKind::max_pool1d;
  s.factor = factor;
  return s;
}

LayerSpec LayerSpec::up_sample1d(int factor) {
  LayerSpec s;
  s.kind = LayerKind::up_sample1d;
  s.factor = factor;
  return s;
}

LayerSpec LayerSpec::fully_connected(int in_dim, int out_dim) {
  LayerSpec s;
  s.kind = LayerKind::fully_connected;
  s.in_dim = in_dim;
  s.out_dim = out_dim;
  return s;
}

LayerSpec LayerSpec::leaky_relu(double negative_slope) {
  LayerSpec s;
  s.kind = LayerKind::leaky_relu;
  s.negative_slope = negative_slope;
  return s;
}

LayerSpec LayerSpec::tanh() {
  LayerSpec s;
  s.kind = LayerKind::tanh;
  return s;
}

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::max_pool1d: return "max_pool1d";
    case LayerKind::up_sample1d: return "up_sample1d";
    case LayerKind::fully_connected: return "fully_connected";
    case LayerKind::leaky_relu: return "leaky_relu";
    case LayerKind::tanh: return "tanh";
  }
  return "unknown";
}

LayerKind layer_kind_from_string(const std::string& name) {
  for (LayerKind k : {LayerKind::conv1d, LayerKind::max_pool1d, LayerKind::up_sample1d, LayerKind::fully_connected,
                      LayerKind::leaky_relu, LayerKind::tanh}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown layer kind '" + name + "'");
}

FeatureShape output_shape(const LayerSpec& spec, FeatureShape in) {
  auto fail = [&](const std::string& why) {
    throw DimensionMismatch(to_string(spec.kind) + ": " + why + " (input " + std::to_string(in.channels) + "x" +
                            std::to_string(in.length) + ")");
  };
  switch (spec.kind) {
    case LayerKind::conv1d: {
      if (spec.in_channels != in.channels) fail("channel count mismatch");
      if (spec.kernel_size < 1 || spec.out_channels < 1 || spec.padding < 0) fail("invalid geometry");
      const int len = in.length + 2 * spec.padding - spec.kernel_size + 1;
      if (len < 1) fail("kernel longer than padded input");
      return {spec.out_channels, len};
    }
    case LayerKind::max_pool1d:
      if (spec.factor < 1 || in.length % spec.factor != 0) fail("length not divisible by pool factor");
      return {in.channels, in.length / spec.factor};
    case LayerKind::up_sample1d:
      if (spec.factor < 1) fail("invalid factor");
      return {in.channels, in.length * spec.factor};
    case LayerKind::fully_connected:
      if (spec.in_dim != in.size() || spec.out_dim < 1) fail("input size mismatch");
      return {1, spec.out_dim};
    case LayerKind::leaky_relu:
    case LayerKind::tanh:
      return in;
  }
  fail("unknown layer");
  return in;
}

namespace {

using IndexMatrix = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>;

void check_rows(const Matrix& x, int expected, const char* what) {
  if (x.rows() != expected) {
    throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(expected) + " rows, got " +
                            std::to_string(x.rows()));
  }
}

// im2col for a batch: rows c * k + t, columns b * L_out + o.
Matrix im2col(const LayerSpec& spec, FeatureShape in, int out_len, const Matrix& x) {
  const Index batch = x.cols();
  const int k = spec.kernel_size;
  Matrix cols = Matrix::Zero(static_cast<Index>(in.channels) * k, batch * out_len);
  for (Index b = 0; b < batch; ++b) {
    for (int c = 0; c < in.channels; ++c) {
      const double* src = x.col(b).data() + static_cast<Index>(c) * in.length;
      for (int t = 0; t < k; ++t) {
        const Index row = static_cast<Index>(c) * k + t;
        for (int o = 0; o < out_len; ++o) {
          const int pos = o + t - spec.padding;
          if (pos >= 0 && pos < in.length) cols(row, b * out_len + o) = src[pos];
        }
      }
    }
  }
  return cols;
}

}  // namespace

Matrix layer_forward(const LayerSpec& spec, FeatureShape in, const LayerParams& params, const Matrix& x,
                     LayerCache* cache) {
  check_rows(x, in.size(), "layer_forward");
  const FeatureShape out = output_shape(spec, in);
  const Index batch = x.cols();
  switch (spec.kind) {
    case LayerKind::conv1d: {
      Matrix cols = im2col(spec, in, out.length, x);
      const Matrix y = (params.weight * cols).colwise() + params.bias;  // C_out x (B L_out)
      Matrix result(out.size(), batch);
      for (Index b = 0; b < batch; ++b) {
        Eigen::Map<Matrix>(result.col(b).data(), out.length, out.channels) =
            y.middleCols(b * out.length, out.length).transpose();
      }
      if (cache) cache->columns = std::move(cols);
      return result;
    }
    case LayerKind::max_pool1d: {
      Matrix result(out.size(), batch);
      IndexMatrix arg(out.size(), batch);
      for (Index b = 0; b < batch; ++b) {
        for (int c = 0; c < in.channels; ++c) {
          for (int o = 0; o < out.length; ++o) {
            Index best = static_cast<Index>(c) * in.length + static_cast<Index>(o) * spec.factor;
            for (int t = 1; t < spec.factor; ++t) {
              const Index idx = static_cast<Index>(c) * in.length + static_cast<Index>(o) * spec.factor + t;
              if (x(idx, b) > x(best, b)) best = idx;
            }
            const Index dst = static_cast<Index>(c) * out.length + o;
            result(dst, b) = x(best, b);
            arg(dst, b) = best;
          }
        }
      }
      if (cache) cache->argmax = std::move(arg);
      return result;
    }
    case LayerKind::up_sample1d: {
      Matrix result(out.size(), batch);
      for (Index b = 0; b < batch; ++b) {
        for (int c = 0; c < in.channels; ++c) {
          for (int o = 0; o < out.length; ++o) {
            result(static_cast<Index>(c) * out.length + o, b) = x(static_cast<Index>(c) * in.length + o / spec.factor, b);
          }
        }
      }
      return result;
    }
    case LayerKind::fully_connected: {
      if (cache) cache->input = x;
      return (params.weight * x).colwise() + params.bias;
    }
    case LayerKind::leaky_relu: {
      if (cache) cache->input = x;
      const double slope = spec.negative_slope;
      return x.unaryExpr([slope](double v) { return v >= 0.0 ? v : slope * v; });
    }
    case LayerKind::tanh: {
      Matrix y = x.array().tanh().matrix();
      if (cache) cache->output = y;
      return y;
    }
  }
  throw DimensionMismatch("layer_forward: unknown layer");
}

Matrix layer_backward(const LayerSpec& spec, FeatureShape in, const LayerParams& params, const LayerCache& cache,
                      const Matrix& grad_out, LayerParams* grad_params) {
  const FeatureShape out = output_shape(spec, in);
  check_rows(grad_out, out.size(), "layer_backward");
  const Index batch = grad_out.cols();
  switch (spec.kind) {
    case LayerKind::conv1d: {
      if (cache.columns.cols() != batch * out.length) throw DimensionMismatch("conv1d backward: stale cache");
      Matrix g(out.channels, batch * out.length);
      for (Index b = 0; b < batch; ++b) {
        g.middleCols(b * out.length, out.length) =
            Eigen::Map<const Matrix>(grad_out.col(b).data(), out.length, out.channels).transpose();
      }
      if (grad_params) {
        grad_params->weight.noalias() = g * cache.columns.transpose();
        grad_params->bias = g.rowwise().sum();
      }
      const Matrix dcols = params.weight.transpose() * g;
      Matrix dx = Matrix::Zero(in.size(), batch);
      const int k = spec.kernel_size;
      for (Index b = 0; b < batch; ++b) {
        for (int c = 0; c < in.channels; ++c) {
          double* dst = dx.col(b).data() + static_cast<Index>(c) * in.length;
          for (int t = 0; t < k; ++t) {
            const Index row = static_cast<Index>(c) * k + t;
            for (int o = 0; o < out.length; ++o) {
              const int pos = o + t - spec.padding;
              if (pos >= 0 && pos < in.length) dst[pos] += dcols(row, b * out.length + o);
            }
          }
        }
      }
      return dx;
    }
    case LayerKind::max_pool1d: {
      if (cache.argmax.cols() != batch) throw DimensionMismatch("max_pool1d backward: stale cache");
      Matrix dx = Matrix::Zero(in.size(), batch);
      for (Index b = 0; b < batch; ++b) {
        for (Index o = 0; o < out.size(); ++o) dx(cache.argmax(o, b), b) += grad_out(o, b);
      }
      return dx;
    }
    case LayerKind::up_sample1d: {
      Matrix dx = Matrix::Zero(in.size(), batch);
      for (Index b = 0; b < batch; ++b) {
        for (int c = 0; c < in.channels; ++c) {
          for (int o = 0; o < out.length; ++o) {
            dx(static_cast<Index>(c) * in.length + o / spec.factor, b) +=
                grad_out(static_cast<Index>(c) * out.length + o, b);
          }
        }
      }
      return dx;
    }
    case LayerKind::fully_connected: {
      if (grad_params) {
        grad_params->weight.noalias() = grad_out * cache.input.transpose();
        grad_params->bias = grad_out.rowwise().sum();
      }
      return params.weight.transpose() * grad_out;
    }
    case LayerKind::leaky_relu: {
      const double slope = spec.negative_slope;
      return grad_out.cwiseProduct(cache.input.unaryExpr([slope](double v) { return v >= 0.0 ? 1.0 : slope; }));
    }
    case LayerKind::tanh:
      return grad_out.cwiseProduct((1.0 - cache.output.array().square()).matrix());
  }
  throw DimensionMismatch("layer_backward: unknown layer");
}

}  // namespace r2c
