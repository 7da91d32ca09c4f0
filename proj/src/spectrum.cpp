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

#include "r2c/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace r2c {

Aps::Aps(Vector v, ApsScale s) : values(std::move(v)), scale(s) {
  if (scale == ApsScale::linear) values = values.cwiseMax(0.0);
}

DftGrid dft_grid(int n, double spacing, GridSpacing kind) {
  if (n < 2) throw ConfigError("dft_grid: N must be >= 2");
  DftGrid g;
  g.spacing = spacing;
  g.angles.resize(n);
  for (int i = 0; i < n; ++i) {
    g.angles[i] = kind == GridSpacing::sine ? std::asin(-1.0 + (2.0 * i + 1.0) / n)
                                            : -kPi / 2.0 + kPi * (i + 0.5) / n;
  }
  g.matrix.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const double step = -2.0 * kPi * spacing * std::sin(g.angles[i]);
    for (int m = 0; m < n; ++m) g.matrix(m, i) = std::polar(1.0, step * m);
  }
  return g;
}

Vector aps_diagonal(const CMatrix& r, const DftGrid& grid) {
  if (r.rows() != grid.matrix.rows() || r.cols() != grid.matrix.rows()) {
    throw DimensionMismatch("aps: covariance and grid sizes differ");
  }
  const CMatrix rf = r * grid.matrix.conjugate();
  Vector d(grid.size());
  for (Index i = 0; i < d.size(); ++i) d[i] = grid.matrix.col(i).cwiseProduct(rf.col(i)).sum().real();
  return d;
}

Aps aps(const CovarianceMatrix& r, const DftGrid& grid) {
  if (r.size() != grid.matrix.rows()) throw DimensionMismatch("aps: covariance and grid sizes differ");
  const CMatrix rf = r.matrix() * grid.matrix.conjugate();
  Vector d(grid.size());
  double max_imag = 0.0;
  for (Index i = 0; i < d.size(); ++i) {
    const Complex v = grid.matrix.col(i).cwiseProduct(rf.col(i)).sum();
    d[i] = v.real();
    max_imag = std::max(max_imag, std::abs(v.imag()));
  }
  const double scale = std::max(std::abs(r.trace()), 1e-300) * static_cast<double>(d.size());
  if (max_imag > 1e-9 * scale) throw DimensionMismatch("aps: covariance is not Hermitian");
  return Aps(std::move(d), ApsScale::linear);
}

Aps to_log_scale(const Aps& d, double floor_db) {
  if (d.scale != ApsScale::linear) throw ConfigError("to_log_scale: input must be linear");
  const double floor_lin = std::pow(10.0, floor_db / 10.0);
  Vector out = d.values.unaryExpr([floor_lin](double v) { return 10.0 * std::log10(std::max(v, floor_lin)); });
  return Aps(std::move(out), ApsScale::log_db);
}

Aps from_log_scale(const Aps& d) {
  if (d.scale != ApsScale::log_db) throw ConfigError("from_log_scale: input must be in dB");
  Vector out = d.values.unaryExpr([](double v) { return std::pow(10.0, v / 10.0); });
  return Aps(std::move(out), ApsScale::linear);
}

std::vector<Index> top_indices(const Vector& d, int l) {
  if (l < 1 || l > d.size()) throw ConfigError("top_indices: need 1 <= L <= N");
  std::vector<Index> idx(d.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  std::partial_sort(idx.begin(), idx.begin() + l, idx.end(), [&d](Index a, Index b) {
    return d[a] > d[b] || (d[a] == d[b] && a < b);
  });
  idx.resize(l);
  return idx;
}

double similarity(const Aps& d1, const Aps& d2, int l) {
  if (d1.scale != ApsScale::linear || d2.scale != ApsScale::linear) {
    throw ConfigError("similarity: both spectra must be linear");
  }
  if (d1.size() != d2.size()) throw DimensionMismatch("similarity: spectra lengths differ");
  // Summing in index order makes equal index sets give bitwise equal sums.
  auto mass_on = [&d2](std::vector<Index> idx) {
    std::sort(idx.begin(), idx.end());
    double sum = 0.0;
    for (Index i : idx) sum += d2.values[i];
    return sum;
  };
  const double num = mass_on(top_indices(d1.values, l));
  const double den = mass_on(top_indices(d2.values, l));
  if (den <= 0.0) return 1.0;
  // Tied top sets can differ by rounding only.
  return std::min(1.0, num / den);
}

Index argmax_bin(const Vector& d) {
  Index best = 0;
  for (Index i = 1; i < d.size(); ++i) {
    if (d[i] > d[best]) best = i;
  }
  return best;
}

}  // namespace r2c
