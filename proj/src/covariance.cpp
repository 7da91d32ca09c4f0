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

#include "r2c/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "r2c/scenario.hpp"

namespace r2c {

CovarianceMatrix::CovarianceMatrix(const CMatrix& data) {
  if (data.rows() != data.cols()) throw DimensionMismatch("covariance matrix must be square");
  data_ = 0.5 * (data + data.adjoint());
}

CovarianceMatrix comm_covariance(const ChannelFreq& ch, int num_vehicle_antennas) {
  if (ch.response.empty()) throw DimensionMismatch("comm_covariance: empty channel");
  if (num_vehicle_antennas < 1) throw ConfigError("comm_covariance: N_V must be >= 1");
  const Index n = ch.response.front().cols();
  CMatrix acc = CMatrix::Zero(n, n);
  for (const CMatrix& h : ch.response) {
    if (h.cols() != n) throw DimensionMismatch("comm_covariance: inconsistent subcarrier dimensions");
    acc.noalias() += h.adjoint() * h;
  }
  acc /= static_cast<double>(ch.response.size()) * num_vehicle_antennas;
  return CovarianceMatrix(acc);
}

CovarianceMatrix sample_covariance(const CMatrix& snapshots) {
  if (snapshots.cols() < 1) throw DimensionMismatch("sample_covariance: need at least one snapshot");
  CMatrix r = snapshots * snapshots.adjoint();
  r /= static_cast<double>(snapshots.cols());
  return CovarianceMatrix(r);
}

CMatrix project_toeplitz_hermitian(const CMatrix& m) {
  const Index n = m.rows();
  // Average the lower diagonal l together with the conjugate of the upper
  // diagonal l; this is the Frobenius projection onto Hermitian Toeplitz.
  CVector col(n);
  for (Index l = 0; l < n; ++l) {
    Complex sum = 0.0;
    for (Index i = l; i < n; ++i) sum += m(i, i - l) + std::conj(m(i - l, i));
    col[l] = sum / (2.0 * static_cast<double>(n - l));
  }
  col[0] = Complex(col[0].real(), 0.0);
  return toeplitz_from_column(col);
}

CMatrix project_psd(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  const Vector clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
}

ProjectionResult project_toeplitz_psd(const CovarianceMatrix& r, const ProjectionOptions& opts) {
  if (opts.tol <= 0.0 || opts.max_iter < 1) throw ConfigError("project_toeplitz_psd: need tol > 0, max_iter >= 1");
  const Index n = r.size();
  CMatrix x = r.matrix();
  CMatrix p = CMatrix::Zero(n, n);
  CMatrix q = CMatrix::Zero(n, n);

  // Tolerances are relative to the input, whose scale is arbitrary.
  const double scale = std::max(r.matrix().norm(), std::numeric_limits<double>::min());
  ProjectionResult out;
  bool stalled = false;
  CMatrix y_prev = x;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const CMatrix y = project_toeplitz_hermitian(x + p);
    p = x + p - y;
    CMatrix x_next = project_psd(y + q);
    q = y + q - x_next;
    const double change = std::max((x_next - x).norm(), (y - y_prev).norm());
    x = std::move(x_next);
    y_prev = y;
    out.iterations = it;
    if (change < opts.tol * scale) {
      stalled = true;
      break;
    }
  }
  CMatrix t = project_toeplitz_hermitian(x);
  out.residual = (t - x).norm() / scale;
  out.converged = stalled || out.residual <= 100.0 * opts.tol;
  // Dykstra approaches the intersection slowly; lifting the diagonal by the
  // remaining negative eigenvalue keeps t Toeplitz and makes it PSD.
  const double lift = -min_eigenvalue(t);
  if (lift > 0.0) t.diagonal().array() += lift;
  out.matrix = CovarianceMatrix(t);
  return out;
}

double toeplitz_deviation(const CMatrix& m) {
  double worst = 0.0;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      const Complex ref = i >= j ? m(i - j, 0) : m(0, j - i);
      worst = std::max(worst, std::abs(m(i, j) - ref));
    }
  }
  return worst;
}

ToeplitzColumn first_column(const CovarianceMatrix& r, double tol) {
  const double scale = std::max(1.0, r.matrix().cwiseAbs().maxCoeff());
  const double dev = toeplitz_deviation(r.matrix());
  if (dev > tol * scale) {
    throw NotToeplitz("first_column: diagonal variation " + std::to_string(dev) + " exceeds tolerance");
  }
  ToeplitzColumn out{r.matrix().col(0)};
  out.col[0] = Complex(out.col[0].real(), 0.0);
  return out;
}

CovarianceMatrix toeplitz_from_column(const ToeplitzColumn& r) {
  return CovarianceMatrix(toeplitz_from_column(r.col));
}

CovarianceMatrix normalize_power(const CovarianceMatrix& r) {
  const double per_antenna = r.trace() / static_cast<double>(r.size());
  if (!(per_antenna > 0.0)) return r;
  return CovarianceMatrix(r.matrix() / per_antenna);
}

double min_eigenvalue(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace r2c
