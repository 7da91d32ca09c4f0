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

#ifndef R2C_COVARIANCE_HPP
#define R2C_COVARIANCE_HPP

#include "r2c/types.hpp"

namespace r2c {

struct ChannelFreq;

/// Hermitian spatial covariance. The stored matrix is symmetrized on
/// construction, so Hermitian symmetry holds to rounding.
class CovarianceMatrix {
 public:
  CovarianceMatrix() = default;
  explicit CovarianceMatrix(const CMatrix& data);

  const CMatrix& matrix() const noexcept { return data_; }
  Index size() const noexcept { return data_.rows(); }
  double trace() const { return data_.diagonal().real().sum(); }

 private:
  CMatrix data_;
};

/// First column of a Hermitian Toeplitz matrix. Entry 0 is the (real)
/// diagonal value.
struct ToeplitzColumn {
  CVector col;

  Index size() const noexcept { return col.size(); }
};

CovarianceMatrix comm_covariance(const ChannelFreq& ch, int num_vehicle_antennas);

/// R = Y Y^H / I.
CovarianceMatrix sample_covariance(const CMatrix& snapshots);

/// `tol` is relative to the Frobenius norm of the input.
struct ProjectionOptions {
  double tol = 1e-9;
  int max_iter = 500;
};

struct ProjectionResult {
  CovarianceMatrix matrix;
  double residual = 0.0;  // Frobenius gap between the constraint iterates over ||input||
  int iterations = 0;
  bool converged = false;
};

/// Orthogonal projection onto the Hermitian Toeplitz subspace: every
/// diagonal is replaced by its mean.
CMatrix project_toeplitz_hermitian(const CMatrix& m);

/// Clip negative eigenvalues of a Hermitian matrix to zero.
CMatrix project_psd(const CMatrix& m);

/// Nearest Toeplitz-Hermitian-PSD matrix by Dykstra's alternating
/// projections. The returned matrix is the Toeplitz iterate with its
/// diagonal lifted by any remaining negative eigenvalue, so it is Toeplitz
/// and PSD up to rounding; `residual` is the gap before the lift.
/// `converged` is false when max_iter was reached with residual > 100 tol.
ProjectionResult project_toeplitz_psd(const CovarianceMatrix& r, const ProjectionOptions& opts = {});

/// Throws NotToeplitz when a diagonal varies by more than `tol` (relative
/// to the largest entry, when that exceeds one).
ToeplitzColumn first_column(const CovarianceMatrix& r, double tol = 1e-6);

/// Hermitian Toeplitz matrix whose (i, j) entry is col[i - j] for i >= j
/// and conj(col[j - i]) otherwise.
template <typename Derived>
CMatrixT<typename Derived::RealScalar> toeplitz_from_column(const Eigen::MatrixBase<Derived>& col) {
  using Scalar = typename Derived::RealScalar;
  const Index n = col.size();
  CMatrixT<Scalar> t(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      t(i, j) = i >= j ? std::complex<Scalar>(col[i - j]) : std::conj(std::complex<Scalar>(col[j - i]));
    }
  }
  // Diagonal of a Hermitian matrix is real.
  for (Index i = 0; i < n; ++i) t(i, i) = std::complex<Scalar>(std::real(col[0]), Scalar(0));
  return t;
}

CovarianceMatrix toeplitz_from_column(const ToeplitzColumn& r);

/// Scale so that the mean diagonal (per-antenna power) is one. A zero
/// matrix is returned unchanged.
CovarianceMatrix normalize_power(const CovarianceMatrix& r);

double min_eigenvalue(const CMatrix& hermitian);

/// Largest deviation of any entry from the first entry of its diagonal.
double toeplitz_deviation(const CMatrix& m);

}  // namespace r2c

#endif  // R2C_COVARIANCE_HPP
