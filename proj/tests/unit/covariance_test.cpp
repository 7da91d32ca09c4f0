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

#include <random>

#include "r2c/covariance.hpp"
#include "r2c/scenario.hpp"

namespace r2c {
namespace {

CMatrix random_hermitian(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) m(i, j) = Complex(normal(rng), normal(rng));
  }
  return 0.5 * (m + m.adjoint());
}

TEST(CovarianceMatrix, SymmetrizesOnConstruction) {
  CMatrix m(2, 2);
  m << Complex(1, 0.1), Complex(2, 1), Complex(0, 0), Complex(3, -0.2);
  const CovarianceMatrix r(m);
  EXPECT_LT((r.matrix() - r.matrix().adjoint()).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(r.trace(), 4.0);
  EXPECT_THROW(CovarianceMatrix(CMatrix::Zero(2, 3)), DimensionMismatch);
}

TEST(CommCovariance, FlatSinglePath) {
  const UlaConfig rsu{8, 0.5};
  const UlaConfig veh{4, 0.5};
  const Complex alpha(0.6, -0.3);
  const CVector a_rsu = steering_vector(rsu, 0.35);
  const CMatrix h = alpha * steering_vector(veh, -0.1) * a_rsu.adjoint();
  const CovarianceMatrix r = comm_covariance(ChannelFreq{{h, h, h}}, veh.num_antennas);
  EXPECT_LT((r.matrix() - std::norm(alpha) * a_rsu * a_rsu.adjoint()).norm(), 1e-12);
}

TEST(CommCovariance, ZeroAndSingleSubcarrier) {
  EXPECT_EQ(comm_covariance(ChannelFreq{{CMatrix::Zero(2, 3)}}, 2).matrix().norm(), 0.0);
  const CMatrix h = CMatrix::Random(2, 3);
  const CovarianceMatrix r = comm_covariance(ChannelFreq{{h}}, 2);
  EXPECT_LT((r.matrix() - h.adjoint() * h / 2.0).norm(), 1e-14);
}

TEST(CommCovariance, PsdOnRandomChannels) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    ChannelFreq ch;
    for (int k = 0; k < 8; ++k) ch.response.push_back(CMatrix::Random(4, 16));
    const CovarianceMatrix r = comm_covariance(ch, 4);
    EXPECT_GE(min_eigenvalue(r.matrix()), -1e-10 * r.trace());
  }
}

TEST(SampleCovariance, KnownCases) {
  const CVector a = CVector::Random(5);
  const CMatrix y = a * CMatrix::Ones(1, 7);
  EXPECT_LT((sample_covariance(y).matrix() - a * a.adjoint()).norm(), 1e-13);
  EXPECT_LT((sample_covariance(CMatrix::Identity(4, 4)).matrix() - CMatrix::Identity(4, 4) / 4.0).norm(), 1e-15);
}

TEST(SampleCovariance, TraceAndPsd) {
  const CMatrix y = CMatrix::Random(6, 11);
  const CovarianceMatrix r = sample_covariance(y);
  EXPECT_NEAR(r.trace(), y.squaredNorm() / 11.0, 1e-12);
  EXPECT_GE(min_eigenvalue(r.matrix()), -1e-12);
}

TEST(ToeplitzHermitian, AveragesDiagonals) {
  CMatrix m(2, 2);
  m << Complex(1, 0), Complex(1, 1), Complex(3, 1), Complex(3, 0);
  // Lower diagonal entries: 3+1j and conj(1+1j) = 1-1j; mean 2.
  const CMatrix p = project_toeplitz_hermitian(m);
  EXPECT_NEAR(std::abs(p(0, 0) - Complex(2, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p(1, 0) - Complex(2, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p(0, 1) - Complex(2, 0)), 0.0, 1e-15);
}

TEST(ToeplitzHermitian, IsOrthogonalProjection) {
  std::mt19937_64 rng(4);
  const CMatrix m = random_hermitian(7, rng);
  const CMatrix p = project_toeplitz_hermitian(m);
  EXPECT_LT((project_toeplitz_hermitian(p) - p).norm(), 1e-13);
  // Residual orthogonal to the subspace: <m - p, t> = 0 for Toeplitz t.
  const CMatrix t = project_toeplitz_hermitian(random_hermitian(7, rng));
  EXPECT_NEAR(((m - p).adjoint() * t).trace().real(), 0.0, 1e-12);
}

TEST(ProjectPsd, ClipsNegativeEigenvalues) {
  std::mt19937_64 rng(5);
  const CMatrix m = random_hermitian(6, rng);
  const CMatrix p = project_psd(m);
  EXPECT_GE(min_eigenvalue(p), -1e-12);
  EXPECT_LT((project_psd(p) - p).norm(), 1e-12);
}

TEST(ToeplitzPsdProjection, TwoByTwoGivesIdentity) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 2.0;
  const ProjectionResult res = project_toeplitz_psd(CovarianceMatrix(m));
  EXPECT_TRUE(res.converged);
  EXPECT_LT((res.matrix.matrix() - CMatrix::Identity(2, 2)).norm(), 1e-9);
}

TEST(ToeplitzPsdProjection, FixedPoints) {
  const CMatrix id = CMatrix::Identity(5, 5);
  const ProjectionResult r1 = project_toeplitz_psd(CovarianceMatrix(id));
  EXPECT_LT((r1.matrix.matrix() - id).norm(), 1e-9);

  const CVector a = steering_vector(UlaConfig{16, 0.5}, 0.41);
  const CMatrix rank1 = a * a.adjoint();
  const ProjectionResult r2 = project_toeplitz_psd(CovarianceMatrix(rank1));
  EXPECT_LT((r2.matrix.matrix() - rank1).norm(), 1e-9);
}

TEST(ToeplitzPsdProjection, RandomInputsSatisfyConstraints) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    const CMatrix m = random_hermitian(16, rng);
    const ProjectionResult res = project_toeplitz_psd(CovarianceMatrix(m));
    EXPECT_LE(toeplitz_deviation(res.matrix.matrix()), 1e-8);
    EXPECT_GE(min_eigenvalue(res.matrix.matrix()), -1e-8);
    const ProjectionResult again = project_toeplitz_psd(res.matrix);
    EXPECT_LE((again.matrix.matrix() - res.matrix.matrix()).norm(), 2e-9);
  }
}

TEST(ToeplitzPsdProjection, RejectsBadOptions) {
  EXPECT_THROW(project_toeplitz_psd(CovarianceMatrix(CMatrix::Identity(2, 2)), {0.0, 10}), ConfigError);
  EXPECT_THROW(project_toeplitz_psd(CovarianceMatrix(CMatrix::Identity(2, 2)), {1e-9, 0}), ConfigError);
}

TEST(ToeplitzPsdProjection, ReportsNonConvergence) {
  std::mt19937_64 rng(7);
  const ProjectionResult res = project_toeplitz_psd(CovarianceMatrix(random_hermitian(16, rng)), {1e-15, 1});
  EXPECT_EQ(res.iterations, 1);
  EXPECT_FALSE(res.converged);
  EXPECT_GT(res.residual, 0.0);
}

TEST(FirstColumn, IdentityAndSteering) {
  const ToeplitzColumn e = first_column(CovarianceMatrix(CMatrix::Identity(4, 4)));
  CVector expected = CVector::Zero(4);
  expected[0] = 1.0;
  EXPECT_EQ(e.col, expected);

  const CVector a = steering_vector(UlaConfig{8, 0.5}, -0.6);
  const ToeplitzColumn c = first_column(CovarianceMatrix(a * a.adjoint()));
  // Column 0 of a a^H is a conj(a_0) = a, since a_0 = 1.
  EXPECT_LT((c.col - a).norm(), 1e-12);
}

TEST(FirstColumn, RejectsNonToeplitz) {
  CMatrix m = CMatrix::Identity(3, 3);
  m(2, 2) = 2.0;
  EXPECT_THROW(first_column(CovarianceMatrix(m)), NotToeplitz);
}

TEST(ToeplitzFromColumn, HandExpansion) {
  CVector r(2);
  r << Complex(1, 0), Complex(0, 0.5);
  const CovarianceMatrix t = toeplitz_from_column(ToeplitzColumn{r});
  CMatrix expected(2, 2);
  expected << Complex(1, 0), Complex(0, -0.5), Complex(0, 0.5), Complex(1, 0);
  EXPECT_LT((t.matrix() - expected).norm(), 1e-15);
}

TEST(ToeplitzFromColumn, RoundTripIsExact) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const CMatrix m = project_toeplitz_hermitian(random_hermitian(9, rng));
    const CovarianceMatrix r(m);
    const ToeplitzColumn c = first_column(r);
    EXPECT_EQ(toeplitz_from_column(c).matrix(), r.matrix());
    EXPECT_EQ(first_column(toeplitz_from_column(c)).col, c.col);
  }
}

TEST(ToeplitzFromColumn, ExpressionInput) {
  const CVector r = CVector::Random(4);
  const CMatrix a = toeplitz_from_column(r * 2.0);
  const CMatrix b = toeplitz_from_column(CVector(r * 2.0));
  EXPECT_EQ(a, b);
}

TEST(NormalizePower, UnitMeanDiagonal) {
  const CovarianceMatrix r(CMatrix::Identity(4, 4) * 3.0);
  EXPECT_NEAR(normalize_power(r).trace(), 4.0, 1e-15);
  EXPECT_EQ(normalize_power(CovarianceMatrix(CMatrix::Zero(3, 3))).matrix().norm(), 0.0);
}

}  // namespace
}  // namespace r2c
