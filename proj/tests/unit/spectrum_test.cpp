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

#include "r2c/scenario.hpp"
#include "r2c/spectrum.hpp"

namespace r2c {
namespace {

Aps linear(std::initializer_list<double> v) {
  Vector x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double e : v) x[i++] = e;
  return Aps(x, ApsScale::linear);
}

TEST(DftGrid, TwoBinAngles) {
  const DftGrid g = dft_grid(2, 0.5);
  EXPECT_NEAR(g.angles[0], -kPi / 6, 1e-15);
  EXPECT_NEAR(g.angles[1], kPi / 6, 1e-15);
}

TEST(DftGrid, ColumnsAndOrthogonality) {
  for (int n : {4, 16, 64}) {
    const DftGrid g = dft_grid(n, 0.5);
    for (Index i = 0; i < n; ++i) EXPECT_NEAR(g.matrix.col(i).squaredNorm(), n, 1e-9);
    const CMatrix gram = g.matrix.adjoint() * g.matrix;
    EXPECT_LT((gram - n * CMatrix::Identity(n, n)).norm(), 1e-9 * n);
    for (Index i = 1; i < n; ++i) EXPECT_GT(g.angles[i], g.angles[i - 1]);
    EXPECT_GE(g.angles[0], -kPi / 2);
    EXPECT_LT(g.angles[n - 1], kPi / 2);
  }
}

TEST(DftGrid, EntrySign) {
  const DftGrid g = dft_grid(8, 0.5);
  const double w = 2.0 * kPi * 0.5 * std::sin(g.angles[5]);
  EXPECT_LT(std::abs(g.matrix(3, 5) - std::polar(1.0, -3.0 * w)), 1e-12);
}

TEST(DftGrid, UniformAngleOption) {
  const DftGrid g = dft_grid(4, 0.5, GridSpacing::angle);
  EXPECT_NEAR(g.angles[0], -kPi / 2 + kPi / 8, 1e-15);
  EXPECT_NEAR(g.angles[3] - g.angles[2], kPi / 4, 1e-15);
  EXPECT_THROW(dft_grid(1), ConfigError);
}

TEST(Aps, IdentityAndZero) {
  const DftGrid g = dft_grid(8);
  const Aps d = aps(CovarianceMatrix(CMatrix::Identity(8, 8)), g);
  for (Index i = 0; i < 8; ++i) EXPECT_NEAR(d.values[i], 8.0, 1e-12);
  EXPECT_EQ(aps(CovarianceMatrix(CMatrix::Zero(8, 8)), g).values.norm(), 0.0);
}

TEST(Aps, OnGridSourcePeaksAtItsBin) {
  const int n = 16;
  const DftGrid g = dft_grid(n);
  for (Index i = 0; i < n; ++i) {
    const CVector a = steering_vector(UlaConfig{n, 0.5}, g.angles[i]);
    const Aps d = aps(CovarianceMatrix(a * a.adjoint()), g);
    EXPECT_EQ(argmax_bin(d.values), i);
    EXPECT_NEAR(d.values[i], n * n, 1e-9 * n * n);
  }
}

TEST(Aps, LinearAndEnergyAccounting) {
  std::mt19937_64 rng(1);
  const int n = 12;
  const DftGrid g = dft_grid(n);
  auto random_psd = [&] {
    const CMatrix y = CMatrix::Random(n, 5);
    return CovarianceMatrix(y * y.adjoint());
  };
  const CovarianceMatrix r1 = random_psd();
  const CovarianceMatrix r2 = random_psd();
  const Aps sum = aps(CovarianceMatrix(0.7 * r1.matrix() + 2.0 * r2.matrix()), g);
  const Vector expected = 0.7 * aps(r1, g).values + 2.0 * aps(r2, g).values;
  EXPECT_LT((sum.values - expected).cwiseAbs().maxCoeff(), 1e-10 * expected.cwiseAbs().maxCoeff());
  EXPECT_NEAR(aps(r1, g).values.sum(), n * r1.trace(), 1e-8 * n * r1.trace());
}

TEST(Aps, DimensionMismatch) {
  EXPECT_THROW(aps(CovarianceMatrix(CMatrix::Identity(4, 4)), dft_grid(8)), DimensionMismatch);
}

TEST(Aps, ConstructionClampsNegatives) {
  const Aps d = linear({-1e-12, 2.0});
  EXPECT_EQ(d.values[0], 0.0);
  const Aps l(Vector::Constant(2, -3.0), ApsScale::log_db);
  EXPECT_EQ(l.values[0], -3.0);
}

TEST(LogScale, KnownValuesAndRoundTrip) {
  const Aps d = linear({1.0, 0.0, 100.0});
  const Aps l = to_log_scale(d, -80.0);
  EXPECT_EQ(l.scale, ApsScale::log_db);
  EXPECT_NEAR(l.values[0], 0.0, 1e-15);
  EXPECT_NEAR(l.values[1], -80.0, 1e-12);
  EXPECT_NEAR(l.values[2], 20.0, 1e-12);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(1e-6, 1e3);
  Vector v(50);
  for (Index i = 0; i < v.size(); ++i) v[i] = u(rng);
  const Aps back = from_log_scale(to_log_scale(Aps(v, ApsScale::linear)));
  EXPECT_LT(((back.values - v).array() / v.array()).abs().maxCoeff(), 1e-12);
  EXPECT_THROW(to_log_scale(l), ConfigError);
  EXPECT_THROW(from_log_scale(d), ConfigError);
}

TEST(TopIndices, OrderAndTies) {
  EXPECT_EQ(top_indices(linear({4, 3, 2, 1}).values, 2), (std::vector<Index>{0, 1}));
  EXPECT_EQ(top_indices(linear({1, 1, 1, 1}).values, 2), (std::vector<Index>{0, 1}));
  EXPECT_EQ(top_indices(linear({0, 0, 5, 6}).values, 2), (std::vector<Index>{3, 2}));
  EXPECT_THROW(top_indices(linear({1, 2}).values, 3), ConfigError);
  EXPECT_THROW(top_indices(linear({1, 2}).values, 0), ConfigError);
}

TEST(Similarity, HandComputed) {
  EXPECT_NEAR(similarity(linear({0, 0, 5, 6}), linear({4, 3, 2, 1}), 2), 3.0 / 7.0, 1e-12);
  EXPECT_EQ(similarity(linear({1, 0, 0, 0}), linear({0, 0, 1, 1}), 1), 0.0);
  EXPECT_EQ(similarity(linear({1, 2}), linear({0, 0}), 1), 1.0);
}

TEST(Similarity, IdentityRangeAndScaleInvariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] {
    Vector v(32);
    for (Index i = 0; i < v.size(); ++i) v[i] = u(rng);
    return Aps(v, ApsScale::linear);
  };
  for (int t = 0; t < 200; ++t) {
    const Aps d1 = draw();
    const Aps d2 = draw();
    EXPECT_EQ(similarity(d1, d1, 5), 1.0);
    const double s = similarity(d1, d2, 5);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    const double scaled = similarity(Aps(d1.values * 3.5, ApsScale::linear), Aps(d2.values * 0.2, ApsScale::linear), 5);
    EXPECT_NEAR(scaled, s, 1e-12);
  }
}

TEST(Similarity, RejectsLogInputs) {
  const Aps l(Vector::Zero(4), ApsScale::log_db);
  EXPECT_THROW(similarity(l, linear({1, 2, 3, 4}), 2), ConfigError);
  EXPECT_THROW(similarity(linear({1, 2}), linear({1, 2, 3}), 1), DimensionMismatch);
}

TEST(ArgmaxBin, FirstOfTies) {
  EXPECT_EQ(argmax_bin(linear({1, 3, 3, 2}).values), 1);
}

}  // namespace
}  // namespace r2c
