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

#ifndef R2C_SPECTRUM_HPP
#define R2C_SPECTRUM_HPP

#include <vector>

#include "r2c/covariance.hpp"
#include "r2c/types.hpp"

namespace r2c {

enum class GridSpacing { sine, angle };

/// Angle grid and its DFT steering matrix; column i is f(angles[i]) with
/// entries exp(-j n 2 pi spacing sin(angles[i])).
struct DftGrid {
  CMatrix matrix;
  Vector angles;
  double spacing = 0.5;

  Index size() const noexcept { return angles.size(); }
};

enum class ApsScale { linear, log_db };

struct Aps {
  Vector values;
  ApsScale scale = ApsScale::linear;

  Aps() = default;
  /// Linear spectra are clamped at zero.
  Aps(Vector v, ApsScale s);

  Index size() const noexcept { return values.size(); }
};

inline constexpr double kDefaultFloorDb = -80.0;

/// Bin-centred grid. With GridSpacing::sine the angles are
/// asin(-1 + (2i + 1) / N), which makes F^H F = N I for half-wavelength
/// spacing; GridSpacing::angle spaces the bins uniformly in angle.
DftGrid dft_grid(int n, double spacing = 0.5, GridSpacing kind = GridSpacing::sine);

/// Raw spectrum d_i = f_i^T R conj(f_i) without clamping; linear in R. The
/// pairing matches the exp(+j ...) steering convention, so a source at
/// angles[i] peaks at bin i.
Vector aps_diagonal(const CMatrix& r, const DftGrid& grid);

Aps aps(const CovarianceMatrix& r, const DftGrid& grid);

Aps to_log_scale(const Aps& d, double floor_db = kDefaultFloorDb);
Aps from_log_scale(const Aps& d);

/// Indices of the L largest values in descending order; ties go to the
/// lower index.
std::vector<Index> top_indices(const Vector& d, int l);

/// Windowed overlap score: d2 mass on the top-L bins of d1 over the d2
/// mass on its own top-L bins. Both spectra must be linear.
double similarity(const Aps& d1, const Aps& d2, int l);

Index argmax_bin(const Vector& d);

}  // namespace r2c

#endif  // R2C_SPECTRUM_HPP
