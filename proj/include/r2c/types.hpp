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

#ifndef R2C_TYPES_HPP
#define R2C_TYPES_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace r2c {

template <typename Scalar>
using ComplexT = std::complex<Scalar>;
template <typename Scalar>
using CVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using CMatrixT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;

/// Process exit codes used by the command line driver.
enum class ExitCode : int { ok = 0, config = 2, numeric = 3, io = 4 };

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what) : Error(ExitCode::config, what) {}
};

struct NotToeplitz : Error {
  explicit NotToeplitz(const std::string& what) : Error(ExitCode::numeric, what) {}
};

struct NonConvergence : Error {
  explicit NonConvergence(const std::string& what) : Error(ExitCode::numeric, what) {}
};

struct DivergedLoss : Error {
  explicit DivergedLoss(const std::string& what) : Error(ExitCode::numeric, what) {}
};

struct MissingModel : Error {
  explicit MissingModel(const std::string& what) : Error(ExitCode::config, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ExitCode::io, what) {}
};

/// SplitMix64 finalizer; used to derive independent per-record seeds.
constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t id) noexcept {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (id + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace r2c

#endif  // R2C_TYPES_HPP
