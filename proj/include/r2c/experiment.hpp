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

#ifndef R2C_EXPERIMENT_HPP
#define R2C_EXPERIMENT_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "r2c/beamtraining.hpp"
#include "r2c/covariance.hpp"
#include "r2c/neuralnet.hpp"
#include "r2c/scenario.hpp"

namespace r2c {

inline constexpr int kFormatVersion = 1;

struct SplitSizes {
  int train = 1200;
  int val = 300;
  int test = 500;

  bool operator==(const SplitSizes&) const = default;
};

/// Dataset-level projection settings. The tolerance is looser than the
/// projection's own default: the result is made feasible by a final lift
/// anyway, and 1e-6 changes the spectra by ~1e-5 at a fraction of the cost.
struct ProjectionSettings {
  bool enabled = true;
  double tol = 1e-6;
  int max_iter = 500;

  bool operator==(const ProjectionSettings&) const = default;
};

struct ExperimentConfig {
  GeneratorConfig scenario;
  ProjectionSettings projection;
  TrainConfig train_aps;
  TrainConfig train_col;
  RateConfig rate = RateConfig::for_arrays(64, 16, 64);
  StrategySettings strategies;
  SplitSizes split;
  std::uint64_t master_seed = 1;

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json to_json(const ExperimentConfig& cfg);

/// Missing fields keep their defaults; unknown fields and type errors are
/// reported as ConfigError naming the offending field path.
ExperimentConfig experiment_from_json(const nlohmann::json& j);

/// Throws ConfigError with the parser's line/column diagnostic on bad JSON.
ExperimentConfig load_experiment_config(const std::string& path);

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j, const std::string& where = "train");

nlohmann::json complex_to_json(Complex z);
Complex complex_from_json(const nlohmann::json& j);

}  // namespace r2c

#endif  // R2C_EXPERIMENT_HPP
