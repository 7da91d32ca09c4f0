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

#ifndef R2C_BEAMTRAINING_HPP
#define R2C_BEAMTRAINING_HPP

#include <optional>
#include <string>
#include <vector>

#include "r2c/covariance.hpp"
#include "r2c/neuralnet.hpp"
#include "r2c/scenario.hpp"
#include "r2c/spectrum.hpp"
#include "r2c/types.hpp"

namespace r2c {

/// Phase-quantized beam codebook; column n of `codewords` points at
/// angles[n].
struct Codebook {
  CMatrix codewords;
  Vector angles;
  int phase_bits = 2;

  Index size() const noexcept { return codewords.cols(); }
};

/// k T0 B F, with T0 = 290 K.
double thermal_noise_power(double bandwidth_hz, double noise_figure_db);

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

struct RateConfig {
  double bandwidth = 491.52e6;
  double tx_power = dbm_to_watts(24.0);
  double noise_power = thermal_noise_power(491.52e6 / 64.0, 7.0);  // per subcarrier
  double symbol_period = 4.7667e-6;
  double coherence_time = 4.0 * 64 * 4.7667e-6 * 16;
  int num_subcarriers = 64;

  /// Defaults for an array pair and subcarrier count: coherence time of
  /// 4 N_RSU N_V symbols, thermal noise per subcarrier with a 7 dB figure.
  static RateConfig for_arrays(int n_rsu, int n_vehicle, int num_subcarriers);

  void validate() const;
  bool operator==(const RateConfig&) const = default;
};

enum class Strategy { exhaustive, radar_only, aps_pred, cov_pred };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);
std::vector<Strategy> all_strategies();

struct SearchResult {
  Index tx_index = 0;
  Index rx_index = 0;
  double spectral_efficiency = 0.0;
  long overhead_blocks = 0;
  double objective = 0.0;  // sum_k |w^H H[k] f|^2 of the winner
};

/// nth codeword (n = 1..N) points at asin((2n - N - 1) / N); entry
/// phases are rounded to the nearest multiple of 2 pi / 2^phase_bits.
Codebook build_codebook(int n, int phase_bits, double spacing = 0.5);

double reference_angle(const Aps& d, const DftGrid& grid);

/// The `size` codewords closest in nominal angle to `ref`, ascending.
std::vector<Index> candidate_window(const Codebook& cb, double ref, int size);

std::vector<Index> all_indices(const Codebook& cb);

/// (1/K) sum_k log2(1 + P_c / (K sigma^2) |w^H H[k] f|^2).
double spectral_efficiency(const ChannelFreq& ch, const CVector& f, const CVector& w,
                           const RateConfig& cfg);

SearchResult beam_search(const ChannelFreq& ch, const Codebook& tx_cb, const std::vector<Index>& tx_candidates,
                         const Codebook& rx_cb, const std::vector<Index>& rx_candidates,
                         const RateConfig& cfg);

/// Fraction of the coherence time left after training.
double overhead_factor(long overhead_blocks, const RateConfig& cfg);

/// max(0, 1 - blocks T_sym / T_coh) B se.
double effective_rate(double se, long overhead_blocks, const RateConfig& cfg);

struct StrategySettings {
  int radar_window = 12;
  int aps_window = 12;
  int cov_window = 2;
  int similarity_window = 5;
  int phase_bits = 2;
  double floor_db = kDefaultFloorDb;

  void validate(int n_rsu) const;
  bool operator==(const StrategySettings&) const = default;
};

/// Everything a strategy needs to know about one test sample.
struct LinkSample {
  std::int64_t id = 0;
  ChannelFreq channel;
  ToeplitzColumn radar_column;
  Aps radar_aps;  // linear
  Aps comm_aps;   // linear
};

struct Predictors {
  const Network* aps = nullptr;
  const Network* col = nullptr;
};

/// Shared, read-only state of a rate experiment.
struct BeamContext {
  DftGrid grid;
  Codebook tx_codebook;
  Codebook rx_codebook;
  RateConfig rate;
  StrategySettings settings;

  static BeamContext make(int n_rsu, int n_vehicle, double spacing, const RateConfig& rate,
                          const StrategySettings& settings);
};

struct RateRow {
  std::int64_t id = 0;
  Strategy strategy = Strategy::exhaustive;
  Index tx_index = 0;
  Index rx_index = 0;
  long overhead_blocks = 0;
  double se = 0.0;
  double rate = 0.0;
  /// Similarity (window L) of the steering APS against the true one;
  /// absent for exhaustive search.
  std::optional<double> similarity;
};

/// Predicted communication APS (linear) for the DL strategies.
Aps predicted_aps_from_aps_net(const Network& net, const Aps& radar_aps, double floor_db);
Aps predicted_aps_from_col_net(const Network& net, const ToeplitzColumn& radar_column, const DftGrid& grid);

RateRow run_strategy(const LinkSample& sample, Strategy strategy, const Predictors& nets, const BeamContext& ctx);

struct RateReport {
  Strategy strategy = Strategy::exhaustive;
  double mean_rate = 0.0;
  double mean_se = 0.0;
  double mean_similarity = 0.0;
  std::vector<RateRow> rows;
};

RateReport summarize(Strategy strategy, std::vector<RateRow> rows);

}  // namespace r2c

#endif  // R2C_BEAMTRAINING_HPP
