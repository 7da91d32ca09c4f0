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

#include "r2c/beamtraining.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace r2c {

double thermal_noise_power(double bandwidth_hz, double noise_figure_db) {
  constexpr double kBoltzmann = 1.380649e-23;
  constexpr double kReferenceTemperature = 290.0;
  return kBoltzmann * kReferenceTemperature * bandwidth_hz * std::pow(10.0, noise_figure_db / 10.0);
}

RateConfig RateConfig::for_arrays(int n_rsu, int n_vehicle, int num_subcarriers) {
  RateConfig cfg;
  cfg.num_subcarriers = num_subcarriers;
  cfg.noise_power = thermal_noise_power(cfg.bandwidth / num_subcarriers, 7.0);
  cfg.coherence_time = cfg.symbol_period * (4.0 * n_rsu * n_vehicle);
  return cfg;
}

void RateConfig::validate() const {
  if (!(bandwidth > 0.0 && tx_power > 0.0 && noise_power > 0.0 && symbol_period > 0.0 && coherence_time > 0.0) ||
      num_subcarriers < 1) {
    throw ConfigError("rate: bandwidth, tx_power, noise_power, symbol_period, coherence_time and "
                      "num_subcarriers must be positive");
  }
}

void StrategySettings::validate(int n_rsu) const {
  for (int w : {radar_window, aps_window, cov_window}) {
    if (w < 1 || w > n_rsu) throw ConfigError("strategies: windows must lie in [1, N_RSU]");
  }
  if (similarity_window < 1 || similarity_window > n_rsu) {
    throw ConfigError("strategies.similarity_window must lie in [1, N_RSU]");
  }
  if (phase_bits < 1) throw ConfigError("strategies.phase_bits must be >= 1");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::exhaustive: return "exhaustive";
    case Strategy::radar_only: return "radar_only";
    case Strategy::aps_pred: return "aps_pred";
    case Strategy::cov_pred: return "cov_pred";
  }
  return "unknown";
}

Strategy strategy_from_string(const std::string& name) {
  for (Strategy s : all_strategies()) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown strategy '" + name + "'");
}

std::vector<Strategy> all_strategies() {
  return {Strategy::exhaustive, Strategy::radar_only, Strategy::aps_pred, Strategy::cov_pred};
}

Codebook build_codebook(int n, int phase_bits, double spacing) {
  if (n < 2) throw ConfigError("build_codebook: N must be >= 2");
  if (phase_bits < 1 || phase_bits > 30) throw ConfigError("build_codebook: phase_bits must lie in [1, 30]");
  const long levels = 1L << phase_bits;
  const double step = 2.0 * kPi / static_cast<double>(levels);
  const double amplitude = 1.0 / std::sqrt(static_cast<double>(n));

  auto quantized = [&](double phase) {
    phase = std::fmod(phase, 2.0 * kPi);
    if (phase < 0.0) phase += 2.0 * kPi;
    // Nearest level, ties toward the smaller phase.
    long k = static_cast<long>(std::ceil(phase / step - 0.5)) % levels;
    // Quarter turns are represented exactly.
    if ((4 * k) % levels == 0) {
      switch ((4 * k) / levels) {
        case 0: return Complex(amplitude, 0.0);
        case 1: return Complex(0.0, amplitude);
        case 2: return Complex(-amplitude, 0.0);
        default: return Complex(0.0, -amplitude);
      }
    }
    return std::polar(amplitude, static_cast<double>(k) * step);
  };

  Codebook cb;
  cb.phase_bits = phase_bits;
  cb.angles.resize(n);
  cb.codewords.resize(n, n);
  for (int idx = 0; idx < n; ++idx) {
    const int nth = idx + 1;
    cb.angles[idx] = std::asin(static_cast<double>(2 * nth - n - 1) / n);
    const double phase_step = 2.0 * kPi * spacing * std::sin(cb.angles[idx]);
    for (int m = 0; m < n; ++m) cb.codewords(m, idx) = quantized(phase_step * m);
  }
  return cb;
}

double reference_angle(const Aps& d, const DftGrid& grid) {
  if (d.scale != ApsScale::linear) throw ConfigError("reference_angle: APS must be linear");
  if (d.size() != grid.size()) throw DimensionMismatch("reference_angle: APS and grid sizes differ");
  return grid.angles[argmax_bin(d.values)];
}

std::vector<Index> candidate_window(const Codebook& cb, double ref, int size) {
  if (size < 1 || size > cb.size()) throw ConfigError("candidate_window: need 1 <= size <= codebook size");
  std::vector<Index> idx(static_cast<std::size_t>(cb.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    return std::abs(cb.angles[a] - ref) < std::abs(cb.angles[b] - ref);
  });
  idx.resize(static_cast<std::size_t>(size));
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<Index> all_indices(const Codebook& cb) {
  std::vector<Index> idx(static_cast<std::size_t>(cb.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  return idx;
}

double spectral_efficiency(const ChannelFreq& ch, const CVector& f, const CVector& w, const RateConfig& cfg) {
  if (ch.response.empty()) throw DimensionMismatch("spectral_efficiency: empty channel");
  if (static_cast<int>(ch.response.size()) != cfg.num_subcarriers) {
    throw DimensionMismatch("spectral_efficiency: channel has a different subcarrier count than the rate config");
  }
  const CMatrix& h0 = ch.response.front();
  if (h0.cols() != f.size() || h0.rows() != w.size()) throw DimensionMismatch("spectral_efficiency: beam sizes");
  const double snr = cfg.tx_power / (cfg.num_subcarriers * cfg.noise_power);
  double acc = 0.0;
  for (const CMatrix& h : ch.response) acc += std::log2(1.0 + snr * std::norm(w.dot(h * f)));
  return acc / static_cast<double>(ch.response.size());
}

SearchResult beam_search(const ChannelFreq& ch, const Codebook& tx_cb, const std::vector<Index>& tx_candidates,
                         const Codebook& rx_cb, const std::vector<Index>& rx_candidates, const RateConfig& cfg) {
  if (tx_candidates.empty() || rx_candidates.empty()) throw ConfigError("beam_search: empty candidate list");
  if (ch.response.empty()) throw DimensionMismatch("beam_search: empty channel");
  const Index k_count = static_cast<Index>(ch.response.size());
  const Index n_rx = ch.response.front().rows();
  if (ch.response.front().cols() != tx_cb.codewords.rows() || n_rx != rx_cb.codewords.rows()) {
    throw DimensionMismatch("beam_search: codebook and channel sizes differ");
  }
  for (Index t : tx_candidates) {
    if (t < 0 || t >= tx_cb.size()) throw ConfigError("beam_search: tx candidate out of range");
  }
  for (Index r : rx_candidates) {
    if (r < 0 || r >= rx_cb.size()) throw ConfigError("beam_search: rx candidate out of range");
  }

  SearchResult best;
  best.objective = -1.0;
  CMatrix g(n_rx, k_count);
  for (Index t : tx_candidates) {
    const auto f = tx_cb.codewords.col(t);
    for (Index k = 0; k < k_count; ++k) g.col(k).noalias() = ch.response[k] * f;
    for (Index r : rx_candidates) {
      const double obj = (rx_cb.codewords.col(r).adjoint() * g).squaredNorm();
      // Strict comparison keeps the lexicographically smallest pair on ties,
      // given ascending candidate lists.
      if (obj > best.objective ||
          (obj == best.objective && std::pair(t, r) < std::pair(best.tx_index, best.rx_index))) {
        best.objective = obj;
        best.tx_index = t;
        best.rx_index = r;
      }
    }
  }
  best.overhead_blocks = static_cast<long>(tx_candidates.size() * rx_candidates.size());
  best.spectral_efficiency =
      spectral_efficiency(ch, tx_cb.codewords.col(best.tx_index), rx_cb.codewords.col(best.rx_index), cfg);
  return best;
}

double overhead_factor(long overhead_blocks, const RateConfig& cfg) {
  const double blocks_per_coherence = cfg.coherence_time / cfg.symbol_period;
  return std::max(0.0, 1.0 - static_cast<double>(overhead_blocks) / blocks_per_coherence);
}

double effective_rate(double se, long overhead_blocks, const RateConfig& cfg) {
  if (se < 0.0) throw ConfigError("effective_rate: spectral efficiency must be >= 0");
  return overhead_factor(overhead_blocks, cfg) * cfg.bandwidth * se;
}

BeamContext BeamContext::make(int n_rsu, int n_vehicle, double spacing, const RateConfig& rate,
                              const StrategySettings& settings) {
  rate.validate();
  settings.validate(n_rsu);
  return BeamContext{dft_grid(n_rsu, spacing), build_codebook(n_rsu, settings.phase_bits, spacing),
                     build_codebook(n_vehicle, settings.phase_bits, spacing), rate, settings};
}

Aps predicted_aps_from_aps_net(const Network& net, const Aps& radar_aps, double floor_db) {
  return from_log_scale(aps_net_apply(net, to_log_scale(radar_aps, floor_db)));
}

Aps predicted_aps_from_col_net(const Network& net, const ToeplitzColumn& radar_column, const DftGrid& grid) {
  return aps(toeplitz_from_column(col_net_apply(net, radar_column)), grid);
}

RateRow run_strategy(const LinkSample& sample, Strategy strategy, const Predictors& nets, const BeamContext& ctx) {
  RateRow row;
  row.id = sample.id;
  row.strategy = strategy;
  const std::vector<Index> rx_all = all_indices(ctx.rx_codebook);
  std::vector<Index> tx_candidates;

  if (strategy == Strategy::exhaustive) {
    tx_candidates = all_indices(ctx.tx_codebook);
  } else {
    Aps steer;
    int window = ctx.settings.radar_window;
    switch (strategy) {
      case Strategy::radar_only:
        steer = sample.radar_aps;
        break;
      case Strategy::aps_pred:
        if (!nets.aps) throw MissingModel("aps_pred requires an APS network");
        steer = predicted_aps_from_aps_net(*nets.aps, sample.radar_aps, ctx.settings.floor_db);
        window = ctx.settings.aps_window;
        break;
      case Strategy::cov_pred:
        if (!nets.col) throw MissingModel("cov_pred requires a column network");
        steer = predicted_aps_from_col_net(*nets.col, sample.radar_column, ctx.grid);
        window = ctx.settings.cov_window;
        break;
      default:
        break;
    }
    tx_candidates = candidate_window(ctx.tx_codebook, reference_angle(steer, ctx.grid), window);
    row.similarity = similarity(steer, sample.comm_aps, ctx.settings.similarity_window);
  }

  const SearchResult res = beam_search(sample.channel, ctx.tx_codebook, tx_candidates, ctx.rx_codebook, rx_all, ctx.rate);
  row.tx_index = res.tx_index;
  row.rx_index = res.rx_index;
  row.overhead_blocks = res.overhead_blocks;
  row.se = res.spectral_efficiency;
  row.rate = effective_rate(res.spectral_efficiency, res.overhead_blocks, ctx.rate);
  return row;
}

RateReport summarize(Strategy strategy, std::vector<RateRow> rows) {
  RateReport rep;
  rep.strategy = strategy;
  if (!rows.empty()) {
    double sim_sum = 0.0;
    std::size_t sim_count = 0;
    for (const RateRow& r : rows) {
      rep.mean_rate += r.rate;
      rep.mean_se += r.se;
      if (r.similarity) {
        sim_sum += *r.similarity;
        ++sim_count;
      }
    }
    rep.mean_rate /= static_cast<double>(rows.size());
    rep.mean_se /= static_cast<double>(rows.size());
    rep.mean_similarity = sim_count ? sim_sum / static_cast<double>(sim_count) : 0.0;
  }
  rep.rows = std::move(rows);
  return rep;
}

}  // namespace r2c
