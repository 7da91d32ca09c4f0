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

#ifndef R2C_SCENARIO_HPP
#define R2C_SCENARIO_HPP

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "r2c/covariance.hpp"
#include "r2c/types.hpp"

namespace r2c {

using Rng = std::mt19937_64;

struct UlaConfig {
  int num_antennas = 64;
  double spacing = 0.5;  // in wavelengths

  void validate() const;
  bool operator==(const UlaConfig&) const = default;
};

struct PathRay {
  Complex gain{0.0, 0.0};
  double rel_delay = 0.0;  // seconds
  double rel_aoa_shift = 0.0;
  double rel_aod_shift = 0.0;

  bool operator==(const PathRay&) const = default;
};

/// One scattering cluster. `mean_aoa` is the angle seen by the roadside
/// array, `mean_aod` the angle seen by the vehicle array.
struct PathCluster {
  double mean_delay = 0.0;
  double mean_aoa = 0.0;
  double mean_aod = 0.0;
  std::vector<PathRay> rays;

  bool operator==(const PathCluster&) const = default;
};

struct PulseConfig {
  double rolloff = 0.4;
  double interval = 1e-9;  // signaling interval T_c, seconds
  int num_taps = 16;

  void validate() const;
  bool operator==(const PulseConfig&) const = default;
};

/// Delay-domain MIMO channel: taps[d] is N_V x N_RSU.
struct ChannelTaps {
  std::vector<CMatrix> taps;
};

/// Frequency-domain MIMO channel: response[k] is N_V x N_RSU.
struct ChannelFreq {
  std::vector<CMatrix> response;
};

struct RadarSimConfig {
  double tx_power = 1.0;  // watts (30 dBm)
  int num_samples = 256;
  double sample_time = 1e-9;
  double carrier = 76e9;
  double noise_power = 1e-12;  // watts per antenna

  void validate() const;
  bool operator==(const RadarSimConfig&) const = default;
};

/// Parametric radar/communication mismatch.
///
/// - angle_bias_std: constant offset between the radar view and the
///   communication view of every cluster. It models the displaced radar
///   aperture and is the learnable part of the mismatch.
/// - angle_jitter_std: i.i.d. Gaussian offset per radar ray.
/// - gain_perturb_std: log-normal amplitude perturbation per radar ray.
/// - cluster_drop_prob: probability that the radar misses a cluster.
/// - global_angle_offset_std: i.i.d. Gaussian offset shared by a whole sample.
struct MismatchConfig {
  double angle_bias_std = 0.0;
  double angle_jitter_std = 0.0;
  double gain_perturb_std = 0.0;
  double cluster_drop_prob = 0.0;
  double global_angle_offset_std = 0.0;

  void validate() const;
  bool operator==(const MismatchConfig&) const = default;
};

/// Priors of the synthetic geometry that replaces ray tracing.
struct GeometryPriors {
  int min_clusters = 1;
  int max_clusters = 4;
  int min_rays = 1;
  int max_rays = 5;
  double ray_angle_spread = 2.0 * kPi / 180.0;  // radians, Gaussian std
  double ray_delay_spread = 1e-9;               // seconds, exponential mean
  double max_cluster_delay = 6e-9;              // seconds
  double cluster_decay_db = 6.0;                // power drop per cluster index
  double path_gain_db = -125.0;                 // large-scale gain of the first cluster
  double radar_gain_db = -100.0;                // radar two-way gain of the first cluster

  void validate() const;
  bool operator==(const GeometryPriors&) const = default;
};

struct GeneratorConfig {
  GeometryPriors priors;
  MismatchConfig mismatch;
  UlaConfig rsu{64, 0.5};
  UlaConfig vehicle{16, 0.5};
  UlaConfig radar_array{64, 0.5};
  PulseConfig pulse;
  RadarSimConfig radar;
  int num_subcarriers = 64;

  void validate() const;
  bool operator==(const GeneratorConfig&) const = default;
};

struct ScenarioSample {
  std::int64_t id = 0;
  std::vector<PathCluster> clusters_comm;
  ChannelTaps comm_taps;
  CovarianceMatrix radar_cov;
  CovarianceMatrix comm_cov;
};

struct RadarSource {
  double angle = 0.0;
  Complex gain{1.0, 0.0};
};

/// Array response exp(j n 2 pi spacing sin(angle)), n = 0..N-1.
template <typename Scalar = double>
CVectorT<Scalar> steering_vector(const UlaConfig& cfg, Scalar angle) {
  const Scalar phase_step = Scalar(2) * Scalar(kPi) * Scalar(cfg.spacing) * std::sin(angle);
  CVectorT<Scalar> a(cfg.num_antennas);
  for (Index n = 0; n < a.size(); ++n) a[n] = std::polar(Scalar(1), phase_step * Scalar(n));
  return a;
}

/// Raised-cosine impulse response, normalized to 1 at t = 0.
double raised_cosine(double t, double rolloff, double interval);

ChannelTaps channel_taps(std::span<const PathCluster> clusters, const UlaConfig& tx,
                         const UlaConfig& rx, const PulseConfig& pulse);

ChannelFreq channel_freq_response(const ChannelTaps& taps, int num_subcarriers);

/// Snapshot matrix (N x I) of the passive radar array for a constant
/// baseband waveform: each sample rotates every source by an independent
/// uniform phase.
CMatrix simulate_radar_snapshots(std::span<const RadarSource> sources, const UlaConfig& rx,
                                 const RadarSimConfig& cfg, Rng& rng);

/// Systematic radar-view angle offset for a cluster at `angle`; currently
/// the same for every angle.
double systematic_angle_bias(const MismatchConfig& mismatch, double angle);

std::vector<PathCluster> draw_clusters(const GeometryPriors& priors, Rng& rng);

std::vector<RadarSource> radar_sources(std::span<const PathCluster> clusters,
                                       const GeneratorConfig& gen, Rng& rng);

ScenarioSample generate_paired_scenario(const GeneratorConfig& gen, Rng& rng, std::int64_t id = 0);

/// Pure function of (gen, master_seed, id).
ScenarioSample generate_paired_scenario(const GeneratorConfig& gen, std::uint64_t master_seed,
                                        std::int64_t id);

}  // namespace r2c

#endif  // R2C_SCENARIO_HPP
