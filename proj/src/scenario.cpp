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

#include "r2c/scenario.hpp"

#include <cmath>
#include <string>

namespace r2c {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

}  // namespace

void UlaConfig::validate() const {
  require(num_antennas >= 1, "ula.num_antennas must be >= 1");
  require(spacing > 0.0, "ula.spacing must be > 0");
}

void PulseConfig::validate() const {
  require(rolloff >= 0.0 && rolloff <= 1.0, "pulse.rolloff must lie in [0, 1]");
  require(interval > 0.0, "pulse.interval must be > 0");
  require(num_taps >= 1, "pulse.num_taps must be >= 1");
}

void RadarSimConfig::validate() const {
  require(tx_power > 0.0, "radar.tx_power must be > 0");
  require(num_samples >= 1, "radar.num_samples must be >= 1");
  require(sample_time > 0.0, "radar.sample_time must be > 0");
  require(carrier > 0.0, "radar.carrier must be > 0");
  require(noise_power >= 0.0, "radar.noise_power must be >= 0");
}

void MismatchConfig::validate() const {
  require(angle_bias_std >= 0.0, "mismatch.angle_bias_std must be >= 0");
  require(angle_jitter_std >= 0.0, "mismatch.angle_jitter_std must be >= 0");
  require(gain_perturb_std >= 0.0, "mismatch.gain_perturb_std must be >= 0");
  require(global_angle_offset_std >= 0.0, "mismatch.global_angle_offset_std must be >= 0");
  require(cluster_drop_prob >= 0.0 && cluster_drop_prob < 1.0,
          "mismatch.cluster_drop_prob must lie in [0, 1): a probability of 1 drops every cluster");
}

void GeometryPriors::validate() const {
  require(min_clusters >= 1 && min_clusters <= max_clusters, "priors: need 1 <= min_clusters <= max_clusters");
  require(min_rays >= 1 && min_rays <= max_rays, "priors: need 1 <= min_rays <= max_rays");
  require(ray_angle_spread >= 0.0, "priors.ray_angle_spread must be >= 0");
  require(ray_delay_spread >= 0.0, "priors.ray_delay_spread must be >= 0");
  require(max_cluster_delay >= 0.0, "priors.max_cluster_delay must be >= 0");
  require(cluster_decay_db >= 0.0, "priors.cluster_decay_db must be >= 0");
  require(std::isfinite(path_gain_db) && std::isfinite(radar_gain_db), "priors: gains must be finite");
}

void GeneratorConfig::validate() const {
  priors.validate();
  mismatch.validate();
  rsu.validate();
  vehicle.validate();
  radar_array.validate();
  pulse.validate();
  radar.validate();
  require(num_subcarriers >= 1, "num_subcarriers must be >= 1");
  require(radar_array.num_antennas == rsu.num_antennas,
          "radar_array.num_antennas must equal rsu.num_antennas");
}

double raised_cosine(double t, double rolloff, double interval) {
  const double x = t / interval;
  if (rolloff > 0.0) {
    const double edge = 1.0 / (2.0 * rolloff);
    if (std::abs(std::abs(x) - edge) < 1e-9) return (kPi / 4.0) * sinc(edge);
  }
  const double denom = 1.0 - (2.0 * rolloff * x) * (2.0 * rolloff * x);
  return sinc(x) * std::cos(kPi * rolloff * x) / denom;
}

ChannelTaps channel_taps(std::span<const PathCluster> clusters, const UlaConfig& tx, const UlaConfig& rx,
                         const PulseConfig& pulse) {
  if (clusters.empty()) throw ConfigError("channel_taps: at least one cluster is required");
  tx.validate();
  rx.validate();
  pulse.validate();

  ChannelTaps out;
  out.taps.assign(pulse.num_taps, CMatrix::Zero(rx.num_antennas, tx.num_antennas));
  for (const PathCluster& cluster : clusters) {
    for (const PathRay& ray : cluster.rays) {
      const CVector a_rx = steering_vector(rx, cluster.mean_aod + ray.rel_aod_shift);
      const CVector a_tx = steering_vector(tx, cluster.mean_aoa + ray.rel_aoa_shift);
      if (a_rx.size() != rx.num_antennas || a_tx.size() != tx.num_antennas) {
        throw DimensionMismatch("channel_taps: steering vector length disagrees with array size");
      }
      const CMatrix outer = a_rx * a_tx.adjoint();
      const double delay = cluster.mean_delay + ray.rel_delay;
      for (int d = 0; d < pulse.num_taps; ++d) {
        const double p = raised_cosine(d * pulse.interval - delay, pulse.rolloff, pulse.interval);
        out.taps[d] += (ray.gain * p) * outer;
      }
    }
  }
  return out;
}

ChannelFreq channel_freq_response(const ChannelTaps& taps, int num_subcarriers) {
  if (num_subcarriers < 1) throw ConfigError("channel_freq_response: K must be >= 1");
  if (taps.taps.empty()) throw DimensionMismatch("channel_freq_response: no taps");
  const Index rows = taps.taps.front().rows();
  const Index cols = taps.taps.front().cols();
  ChannelFreq out;
  out.response.assign(num_subcarriers, CMatrix::Zero(rows, cols));
  const int num_taps = static_cast<int>(taps.taps.size());
  for (int k = 0; k < num_subcarriers; ++k) {
    for (int d = 0; d < num_taps; ++d) {
      // Reduce k d mod K before scaling to keep the phase argument small.
      const long kd = (static_cast<long>(k) * d) % num_subcarriers;
      const Complex w = std::polar(1.0, -2.0 * kPi * static_cast<double>(kd) / num_subcarriers);
      out.response[k] += w * taps.taps[d];
    }
  }
  return out;
}

CMatrix simulate_radar_snapshots(std::span<const RadarSource> sources, const UlaConfig& rx,
                                 const RadarSimConfig& cfg, Rng& rng) {
  rx.validate();
  cfg.validate();
  std::vector<CVector> responses;
  responses.reserve(sources.size());
  for (const RadarSource& s : sources) responses.push_back(steering_vector(rx, s.angle));

  const double amplitude = std::sqrt(cfg.tx_power);
  const double noise_std = std::sqrt(cfg.noise_power / 2.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::normal_distribution<double> normal(0.0, 1.0);

  CMatrix y = CMatrix::Zero(rx.num_antennas, cfg.num_samples);
  for (int i = 0; i < cfg.num_samples; ++i) {
    for (std::size_t s = 0; s < sources.size(); ++s) {
      y.col(i) += (amplitude * sources[s].gain * std::polar(1.0, phase(rng))) * responses[s];
    }
    if (cfg.noise_power > 0.0) {
      for (Index n = 0; n < y.rows(); ++n) y(n, i) += Complex(noise_std * normal(rng), noise_std * normal(rng));
    }
  }
  return y;
}

double systematic_angle_bias(const MismatchConfig& mismatch, double /*angle*/) {
  return mismatch.angle_bias_std;
}

std::vector<PathCluster> draw_clusters(const GeometryPriors& priors, Rng& rng) {
  std::uniform_int_distribution<int> num_clusters(priors.min_clusters, priors.max_clusters);
  std::uniform_int_distribution<int> num_rays(priors.min_rays, priors.max_rays);
  std::uniform_real_distribution<double> unit_sine(-1.0, 1.0);
  std::uniform_real_distribution<double> cluster_delay(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> exponential(1.0);

  const int c_count = num_clusters(rng);
  std::vector<PathCluster> clusters(c_count);
  for (int c = 0; c < c_count; ++c) {
    PathCluster& cl = clusters[c];
    cl.mean_aoa = std::asin(unit_sine(rng));
    cl.mean_aod = std::asin(unit_sine(rng));
    cl.mean_delay = priors.max_cluster_delay * cluster_delay(rng);
    const int r_count = num_rays(rng);
    const double power_db = priors.path_gain_db - priors.cluster_decay_db * c;
    const double ray_std = std::sqrt(std::pow(10.0, power_db / 10.0) / r_count / 2.0);
    cl.rays.resize(r_count);
    for (PathRay& ray : cl.rays) {
      const double re = normal(rng);
      const double im = normal(rng);
      ray.gain = Complex(ray_std * re, ray_std * im);
      ray.rel_delay = priors.ray_delay_spread * exponential(rng);
      ray.rel_aoa_shift = priors.ray_angle_spread * normal(rng);
      ray.rel_aod_shift = priors.ray_angle_spread * normal(rng);
    }
  }
  return clusters;
}

std::vector<RadarSource> radar_sources(std::span<const PathCluster> clusters, const GeneratorConfig& gen,
                                       Rng& rng) {
  const MismatchConfig& mm = gen.mismatch;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double scale = std::pow(10.0, (gen.priors.radar_gain_db - gen.priors.path_gain_db) / 20.0);

  // Every random number is drawn regardless of the mismatch magnitudes, so
  // one seed yields the same geometry under any mismatch setting.
  const double global_offset = mm.global_angle_offset_std * normal(rng);
  std::vector<RadarSource> sources;
  for (const PathCluster& cluster : clusters) {
    const bool dropped = uniform(rng) < mm.cluster_drop_prob;
    const double bias = systematic_angle_bias(mm, cluster.mean_aoa);
    for (const PathRay& ray : cluster.rays) {
      const double jitter = mm.angle_jitter_std * normal(rng);
      const double gain_scale = std::exp(mm.gain_perturb_std * normal(rng));
      if (dropped) continue;
      sources.push_back({cluster.mean_aoa + ray.rel_aoa_shift + global_offset + bias + jitter,
                         ray.gain * (scale * gain_scale)});
    }
  }
  return sources;
}

ScenarioSample generate_paired_scenario(const GeneratorConfig& gen, Rng& rng, std::int64_t id) {
  gen.validate();
  ScenarioSample sample;
  sample.id = id;
  sample.clusters_comm = draw_clusters(gen.priors, rng);
  sample.comm_taps = channel_taps(sample.clusters_comm, gen.rsu, gen.vehicle, gen.pulse);
  sample.comm_cov =
      comm_covariance(channel_freq_response(sample.comm_taps, gen.num_subcarriers), gen.vehicle.num_antennas);

  const std::vector<RadarSource> sources = radar_sources(sample.clusters_comm, gen, rng);
  sample.radar_cov = sample_covariance(simulate_radar_snapshots(sources, gen.radar_array, gen.radar, rng));
  return sample;
}

ScenarioSample generate_paired_scenario(const GeneratorConfig& gen, std::uint64_t master_seed, std::int64_t id) {
  Rng rng(mix_seed(master_seed, static_cast<std::uint64_t>(id)));
  return generate_paired_scenario(gen, rng, id);
}

}  // namespace r2c
