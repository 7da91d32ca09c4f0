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

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "r2c/experiment.hpp"

namespace r2c {
namespace {

using nlohmann::json;

// Reads fields of one JSON object, remembering which keys were consumed so
// that misspelled keys can be reported instead of silently ignored.
class FieldReader {
 public:
  FieldReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected a JSON object");
  }

  void read(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }
  void read(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      const auto wide = v->get<long long>();
      if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max()) fail(key, "out of range");
      out = static_cast<int>(wide);
    }
  }
  void read(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key, "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void read(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }
  template <typename Fn>
  void object(const char* key, Fn&& fn) {
    if (const json* v = find(key)) {
      FieldReader child(*v, path_ + "." + key);
      fn(child);
      child.finish();
    }
  }
  bool has(const char* key) const { return j_.contains(key); }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(path_ + "." + item.key() + ": unknown field");
    }
  }

 private:
  const json* find(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }
  [[noreturn]] void fail(const char* key, const std::string& why) const {
    throw ConfigError(path_ + "." + key + ": " + why);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_ula(FieldReader& r, UlaConfig& u) {
  r.read("num_antennas", u.num_antennas);
  r.read("spacing", u.spacing);
}

json ula_json(const UlaConfig& u) { return {{"num_antennas", u.num_antennas}, {"spacing", u.spacing}}; }

void read_train(FieldReader& r, TrainConfig& t) {
  r.read("batch_size", t.batch_size);
  r.read("learning_rate", t.learning_rate);
  r.read("adam_beta1", t.adam_beta1);
  r.read("adam_beta2", t.adam_beta2);
  r.read("adam_eps", t.adam_eps);
  r.read("max_epochs", t.max_epochs);
  r.read("patience", t.patience);
  r.read("seed", t.seed);
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  train_aps.validate();
  train_col.validate();
  rate.validate();
  strategies.validate(scenario.rsu.num_antennas);
  if (split.train < 1 || split.val < 1 || split.test < 1) throw ConfigError("split sizes must be >= 1");
  if (!(projection.tol > 0.0) || projection.max_iter < 1) throw ConfigError("projection: need tol > 0, max_iter >= 1");
  if (rate.num_subcarriers != scenario.num_subcarriers) {
    throw ConfigError("rate.num_subcarriers must equal scenario.num_subcarriers");
  }
  if (scenario.rsu.num_antennas % 4 != 0) throw ConfigError("scenario.rsu.num_antennas must be divisible by 4");
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError("complex numbers must be [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const TrainConfig& t) {
  return {{"batch_size", t.batch_size}, {"learning_rate", t.learning_rate}, {"adam_beta1", t.adam_beta1},
          {"adam_beta2", t.adam_beta2}, {"adam_eps", t.adam_eps},           {"max_epochs", t.max_epochs},
          {"patience", t.patience},     {"seed", t.seed}};
}

TrainConfig train_config_from_json(const json& j, const std::string& where) {
  TrainConfig t;
  FieldReader r(j, where);
  read_train(r, t);
  r.finish();
  return t;
}

json to_json(const ExperimentConfig& c) {
  const GeneratorConfig& g = c.scenario;
  json scenario = {
      {"priors",
       {{"min_clusters", g.priors.min_clusters},
        {"max_clusters", g.priors.max_clusters},
        {"min_rays", g.priors.min_rays},
        {"max_rays", g.priors.max_rays},
        {"ray_angle_spread", g.priors.ray_angle_spread},
        {"ray_delay_spread", g.priors.ray_delay_spread},
        {"max_cluster_delay", g.priors.max_cluster_delay},
        {"cluster_decay_db", g.priors.cluster_decay_db},
        {"path_gain_db", g.priors.path_gain_db},
        {"radar_gain_db", g.priors.radar_gain_db}}},
      {"mismatch",
       {{"angle_bias_std", g.mismatch.angle_bias_std},
        {"angle_jitter_std", g.mismatch.angle_jitter_std},
        {"gain_perturb_std", g.mismatch.gain_perturb_std},
        {"cluster_drop_prob", g.mismatch.cluster_drop_prob},
        {"global_angle_offset_std", g.mismatch.global_angle_offset_std}}},
      {"rsu", ula_json(g.rsu)},
      {"vehicle", ula_json(g.vehicle)},
      {"radar_array", ula_json(g.radar_array)},
      {"pulse", {{"rolloff", g.pulse.rolloff}, {"interval", g.pulse.interval}, {"num_taps", g.pulse.num_taps}}},
      {"radar",
       {{"tx_power", g.radar.tx_power},
        {"num_samples", g.radar.num_samples},
        {"sample_time", g.radar.sample_time},
        {"carrier", g.radar.carrier},
        {"noise_power", g.radar.noise_power}}},
      {"num_subcarriers", g.num_subcarriers},
  };
  return {
      {"scenario", scenario},
      {"projection", {{"enabled", c.projection.enabled}, {"tol", c.projection.tol}, {"max_iter", c.projection.max_iter}}},
      {"train_aps", to_json(c.train_aps)},
      {"train_col", to_json(c.train_col)},
      {"rate",
       {{"bandwidth", c.rate.bandwidth},
        {"tx_power", c.rate.tx_power},
        {"noise_power", c.rate.noise_power},
        {"symbol_period", c.rate.symbol_period},
        {"coherence_time", c.rate.coherence_time},
        {"num_subcarriers", c.rate.num_subcarriers}}},
      {"strategies",
       {{"radar_window", c.strategies.radar_window},
        {"aps_window", c.strategies.aps_window},
        {"cov_window", c.strategies.cov_window},
        {"similarity_window", c.strategies.similarity_window},
        {"phase_bits", c.strategies.phase_bits},
        {"floor_db", c.strategies.floor_db}}},
      {"split", {{"train", c.split.train}, {"val", c.split.val}, {"test", c.split.test}}},
      {"master_seed", c.master_seed},
  };
}

ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig c;
  FieldReader root(j, "config");
  GeneratorConfig& g = c.scenario;
  root.object("scenario", [&](FieldReader& s) {
    s.object("priors", [&](FieldReader& r) {
      r.read("min_clusters", g.priors.min_clusters);
      r.read("max_clusters", g.priors.max_clusters);
      r.read("min_rays", g.priors.min_rays);
      r.read("max_rays", g.priors.max_rays);
      r.read("ray_angle_spread", g.priors.ray_angle_spread);
      r.read("ray_delay_spread", g.priors.ray_delay_spread);
      r.read("max_cluster_delay", g.priors.max_cluster_delay);
      r.read("cluster_decay_db", g.priors.cluster_decay_db);
      r.read("path_gain_db", g.priors.path_gain_db);
      r.read("radar_gain_db", g.priors.radar_gain_db);
    });
    s.object("mismatch", [&](FieldReader& r) {
      r.read("angle_bias_std", g.mismatch.angle_bias_std);
      r.read("angle_jitter_std", g.mismatch.angle_jitter_std);
      r.read("gain_perturb_std", g.mismatch.gain_perturb_std);
      r.read("cluster_drop_prob", g.mismatch.cluster_drop_prob);
      r.read("global_angle_offset_std", g.mismatch.global_angle_offset_std);
    });
    s.object("rsu", [&](FieldReader& r) { read_ula(r, g.rsu); });
    s.object("vehicle", [&](FieldReader& r) { read_ula(r, g.vehicle); });
    s.object("radar_array", [&](FieldReader& r) { read_ula(r, g.radar_array); });
    s.object("pulse", [&](FieldReader& r) {
      r.read("rolloff", g.pulse.rolloff);
      r.read("interval", g.pulse.interval);
      r.read("num_taps", g.pulse.num_taps);
    });
    s.object("radar", [&](FieldReader& r) {
      r.read("tx_power", g.radar.tx_power);
      r.read("num_samples", g.radar.num_samples);
      r.read("sample_time", g.radar.sample_time);
      r.read("carrier", g.radar.carrier);
      r.read("noise_power", g.radar.noise_power);
    });
    s.read("num_subcarriers", g.num_subcarriers);
  });
  root.object("projection", [&](FieldReader& r) {
    r.read("enabled", c.projection.enabled);
    r.read("tol", c.projection.tol);
    r.read("max_iter", c.projection.max_iter);
  });
  root.object("train_aps", [&](FieldReader& r) { read_train(r, c.train_aps); });
  root.object("train_col", [&](FieldReader& r) { read_train(r, c.train_col); });

  // Rate defaults follow the array sizes; explicit fields override them.
  c.rate = RateConfig::for_arrays(g.rsu.num_antennas, g.vehicle.num_antennas, g.num_subcarriers);
  root.object("rate", [&](FieldReader& r) {
    r.read("bandwidth", c.rate.bandwidth);
    r.read("tx_power", c.rate.tx_power);
    r.read("noise_power", c.rate.noise_power);
    r.read("symbol_period", c.rate.symbol_period);
    r.read("coherence_time", c.rate.coherence_time);
    r.read("num_subcarriers", c.rate.num_subcarriers);
  });
  root.object("strategies", [&](FieldReader& r) {
    r.read("radar_window", c.strategies.radar_window);
    r.read("aps_window", c.strategies.aps_window);
    r.read("cov_window", c.strategies.cov_window);
    r.read("similarity_window", c.strategies.similarity_window);
    r.read("phase_bits", c.strategies.phase_bits);
    r.read("floor_db", c.strategies.floor_db);
  });
  root.object("split", [&](FieldReader& r) {
    r.read("train", c.split.train);
    r.read("val", c.split.val);
    r.read("test", c.split.test);
  });
  root.read("master_seed", c.master_seed);
  root.finish();
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return experiment_from_json(j);
}

}  // namespace r2c
