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

#include "r2c/dataset.hpp"

#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

namespace r2c {
namespace {

using nlohmann::json;

json column_json(const ToeplitzColumn& c) {
  json out = json::array();
  for (Index i = 0; i < c.size(); ++i) out.push_back(complex_to_json(c.col[i]));
  return out;
}

ToeplitzColumn column_from_json(const json& j, const char* field) {
  if (!j.is_array()) throw ConfigError(std::string("record.") + field + ": expected an array");
  ToeplitzColumn c{CVector(static_cast<Index>(j.size()))};
  for (std::size_t i = 0; i < j.size(); ++i) c.col[static_cast<Index>(i)] = complex_from_json(j[i]);
  return c;
}

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field + ": expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(field + ": expected numbers");
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

json cluster_json(const PathCluster& c) {
  json rays = json::array();
  for (const PathRay& r : c.rays) {
    rays.push_back({{"gain", complex_to_json(r.gain)},
                    {"rel_delay", r.rel_delay},
                    {"rel_aoa_shift", r.rel_aoa_shift},
                    {"rel_aod_shift", r.rel_aod_shift}});
  }
  return {{"mean_delay", c.mean_delay}, {"mean_aoa", c.mean_aoa}, {"mean_aod", c.mean_aod}, {"rays", rays}};
}

PathCluster cluster_from_json(const json& j) {
  PathCluster c;
  c.mean_delay = j.at("mean_delay").get<double>();
  c.mean_aoa = j.at("mean_aoa").get<double>();
  c.mean_aod = j.at("mean_aod").get<double>();
  for (const json& r : j.at("rays")) {
    c.rays.push_back(PathRay{complex_from_json(r.at("gain")), r.at("rel_delay").get<double>(),
                             r.at("rel_aoa_shift").get<double>(), r.at("rel_aod_shift").get<double>()});
  }
  return c;
}

Aps linear_aps(const ToeplitzColumn& c, const DftGrid& grid) { return aps(toeplitz_from_column(c), grid); }

json layer_json(const LayerSpec& s) {
  json j = {{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case LayerKind::conv1d:
      j["in_channels"] = s.in_channels;
      j["out_channels"] = s.out_channels;
      j["kernel_size"] = s.kernel_size;
      j["padding"] = s.padding;
      break;
    case LayerKind::max_pool1d:
    case LayerKind::up_sample1d:
      j["factor"] = s.factor;
      break;
    case LayerKind::fully_connected:
      j["in_dim"] = s.in_dim;
      j["out_dim"] = s.out_dim;
      break;
    case LayerKind::leaky_relu:
      j["negative_slope"] = s.negative_slope;
      break;
    case LayerKind::tanh:
      break;
  }
  return j;
}

LayerSpec layer_from_json(const json& j) {
  switch (layer_kind_from_string(j.at("kind").get<std::string>())) {
    case LayerKind::conv1d:
      return LayerSpec::conv1d(j.at("in_channels").get<int>(), j.at("out_channels").get<int>(),
                               j.at("kernel_size").get<int>(), j.at("padding").get<int>());
    case LayerKind::max_pool1d:
      return LayerSpec::max_pool1d(j.at("factor").get<int>());
    case LayerKind::up_sample1d:
      return LayerSpec::up_sample1d(j.at("factor").get<int>());
    case LayerKind::fully_connected:
      return LayerSpec::fully_connected(j.at("in_dim").get<int>(), j.at("out_dim").get<int>());
    case LayerKind::leaky_relu:
      return LayerSpec::leaky_relu(j.at("negative_slope").get<double>());
    case LayerKind::tanh:
      return LayerSpec::tanh();
  }
  throw ConfigError("unreachable layer kind");
}

json tensor_json(const Tensor& t) { return {{"shape", t.shape}, {"data", vector_json(t.data)}}; }

void load_tensor(const json& j, const std::string& name, const std::vector<Index>& expected_shape, Matrix& target) {
  const auto shape = j.at("shape").get<std::vector<Index>>();
  const Vector data = vector_from_json(j.at("data"), name);
  if (shape != expected_shape || data.size() != target.size()) {
    throw DimensionMismatch("tensor '" + name + "' does not match the layer shape");
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  target = Eigen::Map<const RowMajor>(data.data(), target.rows(), target.cols());
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

DatasetRecord make_record(const ScenarioSample& sample, const ExperimentConfig& cfg, const DftGrid& grid) {
  auto prepare = [&](const CovarianceMatrix& r) {
    CovarianceMatrix m = r;
    if (cfg.projection.enabled) {
      // A non-converged projection is still Toeplitz; its PSD gap is small.
      m = project_toeplitz_psd(r, ProjectionOptions{cfg.projection.tol, cfg.projection.max_iter}).matrix;
    } else {
      m = CovarianceMatrix(project_toeplitz_hermitian(r.matrix()));
    }
    return first_column(normalize_power(m));
  };
  DatasetRecord rec;
  rec.id = sample.id;
  rec.radar_cov_column = prepare(sample.radar_cov);
  rec.comm_cov_column = prepare(sample.comm_cov);
  rec.radar_aps_log = to_log_scale(linear_aps(rec.radar_cov_column, grid), cfg.strategies.floor_db);
  rec.comm_aps_log = to_log_scale(linear_aps(rec.comm_cov_column, grid), cfg.strategies.floor_db);
  rec.comm_paths = sample.clusters_comm;
  return rec;
}

std::vector<DatasetRecord> generate_records(const ExperimentConfig& cfg, std::uint64_t seed, std::int64_t count,
                                            int threads) {
  cfg.validate();
  if (count < 0) throw ConfigError("record count must be >= 0");
  std::vector<DatasetRecord> out(static_cast<std::size_t>(count));
  const int workers = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(threads, count)));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));

  auto work = [&](int w) {
    try {
      const DftGrid grid = dft_grid(cfg.scenario.rsu.num_antennas, cfg.scenario.rsu.spacing);
      for (std::int64_t id = w; id < count; id += workers) {
        out[static_cast<std::size_t>(id)] =
            make_record(generate_paired_scenario(cfg.scenario, seed, id), cfg, grid);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

json to_json(const DatasetRecord& rec) {
  json clusters = json::array();
  for (const PathCluster& c : rec.comm_paths) clusters.push_back(cluster_json(c));
  return {{"id", rec.id},
          {"radar_cov_column", column_json(rec.radar_cov_column)},
          {"comm_cov_column", column_json(rec.comm_cov_column)},
          {"radar_aps_log", vector_json(rec.radar_aps_log.values)},
          {"comm_aps_log", vector_json(rec.comm_aps_log.values)},
          {"comm_taps", {{"clusters", clusters}}}};
}

DatasetRecord record_from_json(const json& j) {
  try {
    DatasetRecord rec;
    rec.id = j.at("id").get<std::int64_t>();
    rec.radar_cov_column = column_from_json(j.at("radar_cov_column"), "radar_cov_column");
    rec.comm_cov_column = column_from_json(j.at("comm_cov_column"), "comm_cov_column");
    rec.radar_aps_log = Aps(vector_from_json(j.at("radar_aps_log"), "record.radar_aps_log"), ApsScale::log_db);
    rec.comm_aps_log = Aps(vector_from_json(j.at("comm_aps_log"), "record.comm_aps_log"), ApsScale::log_db);
    for (const json& c : j.at("comm_taps").at("clusters")) rec.comm_paths.push_back(cluster_from_json(c));
    const Index n = rec.radar_cov_column.size();
    if (rec.comm_cov_column.size() != n || rec.radar_aps_log.size() != n || rec.comm_aps_log.size() != n) {
      throw DimensionMismatch("record " + std::to_string(rec.id) + ": inconsistent lengths");
    }
    return rec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed dataset record: ") + e.what());
  }
}

json to_json(const DatasetHeader& h) {
  return {{"format_version", h.format_version}, {"config", to_json(h.config)}, {"seed", h.seed}, {"count", h.count}};
}

DatasetHeader header_from_json(const json& j) {
  if (!j.is_object() || !j.contains("format_version")) throw ConfigError("dataset header: missing format_version");
  DatasetHeader h;
  try {
    h.format_version = j.at("format_version").get<int>();
    if (h.format_version != kFormatVersion) {
      throw ConfigError("dataset format version " + std::to_string(h.format_version) + " is not supported (expected " +
                        std::to_string(kFormatVersion) + ")");
    }
    h.config = experiment_from_json(j.at("config"));
    h.seed = j.at("seed").get<std::uint64_t>();
    h.count = j.at("count").get<std::int64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("dataset header: ") + e.what());
  }
  return h;
}

void write_dataset(std::ostream& out, const Dataset& ds) {
  out << to_json(ds.header).dump() << '\n';
  for (const DatasetRecord& r : ds.records) out << to_json(r).dump() << '\n';
  if (!out) throw IoError("failed writing dataset");
}

void write_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out = open_output(path);
  write_dataset(out, ds);
}

Dataset read_dataset(std::istream& in, const std::string& name) {
  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) throw IoError(name + ": empty dataset");
  auto parse = [&](std::size_t line_no) {
    try {
      return json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  };
  ds.header = header_from_json(parse(1));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ds.records.push_back(record_from_json(parse(line_no)));
  }
  if (in.bad()) throw IoError(name + ": read error");
  if (static_cast<std::int64_t>(ds.records.size()) != ds.header.count) {
    throw IoError(name + ": header announces " + std::to_string(ds.header.count) + " records, found " +
                  std::to_string(ds.records.size()));
  }
  const Index n = ds.header.config.scenario.rsu.num_antennas;
  for (const DatasetRecord& r : ds.records) {
    if (r.radar_cov_column.size() != n) {
      throw DimensionMismatch(name + ": record " + std::to_string(r.id) + " does not match the header array size");
    }
  }
  return ds;
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_dataset(in, path);
}

ChannelTaps record_taps(const DatasetRecord& rec, const GeneratorConfig& gen) {
  return channel_taps(rec.comm_paths, gen.rsu, gen.vehicle, gen.pulse);
}

LinkSample to_link_sample(const DatasetRecord& rec, const ExperimentConfig& cfg, const DftGrid& grid) {
  LinkSample s;
  s.id = rec.id;
  s.channel = channel_freq_response(record_taps(rec, cfg.scenario), cfg.scenario.num_subcarriers);
  s.radar_column = rec.radar_cov_column;
  s.radar_aps = linear_aps(rec.radar_cov_column, grid);
  s.comm_aps = linear_aps(rec.comm_cov_column, grid);
  return s;
}

json to_json(const Network& net) {
  json layers = json::array();
  json tensors = json::object();
  for (std::size_t i = 0; i < net.specs().size(); ++i) {
    layers.push_back(layer_json(net.specs()[i]));
    if (!net.specs()[i].has_params()) continue;
    tensors[std::to_string(i) + ".weight"] = tensor_json(net.weight_tensor(i));
    tensors[std::to_string(i) + ".bias"] = tensor_json(net.bias_tensor(i));
  }
  const FeatureShape in = net.input_shape();
  return {{"model", to_string(net.model())},
          {"input", {{"channels", in.channels}, {"length", in.length}}},
          {"layers", layers},
          {"tensors", tensors},
          {"normalizer", net.params().normalizer}};
}

Network network_from_json(const json& j) {
  try {
    std::vector<LayerSpec> specs;
    for (const json& l : j.at("layers")) specs.push_back(layer_from_json(l));
    const FeatureShape in{j.at("input").at("channels").get<int>(), j.at("input").at("length").get<int>()};
    Network net(model_kind_from_string(j.at("model").get<std::string>()), std::move(specs), in);
    const json& tensors = j.at("tensors");
    for (std::size_t i = 0; i < net.specs().size(); ++i) {
      if (!net.specs()[i].has_params()) continue;
      LayerParams& p = net.params().layers[i];
      const std::string w = std::to_string(i) + ".weight";
      const std::string b = std::to_string(i) + ".bias";
      load_tensor(tensors.at(w), w, net.weight_tensor(i).shape, p.weight);
      Matrix bias = p.bias;
      load_tensor(tensors.at(b), b, net.bias_tensor(i).shape, bias);
      p.bias = bias.col(0);
    }
    net.params().normalizer = j.at("normalizer").get<double>();
    if (!(net.params().normalizer > 0.0)) throw ConfigError("network normalizer must be > 0");
    return net;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed network parameters: ") + e.what());
  }
}

void save_network(const std::string& path, const Network& net) {
  std::ofstream out = open_output(path);
  out << to_json(net).dump() << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

Network load_network(const std::string& path) {
  std::ifstream in = open_input(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return network_from_json(j);
}

int thread_count_from_env() {
  const char* v = std::getenv("R2C_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024) throw ConfigError("R2C_THREADS must be an integer in [1, 1024]");
  return static_cast<int>(n);
}

}  // namespace r2c
