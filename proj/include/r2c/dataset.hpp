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

#ifndef R2C_DATASET_HPP
#define R2C_DATASET_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "r2c/experiment.hpp"

namespace r2c {

/// One dataset line. Covariances are Toeplitz columns normalized to unit
/// per-antenna power; the communication taps are stored compactly as the
/// path clusters that synthesize them.
struct DatasetRecord {
  std::int64_t id = 0;
  ToeplitzColumn radar_cov_column;
  ToeplitzColumn comm_cov_column;
  Aps radar_aps_log;
  Aps comm_aps_log;
  std::vector<PathCluster> comm_paths;
};

struct DatasetHeader {
  int format_version = kFormatVersion;
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::int64_t count = 0;
};

struct Dataset {
  DatasetHeader header;
  std::vector<DatasetRecord> records;
};

/// Projects (when enabled) and normalizes both covariances, extracts the
/// columns and the log-scale spectra.
DatasetRecord make_record(const ScenarioSample& sample, const ExperimentConfig& cfg, const DftGrid& grid);

/// Generates `count` records with seeds mix_seed(seed, id), in parallel
/// over `threads` workers; the result does not depend on `threads`.
std::vector<DatasetRecord> generate_records(const ExperimentConfig& cfg, std::uint64_t seed,
                                            std::int64_t count, int threads);

nlohmann::json to_json(const DatasetRecord& rec);
DatasetRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DatasetHeader& h);
DatasetHeader header_from_json(const nlohmann::json& j);

void write_dataset(std::ostream& out, const Dataset& ds);
void write_dataset(const std::string& path, const Dataset& ds);
Dataset read_dataset(std::istream& in, const std::string& name = "<stream>");
Dataset read_dataset(const std::string& path);

/// Rebuilds the D communication taps and their K-point frequency response.
ChannelTaps record_taps(const DatasetRecord& rec, const GeneratorConfig& gen);
LinkSample to_link_sample(const DatasetRecord& rec, const ExperimentConfig& cfg, const DftGrid& grid);

nlohmann::json to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);
void save_network(const std::string& path, const Network& net);
Network load_network(const std::string& path);

/// Number of worker threads from R2C_THREADS (default 1).
int thread_count_from_env();

}  // namespace r2c

#endif  // R2C_DATASET_HPP
