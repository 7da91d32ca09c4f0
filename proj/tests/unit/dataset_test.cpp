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


#include <gtest/gtest.h>

#include <cstdlib>
#include <random>
#include <sstream>

#include "r2c/dataset.hpp"
#include "r2c/pipeline.hpp"
#include "test_support.hpp"

namespace r2c {
namespace {

using testing::read_file;
using testing::small_experiment;
using testing::TempDir;

TEST(ExperimentConfig, JsonRoundTrip) {
  ExperimentConfig cfg = small_experiment();
  cfg.scenario.mismatch.angle_bias_std = 0.05;
  cfg.master_seed = 1234567890123ULL;
  cfg.projection.enabled = false;
  EXPECT_EQ(experiment_from_json(to_json(cfg)), cfg);
}

TEST(ExperimentConfig, MissingFieldsKeepDefaults) {
  const ExperimentConfig cfg = experiment_from_json(nlohmann::json::parse(R"({"master_seed": 9})"));
  ExperimentConfig expected;
  expected.master_seed = 9;
  EXPECT_EQ(cfg, expected);
}

TEST(ExperimentConfig, UnknownFieldNamesPath) {
  try {
    experiment_from_json(nlohmann::json::parse(R"({"scenario": {"mismatch": {"angle_bias": 1}}})"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("scenario.mismatch.angle_bias"), std::string::npos) << e.what();
  }
}

TEST(ExperimentConfig, TypeErrorsAndValidation) {
  EXPECT_THROW(experiment_from_json(nlohmann::json::parse(R"({"train_aps": {"batch_size": 1.5}})")), ConfigError);
  EXPECT_THROW(experiment_from_json(nlohmann::json::parse(R"({"projection": {"enabled": 1}})")), ConfigError);
  EXPECT_THROW(experiment_from_json(nlohmann::json::parse(R"({"rate": {"num_subcarriers": 32}})")),
               ConfigError);
  EXPECT_THROW(experiment_from_json(nlohmann::json::parse(R"({"master_seed": -1})")), ConfigError);
}

TEST(ExperimentConfig, LoadReportsParseErrorsAndMissingFiles) {
  TempDir dir;
  const std::string bad = dir.file("bad.json");
  std::ofstream(bad) << "{\"master_seed\": ";
  EXPECT_THROW(load_experiment_config(bad), ConfigError);
  EXPECT_THROW(load_experiment_config(dir.file("absent.json")), IoError);
}

TEST(ComplexJson, RoundTrip) {
  EXPECT_EQ(complex_from_json(complex_to_json({1.5, -2.0})), Complex(1.5, -2.0));
  EXPECT_THROW(complex_from_json(nlohmann::json::parse("[1]")), ConfigError);
}

TEST(Records, NormalizedToeplitzColumns) {
  const ExperimentConfig cfg = small_experiment();
  const std::vector<DatasetRecord> recs = generate_records(cfg, 5, 4, 1);
  ASSERT_EQ(recs.size(), 4u);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].id, static_cast<std::int64_t>(i));
    EXPECT_NEAR(recs[i].radar_cov_column.col[0].real(), 1.0, 1e-12);
    EXPECT_NEAR(recs[i].comm_cov_column.col[0].real(), 1.0, 1e-12);
    EXPECT_EQ(recs[i].radar_aps_log.scale, ApsScale::log_db);
    EXPECT_GE(recs[i].radar_aps_log.values.minCoeff(), kDefaultFloorDb);
    EXPECT_FALSE(recs[i].comm_paths.empty());
  }
}

TEST(Records, IndependentOfThreadCount) {
  const ExperimentConfig cfg = small_experiment();
  const std::vector<DatasetRecord> one = generate_records(cfg, 5, 6, 1);
  const std::vector<DatasetRecord> three = generate_records(cfg, 5, 6, 3);
  for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(to_json(one[i]).dump(), to_json(three[i]).dump());
}

TEST(Records, JsonRoundTripIsExact) {
  const ExperimentConfig cfg = small_experiment();
  const DatasetRecord rec = generate_records(cfg, 7, 1, 1).front();
  const DatasetRecord back = record_from_json(to_json(rec));
  EXPECT_EQ(back.radar_cov_column.col, rec.radar_cov_column.col);
  EXPECT_EQ(back.comm_aps_log.values, rec.comm_aps_log.values);
  EXPECT_EQ(back.comm_paths, rec.comm_paths);
}

TEST(Records, LinkSampleRebuildsChannel) {
  const ExperimentConfig cfg = small_experiment();
  const ScenarioSample s = generate_paired_scenario(cfg.scenario, 7, 0);
  const DatasetRecord rec = generate_records(cfg, 7, 1, 1).front();
  const ChannelTaps taps = record_taps(rec, cfg.scenario);
  ASSERT_EQ(taps.taps.size(), s.comm_taps.taps.size());
  for (std::size_t d = 0; d < taps.taps.size(); ++d) EXPECT_EQ(taps.taps[d], s.comm_taps.taps[d]);
  const LinkSample link = to_link_sample(rec, cfg, dft_grid(16));
  EXPECT_EQ(link.channel.response.size(), 8u);
  EXPECT_EQ(link.radar_aps.scale, ApsScale::linear);
}

TEST(DatasetFile, WriteReadRoundTrip) {
  TempDir dir;
  GenerateOptions opts;
  opts.out_path = dir.file("d.jsonl");
  opts.count = 5;
  opts.seed = 3;
  std::ofstream(dir.file("cfg.json")) << to_json(small_experiment()).dump();
  opts.config_path = dir.file("cfg.json");
  const GenerateSummary summary = cmd_generate(opts);
  EXPECT_EQ(summary.count, 5);
  EXPECT_GE(summary.mean_radar_similarity, 0.0);
  const Dataset ds = read_dataset(opts.out_path);
  EXPECT_EQ(ds.header.seed, 3u);
  EXPECT_EQ(ds.header.config, small_experiment());
  ASSERT_EQ(ds.records.size(), 5u);

  std::ostringstream again;
  write_dataset(again, ds);
  EXPECT_EQ(again.str(), read_file(opts.out_path));
}

TEST(DatasetFile, GenerationIsByteIdentical) {
  TempDir dir;
  std::ofstream(dir.file("cfg.json")) << to_json(small_experiment()).dump();
  GenerateOptions opts;
  opts.config_path = dir.file("cfg.json");
  opts.count = 4;
  opts.out_path = dir.file("a.jsonl");
  cmd_generate(opts);
  opts.out_path = dir.file("b.jsonl");
  opts.threads = 2;
  cmd_generate(opts);
  EXPECT_EQ(read_file(dir.file("a.jsonl")), read_file(dir.file("b.jsonl")));
}

TEST(DatasetFile, RejectsOtherVersions) {
  Dataset ds;
  ds.header.config = small_experiment();
  ds.header.format_version = kFormatVersion + 1;
  std::stringstream ss;
  write_dataset(ss, ds);
  EXPECT_THROW(read_dataset(ss), ConfigError);
}

TEST(DatasetFile, RejectsCountMismatch) {
  Dataset ds;
  ds.header.config = small_experiment();
  ds.header.count = 2;
  ds.records = generate_records(ds.header.config, 1, 1, 1);
  std::stringstream ss;
  write_dataset(ss, ds);
  EXPECT_THROW(read_dataset(ss), IoError);
}

TEST(DatasetFile, RejectsArraySizeMismatch) {
  Dataset ds;
  ds.header.config = small_experiment();
  ds.header.count = 1;
  ds.records = generate_records(ds.header.config, 1, 1, 1);
  ds.header.config = ExperimentConfig{};
  std::stringstream ss;
  write_dataset(ss, ds);
  EXPECT_THROW(read_dataset(ss), DimensionMismatch);
}

TEST(DatasetFile, ReportsBadLines) {
  std::stringstream ss;
  Dataset ds;
  ds.header.config = small_experiment();
  write_dataset(ss, ds);
  ss << "{not json\n";
  EXPECT_THROW(read_dataset(ss), ConfigError);
  std::stringstream empty;
  EXPECT_THROW(read_dataset(empty), IoError);
  EXPECT_THROW(read_dataset("/nonexistent/r2c.jsonl"), IoError);
}

TEST(NetworkFile, SaveLoadReproducesLoss) {
  TempDir dir;
  std::mt19937_64 rng(4);
  for (Network net : {make_aps_net(16), make_col_net(16)}) {
    net.initialize(rng);
    net.params().normalizer = 3.25;
    const std::string path = dir.file(to_string(net.model()) + ".json");
    save_network(path, net);
    const Network back = load_network(path);
    EXPECT_EQ(back.model(), net.model());
    EXPECT_EQ(back.specs(), net.specs());
    EXPECT_EQ(back.params().normalizer, 3.25);
    Matrix x = Matrix::Random(net.input_shape().size(), 5);
    Matrix t = Matrix::Random(net.output_shape().size(), 5);
    EXPECT_NEAR(mse_loss(back.forward(x), t).loss, mse_loss(net.forward(x), t).loss, 1e-12);
    for (std::size_t l = 0; l < net.params().layers.size(); ++l) {
      EXPECT_EQ(back.params().layers[l].weight, net.params().layers[l].weight);
      EXPECT_EQ(back.params().layers[l].bias, net.params().layers[l].bias);
    }
  }
}

TEST(NetworkFile, RejectsMalformedParameters) {
  TempDir dir;
  Network net = make_col_net(4);
  std::mt19937_64 rng(1);
  net.initialize(rng);
  nlohmann::json j = to_json(net);
  j["tensors"]["0.weight"]["shape"] = {3, 3};
  EXPECT_THROW(network_from_json(j), Error);
  j = to_json(net);
  j.erase("normalizer");
  EXPECT_THROW(network_from_json(j), ConfigError);
  EXPECT_THROW(load_network(dir.file("missing.json")), IoError);
}

TEST(ThreadCount, ReadsEnvironment) {
  ::setenv("R2C_THREADS", "3", 1);
  EXPECT_EQ(thread_count_from_env(), 3);
  ::unsetenv("R2C_THREADS");
  EXPECT_EQ(thread_count_from_env(), 1);
}

}  // namespace
}  // namespace r2c
