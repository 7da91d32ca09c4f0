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

#ifndef R2C_PIPELINE_HPP
#define R2C_PIPELINE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "r2c/dataset.hpp"

namespace r2c {

// Training-set assembly

/// Largest |dB| over radar and communication log spectra.
double aps_normalizer(const std::vector<DatasetRecord>& records);
/// Largest |Re| or |Im| over radar and communication columns.
double col_normalizer(const std::vector<DatasetRecord>& records);

TrainingSet aps_training_set(const std::vector<DatasetRecord>& records, double normalizer);
/// Targets are the linear communication APS of each record.
TrainingSet col_training_set(const std::vector<DatasetRecord>& records, double normalizer, const DftGrid& grid);

struct ModelTraining {
  TrainResult result;
  double normalizer = 1.0;
};

/// Builds, initializes (seeded by cfg.seed) and trains one network.
ModelTraining train_model(ModelKind model, const std::vector<DatasetRecord>& train_records,
                          const std::vector<DatasetRecord>& val_records, const ExperimentConfig& exp,
                          const TrainConfig& cfg, const EpochCallback& on_epoch = {});

// Similarity evaluation

using ApsPredictor = std::function<Aps(const DatasetRecord&)>;

struct SimilarityPredictors {
  ApsPredictor aps_pred;  // linear output
  ApsPredictor cov_pred;  // linear output
};

SimilarityPredictors predictors_from_networks(const Network* aps_net, const Network* col_net,
                                              const ExperimentConfig& cfg);

struct SimilarityStats {
  double mean = 0.0;
  double p10 = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
};

struct SimilarityReport {
  std::vector<std::string> methods;          // "radar", then available predictors
  std::vector<std::int64_t> ids;
  std::vector<std::vector<double>> values;   // values[method][record]
  std::vector<SimilarityStats> stats;        // per method
};

/// Nearest-rank percentile: sorted[ceil(p / 100 n) - 1].
double nearest_rank_percentile(std::vector<double> values, double p);
SimilarityStats similarity_stats(const std::vector<double>& values);

SimilarityReport evaluate_similarity(const std::vector<DatasetRecord>& records, const ExperimentConfig& cfg,
                                     const SimilarityPredictors& predictors);

void write_similarity_csv(const std::string& path, const SimilarityReport& report);

// Rate experiment

struct RateExperiment {
  std::vector<RateReport> reports;  // one per strategy, in request order
  /// Mean effective rate per strategy over coherence-time multipliers.
  std::vector<double> coherence_scales;
  std::vector<std::vector<double>> sweep;  // sweep[strategy][scale]
};

inline const std::vector<double> kCoherenceScales{0.25, 0.5, 1.0, 2.0, 4.0};

RateExperiment run_rate_experiment(const std::vector<DatasetRecord>& records, const ExperimentConfig& cfg,
                                   const std::vector<Strategy>& strategies, const Predictors& nets,
                                   int threads = 1);

void write_rate_csv(const std::string& path, const RateExperiment& exp);
void write_rate_sweep_csv(const std::string& path, const RateExperiment& exp, const RateConfig& rate);

// Commands

struct GenerateOptions {
  std::string config_path;  // empty: defaults
  std::string out_path;
  std::optional<std::int64_t> count;  // default: sum of the split sizes
  std::optional<std::uint64_t> seed;  // default: master_seed
  int threads = 1;
};

struct GenerateSummary {
  std::int64_t count = 0;
  double mean_radar_similarity = 0.0;
};

GenerateSummary cmd_generate(const GenerateOptions& opts);

struct TrainOptions {
  ModelKind model = ModelKind::aps;
  std::string data_path;
  std::string val_path;        // empty: hold out val_fraction of data_path
  double val_fraction = 0.2;
  std::string out_params_path;
  std::string history_path;    // empty: <out>.history.csv
  std::string config_path;     // empty: the dataset header's config
  std::optional<int> max_epochs;
  std::optional<int> patience;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

struct TrainSummary {
  int epochs = 0;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  std::string params_path;
  std::string history_path;
};

TrainSummary cmd_train(const TrainOptions& opts);

struct EvalOptions {
  std::vector<std::string> params_paths;
  std::string data_path;
  std::string out_csv;
};

SimilarityReport cmd_eval(const EvalOptions& opts);

struct RateOptions {
  std::vector<std::string> params_paths;
  std::string data_path;
  std::string out_csv;
  std::string sweep_csv;  // empty: <out stem>_sweep.csv
  std::vector<Strategy> strategies;  // empty: every strategy with its model available
  std::optional<int> window;         // overrides the radar/APS window
  int threads = 1;
};

RateExperiment cmd_rate(const RateOptions& opts);

/// Reads aps/col networks from parameter files (the model kind comes from
/// each file).
struct LoadedNetworks {
  std::optional<Network> aps;
  std::optional<Network> col;
};
LoadedNetworks load_networks(const std::vector<std::string>& paths);

std::string default_history_path(const std::string& params_path);
std::string default_sweep_path(const std::string& csv_path);

}  // namespace r2c

#endif  // R2C_PIPELINE_HPP
