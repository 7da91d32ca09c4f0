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

#include "r2c/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <thread>

namespace r2c {
namespace {

// Shortest round-trip representation, independent of locale and stream state.
std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish_csv(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

Aps linear_aps(const ToeplitzColumn& c, const DftGrid& grid) { return aps(toeplitz_from_column(c), grid); }

DftGrid grid_for(const ExperimentConfig& cfg) {
  return dft_grid(cfg.scenario.rsu.num_antennas, cfg.scenario.rsu.spacing);
}

// Runs fn(i) for i in [0, count) over `threads` workers; rethrows the first
// failure in index order.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::clamp<long long>(threads, 1, std::max<long long>(1, count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void check_network_fits(const Network& net, const ExperimentConfig& cfg) {
  const int n = cfg.scenario.rsu.num_antennas;
  const int expected = net.model() == ModelKind::aps ? n : 2 * n;
  if (net.input_shape().size() != expected) {
    throw DimensionMismatch(to_string(net.model()) + " network expects input size " +
                            std::to_string(net.input_shape().size()) + ", dataset has N_RSU = " + std::to_string(n));
  }
}

}  // namespace

double aps_normalizer(const std::vector<DatasetRecord>& records) {
  double s = 0.0;
  for (const DatasetRecord& r : records) {
    s = std::max({s, r.radar_aps_log.values.cwiseAbs().maxCoeff(), r.comm_aps_log.values.cwiseAbs().maxCoeff()});
  }
  return s > 0.0 ? s : 1.0;
}

double col_normalizer(const std::vector<DatasetRecord>& records) {
  double s = 0.0;
  for (const DatasetRecord& r : records) {
    for (const ToeplitzColumn* c : {&r.radar_cov_column, &r.comm_cov_column}) {
      s = std::max({s, c->col.real().cwiseAbs().maxCoeff(), c->col.imag().cwiseAbs().maxCoeff()});
    }
  }
  return s > 0.0 ? s : 1.0;
}

TrainingSet aps_training_set(const std::vector<DatasetRecord>& records, double normalizer) {
  if (records.empty()) throw ConfigError("training set is empty");
  const Index n = records.front().radar_aps_log.size();
  TrainingSet set{Matrix(n, static_cast<Index>(records.size())), Matrix(n, static_cast<Index>(records.size()))};
  for (std::size_t i = 0; i < records.size(); ++i) {
    set.inputs.col(static_cast<Index>(i)) = records[i].radar_aps_log.values / normalizer;
    set.targets.col(static_cast<Index>(i)) = records[i].comm_aps_log.values / normalizer;
  }
  return set;
}

TrainingSet col_training_set(const std::vector<DatasetRecord>& records, double normalizer, const DftGrid& grid) {
  if (records.empty()) throw ConfigError("training set is empty");
  const Index n = records.front().radar_cov_column.size();
  TrainingSet set{Matrix(2 * n, static_cast<Index>(records.size())), Matrix(grid.size(), static_cast<Index>(records.size()))};
  for (std::size_t i = 0; i < records.size(); ++i) {
    set.inputs.col(static_cast<Index>(i)) = encode_column(records[i].radar_cov_column, normalizer);
    set.targets.col(static_cast<Index>(i)) = linear_aps(records[i].comm_cov_column, grid).values;
  }
  return set;
}

ModelTraining train_model(ModelKind model, const std::vector<DatasetRecord>& train_records,
                          const std::vector<DatasetRecord>& val_records, const ExperimentConfig& exp,
                          const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_records.empty() || val_records.empty()) throw ConfigError("training and validation sets must be non-empty");
  const int n = exp.scenario.rsu.num_antennas;
  std::mt19937_64 rng(cfg.seed);
  ModelTraining out;
  if (model == ModelKind::aps) {
    out.normalizer = aps_normalizer(train_records);
    Network net = make_aps_net(n);
    net.initialize(rng);
    net.params().normalizer = out.normalizer;
    out.result = train(std::move(net), MseObjective{}, aps_training_set(train_records, out.normalizer),
                       aps_training_set(val_records, out.normalizer), cfg, on_epoch);
  } else {
    out.normalizer = col_normalizer(train_records);
    const DftGrid grid = grid_for(exp);
    Network net = make_col_net(n);
    net.initialize(rng);
    net.params().normalizer = out.normalizer;
    out.result = train(std::move(net), ColApsObjective(grid, out.normalizer),
                       col_training_set(train_records, out.normalizer, grid),
                       col_training_set(val_records, out.normalizer, grid), cfg, on_epoch);
  }
  return out;
}

SimilarityPredictors predictors_from_networks(const Network* aps_net, const Network* col_net,
                                              const ExperimentConfig& cfg) {
  SimilarityPredictors p;
  if (aps_net) {
    check_network_fits(*aps_net, cfg);
    p.aps_pred = [aps_net](const DatasetRecord& r) { return from_log_scale(aps_net_apply(*aps_net, r.radar_aps_log)); };
  }
  if (col_net) {
    check_network_fits(*col_net, cfg);
    p.cov_pred = [col_net, grid = grid_for(cfg)](const DatasetRecord& r) {
      return predicted_aps_from_col_net(*col_net, r.radar_cov_column, grid);
    };
  }
  return p;
}

double nearest_rank_percentile(std::vector<double> values, double p) {
  if (values.empty()) throw ConfigError("percentile of an empty set");
  if (!(p > 0.0 && p <= 100.0)) throw ConfigError("percentile must be in (0, 100]");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(p / 100.0 * n)));
  return values[rank - 1];
}

SimilarityStats similarity_stats(const std::vector<double>& values) {
  SimilarityStats s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.p10 = nearest_rank_percentile(values, 10.0);
  s.p50 = nearest_rank_percentile(values, 50.0);
  s.p90 = nearest_rank_percentile(values, 90.0);
  return s;
}

SimilarityReport evaluate_similarity(const std::vector<DatasetRecord>& records, const ExperimentConfig& cfg,
                                     const SimilarityPredictors& predictors) {
  if (records.empty()) throw ConfigError("evaluation set is empty");
  const DftGrid grid = grid_for(cfg);
  const int l = cfg.strategies.similarity_window;

  std::vector<std::pair<std::string, ApsPredictor>> methods;
  methods.emplace_back("radar", [&grid](const DatasetRecord& r) { return linear_aps(r.radar_cov_column, grid); });
  if (predictors.aps_pred) methods.emplace_back("aps_pred", predictors.aps_pred);
  if (predictors.cov_pred) methods.emplace_back("cov_pred", predictors.cov_pred);

  SimilarityReport rep;
  rep.values.assign(methods.size(), std::vector<double>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    rep.ids.push_back(records[i].id);
    const Aps truth = linear_aps(records[i].comm_cov_column, grid);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      rep.values[m][i] = similarity(methods[m].second(records[i]), truth, l);
    }
  }
  for (std::size_t m = 0; m < methods.size(); ++m) {
    rep.methods.push_back(methods[m].first);
    rep.stats.push_back(similarity_stats(rep.values[m]));
  }
  return rep;
}

void write_similarity_csv(const std::string& path, const SimilarityReport& report) {
  std::ofstream out = open_csv(path);
  out << "id";
  for (const std::string& m : report.methods) out << ',' << m;
  out << '\n';
  for (std::size_t i = 0; i < report.ids.size(); ++i) {
    out << report.ids[i];
    for (const auto& column : report.values) out << ',' << fmt(column[i]);
    out << '\n';
  }
  const std::pair<const char*, double SimilarityStats::*> rows[] = {
      {"mean", &SimilarityStats::mean}, {"p10", &SimilarityStats::p10},
      {"p50", &SimilarityStats::p50},   {"p90", &SimilarityStats::p90}};
  for (const auto& [name, field] : rows) {
    out << name;
    for (const SimilarityStats& s : report.stats) out << ',' << fmt(s.*field);
    out << '\n';
  }
  finish_csv(out, path);
}

RateExperiment run_rate_experiment(const std::vector<DatasetRecord>& records, const ExperimentConfig& cfg,
                                   const std::vector<Strategy>& strategies, const Predictors& nets, int threads) {
  if (records.empty()) throw ConfigError("rate experiment needs at least one record");
  for (Strategy s : strategies) {
    if (s == Strategy::aps_pred && !nets.aps) throw MissingModel("strategy aps_pred needs APS network parameters");
    if (s == Strategy::cov_pred && !nets.col) throw MissingModel("strategy cov_pred needs column network parameters");
  }
  if (nets.aps) check_network_fits(*nets.aps, cfg);
  if (nets.col) check_network_fits(*nets.col, cfg);
  const BeamContext ctx = BeamContext::make(cfg.scenario.rsu.num_antennas, cfg.scenario.vehicle.num_antennas,
                                            cfg.scenario.rsu.spacing, cfg.rate, cfg.strategies);

  std::vector<std::vector<RateRow>> rows(strategies.size(), std::vector<RateRow>(records.size()));
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const LinkSample sample = to_link_sample(records[i], cfg, ctx.grid);
    for (std::size_t s = 0; s < strategies.size(); ++s) rows[s][i] = run_strategy(sample, strategies[s], nets, ctx);
  });

  RateExperiment exp;
  exp.coherence_scales = kCoherenceScales;
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    std::vector<double> sweep;
    for (double scale : exp.coherence_scales) {
      RateConfig scaled = cfg.rate;
      scaled.coherence_time *= scale;
      double sum = 0.0;
      for (const RateRow& r : rows[s]) sum += effective_rate(r.se, r.overhead_blocks, scaled);
      sweep.push_back(sum / static_cast<double>(rows[s].size()));
    }
    exp.sweep.push_back(std::move(sweep));
    exp.reports.push_back(summarize(strategies[s], std::move(rows[s])));
  }
  return exp;
}

void write_rate_csv(const std::string& path, const RateExperiment& exp) {
  std::ofstream out = open_csv(path);
  out << "id,strategy,tx_index,rx_index,overhead_blocks,se_bpshz,rate_bps,similarity_L5\n";
  const std::size_t count = exp.reports.empty() ? 0 : exp.reports.front().rows.size();
  for (std::size_t i = 0; i < count; ++i) {
    for (const RateReport& rep : exp.reports) {
      const RateRow& r = rep.rows[i];
      out << r.id << ',' << to_string(r.strategy) << ',' << r.tx_index << ',' << r.rx_index << ','
          << r.overhead_blocks << ',' << fmt(r.se) << ',' << fmt(r.rate) << ','
          << (r.similarity ? fmt(*r.similarity) : "nan") << '\n';
    }
  }
  for (const RateReport& rep : exp.reports) {
    const bool has_similarity = rep.strategy != Strategy::exhaustive;
    out << "mean," << to_string(rep.strategy) << ",,," << (rep.rows.empty() ? 0 : rep.rows.front().overhead_blocks)
        << ',' << fmt(rep.mean_se) << ',' << fmt(rep.mean_rate) << ','
        << (has_similarity ? fmt(rep.mean_similarity) : "nan") << '\n';
  }
  finish_csv(out, path);
}

void write_rate_sweep_csv(const std::string& path, const RateExperiment& exp, const RateConfig& rate) {
  std::ofstream out = open_csv(path);
  out << "strategy,coherence_scale,coherence_time_s,mean_rate_bps\n";
  for (std::size_t s = 0; s < exp.reports.size(); ++s) {
    for (std::size_t c = 0; c < exp.coherence_scales.size(); ++c) {
      out << to_string(exp.reports[s].strategy) << ',' << fmt(exp.coherence_scales[c]) << ','
          << fmt(rate.coherence_time * exp.coherence_scales[c]) << ',' << fmt(exp.sweep[s][c]) << '\n';
    }
  }
  finish_csv(out, path);
}

GenerateSummary cmd_generate(const GenerateOptions& opts) {
  const ExperimentConfig cfg = opts.config_path.empty() ? ExperimentConfig{} : load_experiment_config(opts.config_path);
  cfg.validate();
  const std::int64_t count = opts.count.value_or(cfg.split.train + cfg.split.val + cfg.split.test);
  if (count < 1) throw ConfigError("--count must be >= 1");
  Dataset ds;
  ds.header.config = cfg;
  ds.header.seed = opts.seed.value_or(cfg.master_seed);
  ds.header.count = count;
  ds.records = generate_records(cfg, ds.header.seed, count, opts.threads);
  write_dataset(opts.out_path, ds);

  const DftGrid grid = grid_for(cfg);
  GenerateSummary summary;
  summary.count = count;
  for (const DatasetRecord& r : ds.records) {
    summary.mean_radar_similarity += similarity(linear_aps(r.radar_cov_column, grid),
                                                linear_aps(r.comm_cov_column, grid), cfg.strategies.similarity_window);
  }
  summary.mean_radar_similarity /= static_cast<double>(count);
  return summary;
}

TrainSummary cmd_train(const TrainOptions& opts) {
  Dataset ds = read_dataset(opts.data_path);
  const ExperimentConfig exp = opts.config_path.empty() ? ds.header.config : load_experiment_config(opts.config_path);
  if (exp.scenario.rsu.num_antennas != ds.header.config.scenario.rsu.num_antennas) {
    throw DimensionMismatch("config array size does not match the dataset");
  }
  TrainConfig cfg = opts.model == ModelKind::aps ? exp.train_aps : exp.train_col;
  if (opts.max_epochs) cfg.max_epochs = *opts.max_epochs;
  if (opts.patience) cfg.patience = *opts.patience;
  if (opts.batch_size) cfg.batch_size = *opts.batch_size;
  if (opts.learning_rate) cfg.learning_rate = *opts.learning_rate;
  if (opts.seed) cfg.seed = *opts.seed;
  cfg.validate();

  std::vector<DatasetRecord> train_records = std::move(ds.records);
  std::vector<DatasetRecord> val_records;
  if (!opts.val_path.empty()) {
    Dataset val = read_dataset(opts.val_path);
    if (val.header.config.scenario.rsu.num_antennas != exp.scenario.rsu.num_antennas) {
      throw DimensionMismatch("validation set array size does not match the training set");
    }
    val_records = std::move(val.records);
  } else {
    if (!(opts.val_fraction > 0.0 && opts.val_fraction < 1.0)) throw ConfigError("val fraction must be in (0, 1)");
    const auto n = static_cast<std::int64_t>(train_records.size());
    if (n < 2) throw ConfigError("need at least two records to hold out a validation set");
    const auto n_val = std::clamp<std::int64_t>(std::llround(opts.val_fraction * static_cast<double>(n)), 1, n - 1);
    val_records.assign(std::make_move_iterator(train_records.end() - n_val),
                       std::make_move_iterator(train_records.end()));
    train_records.resize(static_cast<std::size_t>(n - n_val));
  }

  EpochCallback cb;
  if (opts.verbose) {
    cb = [](const EpochRecord& e) {
      std::cerr << "epoch " << e.epoch << " train " << fmt(e.train_loss) << " val " << fmt(e.val_loss) << '\n';
    };
  }
  const ModelTraining trained = train_model(opts.model, train_records, val_records, exp, cfg, cb);
  save_network(opts.out_params_path, trained.result.best);

  TrainSummary summary;
  summary.params_path = opts.out_params_path;
  summary.history_path = opts.history_path.empty() ? default_history_path(opts.out_params_path) : opts.history_path;
  std::ofstream hist = open_csv(summary.history_path);
  hist << "epoch,train_loss,val_loss\n";
  for (const EpochRecord& e : trained.result.history) {
    hist << e.epoch << ',' << fmt(e.train_loss) << ',' << fmt(e.val_loss) << '\n';
  }
  finish_csv(hist, summary.history_path);
  summary.epochs = static_cast<int>(trained.result.history.size());
  summary.best_epoch = trained.result.best_epoch;
  summary.best_val_loss = trained.result.best_val_loss;
  return summary;
}

LoadedNetworks load_networks(const std::vector<std::string>& paths) {
  LoadedNetworks nets;
  for (const std::string& path : paths) {
    Network net = load_network(path);
    std::optional<Network>& slot = net.model() == ModelKind::aps ? nets.aps : nets.col;
    if (slot) throw ConfigError("more than one " + to_string(net.model()) + " parameter file given");
    slot = std::move(net);
  }
  return nets;
}

SimilarityReport cmd_eval(const EvalOptions& opts) {
  const LoadedNetworks nets = load_networks(opts.params_paths);
  const Dataset ds = read_dataset(opts.data_path);
  const SimilarityPredictors predictors = predictors_from_networks(
      nets.aps ? &*nets.aps : nullptr, nets.col ? &*nets.col : nullptr, ds.header.config);
  SimilarityReport report = evaluate_similarity(ds.records, ds.header.config, predictors);
  write_similarity_csv(opts.out_csv, report);
  return report;
}

RateExperiment cmd_rate(const RateOptions& opts) {
  const LoadedNetworks nets = load_networks(opts.params_paths);
  const Dataset ds = read_dataset(opts.data_path);
  ExperimentConfig cfg = ds.header.config;
  if (opts.window) {
    cfg.strategies.radar_window = *opts.window;
    cfg.strategies.aps_window = *opts.window;
  }
  cfg.validate();

  std::vector<Strategy> strategies = opts.strategies;
  if (strategies.empty()) {
    strategies = {Strategy::exhaustive, Strategy::radar_only};
    if (nets.aps) strategies.push_back(Strategy::aps_pred);
    if (nets.col) strategies.push_back(Strategy::cov_pred);
  }
  if (std::find(strategies.begin(), strategies.end(), Strategy::exhaustive) == strategies.end()) {
    strategies.insert(strategies.begin(), Strategy::exhaustive);
  }
  const Predictors predictors{nets.aps ? &*nets.aps : nullptr, nets.col ? &*nets.col : nullptr};
  RateExperiment exp = run_rate_experiment(ds.records, cfg, strategies, predictors, opts.threads);
  write_rate_csv(opts.out_csv, exp);
  write_rate_sweep_csv(opts.sweep_csv.empty() ? default_sweep_path(opts.out_csv) : opts.sweep_csv, exp, cfg.rate);
  return exp;
}

std::string default_history_path(const std::string& params_path) { return params_path + ".history.csv"; }

std::string default_sweep_path(const std::string& csv_path) {
  const std::filesystem::path p(csv_path);
  return (p.parent_path() / (p.stem().string() + "_sweep.csv")).string();
}

}  // namespace r2c
