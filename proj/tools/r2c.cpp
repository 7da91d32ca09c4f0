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

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "r2c/pipeline.hpp"

namespace {

using namespace r2c;

template <typename T>
std::optional<T> optional_if(const CLI::Option* opt, const T& value) {
  return opt->count() ? std::optional<T>(value) : std::nullopt;
}

void print_similarity(const SimilarityReport& rep) {
  for (std::size_t m = 0; m < rep.methods.size(); ++m) {
    const SimilarityStats& s = rep.stats[m];
    std::cout << rep.methods[m] << ": mean " << s.mean << " p10 " << s.p10 << " p50 " << s.p50 << " p90 " << s.p90
              << '\n';
  }
}

void print_rates(const RateExperiment& exp) {
  for (const RateReport& rep : exp.reports) {
    std::cout << to_string(rep.strategy) << ": mean rate " << rep.mean_rate / 1e9 << " Gbps, mean SE " << rep.mean_se
              << " b/s/Hz\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"r2c: radar-to-communication covariance translation experiments"};
  app.require_subcommand(1);

  GenerateOptions gen;
  std::int64_t gen_count = 0;
  std::uint64_t gen_seed = 0;
  auto* generate = app.add_subcommand("generate", "Generate a paired radar/communication dataset");
  generate->add_option("--config", gen.config_path, "Experiment config JSON (defaults when omitted)");
  generate->add_option("--out", gen.out_path, "Output dataset (JSON lines)")->required();
  auto* gen_count_opt = generate->add_option("--count", gen_count, "Number of records");
  auto* gen_seed_opt = generate->add_option("--seed", gen_seed, "Master seed");

  TrainOptions tr;
  std::string model_name;
  int max_epochs = 0;
  int patience = 0;
  int batch_size = 0;
  double learning_rate = 0.0;
  std::uint64_t train_seed = 0;
  auto* train = app.add_subcommand("train", "Train the APS or column network");
  train->add_option("--model", model_name, "Network to train")->required()->check(CLI::IsMember({"aps", "col"}));
  train->add_option("--data", tr.data_path, "Training dataset")->required();
  train->add_option("--val", tr.val_path, "Validation dataset (default: hold out part of --data)");
  train->add_option("--val-fraction", tr.val_fraction, "Held-out fraction when --val is absent");
  train->add_option("--out", tr.out_params_path, "Output parameter file")->required();
  train->add_option("--history", tr.history_path, "History CSV (default: <out>.history.csv)");
  train->add_option("--config", tr.config_path, "Config overriding the dataset header");
  auto* epochs_opt = train->add_option("--max-epochs", max_epochs);
  auto* patience_opt = train->add_option("--patience", patience);
  auto* batch_opt = train->add_option("--batch-size", batch_size);
  auto* lr_opt = train->add_option("--lr", learning_rate);
  auto* train_seed_opt = train->add_option("--seed", train_seed, "Initialization and shuffling seed");
  train->add_flag("--verbose", tr.verbose, "Print per-epoch losses");

  EvalOptions ev;
  auto* eval = app.add_subcommand("eval", "Similarity report on a dataset");
  eval->add_option("--params", ev.params_paths, "Network parameter files (repeatable)");
  eval->add_option("--data", ev.data_path, "Dataset")->required();
  eval->add_option("--out", ev.out_csv, "Output CSV")->required();

  RateOptions rt;
  std::vector<std::string> strategy_names;
  int window = 0;
  auto* rate = app.add_subcommand("rate", "Beam-training rate report on a dataset");
  rate->add_option("--params", rt.params_paths, "Network parameter files (repeatable)");
  rate->add_option("--data", rt.data_path, "Dataset")->required();
  rate->add_option("--out", rt.out_csv, "Output CSV")->required();
  rate->add_option("--sweep-out", rt.sweep_csv, "Coherence-time sweep CSV (default: <out stem>_sweep.csv)");
  rate->add_option("--strategies", strategy_names, "exhaustive, radar_only, aps_pred, cov_pred")->delimiter(',');
  auto* window_opt = rate->add_option("--window", window, "Candidate window for radar_only and aps_pred");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::config);
  }

  try {
    const int threads = thread_count_from_env();
    if (generate->parsed()) {
      gen.count = optional_if(gen_count_opt, gen_count);
      gen.seed = optional_if(gen_seed_opt, gen_seed);
      gen.threads = threads;
      const GenerateSummary s = cmd_generate(gen);
      std::cout << "wrote " << s.count << " records to " << gen.out_path << " (mean radar similarity "
                << s.mean_radar_similarity << ")\n";
    } else if (train->parsed()) {
      tr.model = model_kind_from_string(model_name);
      tr.max_epochs = optional_if(epochs_opt, max_epochs);
      tr.patience = optional_if(patience_opt, patience);
      tr.batch_size = optional_if(batch_opt, batch_size);
      tr.learning_rate = optional_if(lr_opt, learning_rate);
      tr.seed = optional_if(train_seed_opt, train_seed);
      const TrainSummary s = cmd_train(tr);
      std::cout << "trained " << model_name << " for " << s.epochs << " epochs, best epoch " << s.best_epoch
                << " val loss " << s.best_val_loss << "\nparams: " << s.params_path << "\nhistory: " << s.history_path
                << '\n';
    } else if (eval->parsed()) {
      print_similarity(cmd_eval(ev));
    } else if (rate->parsed()) {
      for (const std::string& name : strategy_names) rt.strategies.push_back(strategy_from_string(name));
      rt.window = optional_if(window_opt, window);
      rt.threads = threads;
      print_rates(cmd_rate(rt));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numeric);
  }
  return 0;
}
