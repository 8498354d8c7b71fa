//
// Copyright 2026 The RAP Thresholds Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line front end: schema encoding, single runs, grids, future-error
// experiments and drift curves.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rap/dataset.h"
#include "rap/generalization.h"
#include "rap/harness.h"
#include "rap/mechanism.h"

namespace {

// Flags that mirror ExperimentConfig. Only flags given on the command line
// override the config file.
struct ConfigFlags {
  std::string config_path;
  std::string data;
  std::string schema;
  std::string delimiter;
  std::string workload;
  std::vector<double> epsilons;
  std::string delta;
  std::vector<size_t> workload_sizes;
  int r = 0;
  size_t k = 0;
  std::vector<size_t> rounds;
  std::vector<std::string> per_round;
  size_t n_prime = 0;
  double learning_rate = 0.0;
  size_t max_iterations = 0;
  double stop_tolerance = 0.0;
  size_t patience = 0;
  std::string selection;
  std::vector<std::string> mechanisms;
  std::string mode;
  std::string distribution;
  double zipf_s = 0.0;
  double geometric_p = 0.0;
  std::vector<double> gammas;
  size_t historical_size = 0;
  size_t future_size = 0;
  size_t trials = 0;
  uint64_t seed = 0;
  size_t batch_cap = 0;

  std::vector<std::pair<CLI::Option*, std::function<void(rap::ExperimentConfig&)>>>
      setters;

  template <typename T, typename Apply>
  void Add(CLI::App* app, const std::string& name, T& target,
           const std::string& help, Apply apply) {
    CLI::Option* opt = app->add_option(name, target, help);
    setters.emplace_back(opt, [&target, apply](rap::ExperimentConfig& c) {
      apply(c, target);
    });
  }

  void Register(CLI::App* app) {
    app->add_option("--config", config_path, "JSON experiment config");
    Add(app, "--data", data, "Dataset CSV",
        [](auto& c, auto& v) { c.dataset_path = v; });
    Add(app, "--schema", schema, "Schema JSON sidecar",
        [](auto& c, auto& v) { c.schema_path = v; });
    Add(app, "--delimiter", delimiter, "Field delimiter",
        [](auto& c, auto& v) {
          if (v.size() != 1) throw CLI::ValidationError("--delimiter", "one character");
          c.delimiter = v[0];
        });
    Add(app, "--workload", workload, "Fixed workload JSON",
        [](auto& c, auto& v) { c.workload_path = v; });
    Add(app, "--epsilon", epsilons, "Privacy epsilon (list)",
        [](auto& c, auto& v) { c.epsilons = v; });
    Add(app, "--delta", delta, "Privacy delta or 'auto' for 1/n^2",
        [](auto& c, auto& v) {
          if (v == "auto") {
            c.delta.reset();
          } else {
            c.delta = std::stod(v);
          }
        });
    Add(app, "--workload-size", workload_sizes, "Thresholds per workload (list)",
        [](auto& c, auto& v) { c.workload_sizes = v; });
    Add(app, "-r", r, "Threshold level r", [](auto& c, auto& v) { c.r = v; });
    Add(app, "-k", k, "Threshold width k", [](auto& c, auto& v) { c.k = v; });
    Add(app, "--rounds,-T", rounds, "Adaptive rounds T (list)",
        [](auto& c, auto& v) { c.rounds = v; });
    Add(app, "--per-round,-K", per_round, "Queries per round K or ALL (list)",
        [](auto& c, auto& v) {
          c.per_round.clear();
          for (const auto& s : v) c.per_round.push_back(rap::ParsePerRound(s));
        });
    Add(app, "--n-prime", n_prime, "Synthetic rows",
        [](auto& c, auto& v) { c.n_prime = v; });
    Add(app, "--learning-rate", learning_rate, "Optimizer step size",
        [](auto& c, auto& v) { c.optimizer.learning_rate = v; });
    Add(app, "--max-iterations", max_iterations, "Optimizer iterations per round",
        [](auto& c, auto& v) { c.optimizer.max_iterations = v; });
    Add(app, "--stop-tolerance", stop_tolerance, "Minimum loss improvement",
        [](auto& c, auto& v) { c.optimizer.stop_tolerance = v; });
    Add(app, "--patience", patience, "Non-improving iterations before stopping",
        [](auto& c, auto& v) { c.optimizer.patience = v; });
    Add(app, "--selection", selection, "iterative or oneshot",
        [](auto& c, auto& v) { c.selection = rap::ParseSelectionMode(v); });
    Add(app, "--mechanism", mechanisms, "rap, gm, all0 (list)",
        [](auto& c, auto& v) { c.mechanisms = v; });
    Add(app, "--mode", mode, "prespecified or partial",
        [](auto& c, auto& v) { c.mode = rap::ParseWorkloadMode(v); });
    Add(app, "--distribution", distribution, "uniform, zipf or geometric",
        [](auto& c, auto& v) {
          c.distribution.kind = rap::ParseDistributionKind(v);
        });
    Add(app, "--zipf-s", zipf_s, "Zipf exponent",
        [](auto& c, auto& v) { c.distribution.zipf_s = v; });
    Add(app, "--geometric-p", geometric_p, "Geometric parameter",
        [](auto& c, auto& v) { c.distribution.geometric_p = v; });
    Add(app, "--gamma", gammas, "Drift amounts (list)",
        [](auto& c, auto& v) { c.gammas = v; });
    Add(app, "--historical-size", historical_size, "Historical thresholds",
        [](auto& c, auto& v) { c.historical_size = v; });
    Add(app, "--future-size", future_size, "Future thresholds",
        [](auto& c, auto& v) { c.future_size = v; });
    Add(app, "--trials", trials, "Independent repetitions",
        [](auto& c, auto& v) { c.trials = v; });
    Add(app, "--seed", seed, "Root seed",
        [](auto& c, auto& v) { c.root_seed = v; });
    Add(app, "--batch-cap", batch_cap, "Answers per streaming batch",
        [](auto& c, auto& v) { c.batch_cap = v; });
  }

  rap::ExperimentConfig Resolve(rap::ExperimentConfig base) const {
    rap::ExperimentConfig config =
        config_path.empty() ? std::move(base)
                            : rap::LoadExperimentConfig(config_path, std::move(base));
    for (const auto& [opt, apply] : setters) {
      if (opt->count() > 0) apply(config);
    }
    return config;
  }
};

struct OutputFlags {
  std::string results;
  std::string summary;
  std::string log;
  std::string synthetic;

  void Register(CLI::App* app, bool with_synthetic) {
    app->add_option("--results", results, "Results CSV (default stdout)");
    app->add_option("--summary", summary, "Best (T, K) summary CSV");
    app->add_option("--log", log, "Per-iteration training log CSV");
    if (with_synthetic) {
      app->add_option("--synthetic-out", synthetic,
                      "Synthetic dataset CSV (trial index appended when "
                      "trials > 1)");
    }
  }
};

class OutputFile {
 public:
  explicit OutputFile(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw std::runtime_error("cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string TrialPath(const std::string& path, size_t trial, size_t trials) {
  if (trials <= 1) return path;
  const auto dot = path.rfind('.');
  const std::string suffix = ".trial" + std::to_string(trial);
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix + path.substr(dot);
}

int RunExperiment(const rap::ExperimentConfig& config, const OutputFlags& out) {
  rap::ValidateExperimentConfig(config);
  const rap::Dataset dataset = rap::LoadExperimentDataset(config);
  OutputFile results(out.results);
  rap::ResultWriter writer(results.stream());

  std::optional<std::ofstream> log_file;
  std::optional<rap::TrainingWriter> log_writer;
  rap::TrainingSink training;
  if (!out.log.empty()) {
    log_file.emplace(out.log);
    if (!*log_file) throw std::runtime_error("cannot write " + out.log);
    log_writer.emplace(*log_file);
    training = [&](const rap::TrainingRecord& r) { log_writer->Write(r); };
  }
  rap::SyntheticSink synthetic;
  if (!out.synthetic.empty()) {
    synthetic = [&](size_t trial, const rap::RelaxedDataset& d) {
      rap::SaveRelaxed(TrialPath(out.synthetic, trial, config.trials), d,
                       dataset.schema());
    };
  }

  std::vector<rap::ResultRow> rows;
  bool failed = false;
  for (const rap::Cell& cell : rap::ExpandGrid(config)) {
    for (const rap::ResultRow& row :
         rap::RunCell(config, dataset, cell, training, synthetic)) {
      writer.Write(row);
      failed |= row.status != "ok";
      rows.push_back(row);
    }
  }
  if (!out.summary.empty()) {
    OutputFile summary(out.summary);
    rap::WriteSummary(summary.stream(), rap::Summarize(rows));
  }
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private threshold-query answering with "
               "relaxed adaptive projection"};
  app.require_subcommand(1);

  // encode
  CLI::App* encode = app.add_subcommand(
      "encode", "Infer a schema from a CSV and write it as JSON");
  std::string encode_data;
  std::string encode_schema_out;
  std::string encode_delimiter = ",";
  std::string encode_onehot;
  encode->add_option("--data", encode_data, "Dataset CSV")->required();
  encode->add_option("--schema-out", encode_schema_out, "Schema JSON output")
      ->required();
  encode->add_option("--delimiter", encode_delimiter, "Field delimiter");
  encode->add_option("--onehot-out", encode_onehot,
                     "Optional one-hot encoded dataset CSV");

  // run
  CLI::App* run = app.add_subcommand(
      "run", "Run one mechanism on one parameter cell for every trial");
  ConfigFlags run_flags;
  OutputFlags run_out;
  run_flags.Register(run);
  run_out.Register(run, /*with_synthetic=*/true);

  // grid
  CLI::App* grid = app.add_subcommand(
      "grid", "Run the Cartesian product of all configured lists");
  ConfigFlags grid_flags;
  OutputFlags grid_out;
  grid_flags.Register(grid);
  grid_out.Register(grid, /*with_synthetic=*/false);

  // future-eval
  CLI::App* future = app.add_subcommand(
      "future-eval", "Grid in the partial-knowledge setting with future error");
  ConfigFlags future_flags;
  OutputFlags future_out;
  future_flags.Register(future);
  future_out.Register(future, /*with_synthetic=*/false);

  // drift-tv
  CLI::App* drift = app.add_subcommand(
      "drift-tv", "Mean total variation between a distribution and its drift");
  std::string drift_kind = "geometric";
  double drift_zipf_s = 1.0;
  double drift_geometric_p = 0.5;
  size_t drift_d = 14;
  std::vector<double> drift_gammas = {0.0, 0.05, 0.1, 0.2, 0.5, 1.0};
  size_t drift_trials = 100;
  uint64_t drift_seed = 0;
  std::string drift_output;
  drift->add_option("--distribution", drift_kind, "uniform, zipf or geometric");
  drift->add_option("--zipf-s", drift_zipf_s, "Zipf exponent");
  drift->add_option("--geometric-p", drift_geometric_p, "Geometric parameter");
  drift->add_option("-d,--features", drift_d, "Number of features");
  drift->add_option("--gamma", drift_gammas, "Drift amounts (list)");
  drift->add_option("--trials", drift_trials, "Draws per gamma");
  drift->add_option("--seed", drift_seed, "Seed");
  drift->add_option("--output", drift_output, "CSV output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*encode) {
      if (encode_delimiter.size() != 1) {
        throw std::invalid_argument("delimiter must be one character");
      }
      const rap::Dataset dataset =
          rap::LoadDataset(encode_data, std::nullopt, {encode_delimiter[0]});
      rap::SaveSchema(encode_schema_out, dataset.schema());
      if (!encode_onehot.empty()) {
        rap::SaveRelaxed(encode_onehot,
                         rap::RelaxedFromRecords(dataset.records(),
                                                 dataset.schema()), dataset.schema());
      }
      std::cout << "n=" << dataset.size()
                << " d=" << dataset.schema().num_features()
                << " d_prime=" << dataset.schema().one_hot_width() << "\n";
      return 0;
    }
    if (*run) {
      rap::ExperimentConfig defaults;
      defaults.trials = 1;
      rap::ExperimentConfig config = run_flags.Resolve(defaults);
      if (config.mechanisms.size() != 1 || config.epsilons.size() != 1 ||
          config.rounds.size() != 1 || config.per_round.size() != 1 ||
          config.workload_sizes.size() != 1 || config.gammas.size() != 1) {
        throw std::invalid_argument(
            "run takes a single value per parameter; use grid for lists");
      }
      return RunExperiment(config, run_out);
    }
    if (*grid) {
      return RunExperiment(grid_flags.Resolve({}), grid_out);
    }
    if (*future) {
      rap::ExperimentConfig defaults;
      defaults.mode = rap::WorkloadMode::kPartial;
      defaults.mechanisms = {rap::kRapMechanism, rap::kAllZeroMechanism};
      defaults.distribution.kind = rap::DistributionKind::kGeometric;
      rap::ExperimentConfig config = future_flags.Resolve(defaults);
      config.mode = rap::WorkloadMode::kPartial;
      return RunExperiment(config, future_out);
    }
    if (*drift) {
      rap::DistributionSpec spec;
      spec.kind = rap::ParseDistributionKind(drift_kind);
      spec.zipf_s = drift_zipf_s;
      spec.geometric_p = drift_geometric_p;
      const auto points = rap::DriftCurve(rap::MakeDistribution(spec, drift_d),
                                          drift_gammas, drift_trials, drift_seed);
      OutputFile out(drift_output);
      rap::WriteDriftCurve(out.stream(), points);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
