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

#include "rap/harness.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>

#include "rap/privacy.h"
#include "rap/threshold_eval.h"

namespace rap {
namespace {

using Json = nlohmann::json;

std::string FormatDouble(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string FormatOptional(const std::optional<double>& value) {
  return value ? FormatDouble(*value) : std::string();
}

std::string CsvField(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void WriteCsvLine(std::ostream& out, const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << CsvField(fields[i]);
  }
  out << '\n';
  out.flush();
}

double DistributionParam(const DistributionSpec& spec) {
  switch (spec.kind) {
    case DistributionKind::kZipf:
      return spec.zipf_s;
    case DistributionKind::kGeometric:
      return spec.geometric_p;
    case DistributionKind::kUniform:
      break;
  }
  return 0.0;
}

Json OptimizerToJson(const OptimizerConfig& c) {
  return Json{{"learning_rate", c.learning_rate},
              {"max_iterations", c.max_iterations},
              {"stop_tolerance", c.stop_tolerance},
              {"patience", c.patience},
              {"beta1", c.moment_decay_1},
              {"beta2", c.moment_decay_2},
              {"adam_epsilon", c.epsilon_stabilizer}};
}

template <typename T>
void ReadKey(const Json& json, const char* key, T& field) {
  if (json.contains(key)) field = json.at(key).get<T>();
}

// Holds a trial's workload, its exact answers and, in the partial mode, the
// future workload.
struct TrialData {
  Workload workload;
  std::vector<double> truth;
  size_t peak_buffer = 0;
  std::optional<FutureWorkload> future;
};

TrialData PrepareTrial(const ExperimentConfig& config, const Dataset& dataset,
                       const Cell& cell, uint64_t seed) {
  const Schema& schema = dataset.schema();
  TrialData data;
  Rng workload_rng = MakeRng(DeriveSeed(seed, 1));
  if (!config.workload_path.empty()) {
    data.workload = LoadWorkload(config.workload_path);
    ValidateWorkload(data.workload, schema);
  } else if (config.mode == WorkloadMode::kPrespecified) {
    data.workload =
        SampleUniformWorkload(config.r, static_cast<int>(config.k),
                              cell.workload_size, schema, workload_rng);
  } else {
    const FeatureDistribution historical =
        MakeDistribution(config.distribution, schema.num_features());
    data.workload = SampleIidWorkload({historical, config.r, config.k},
                                      cell.workload_size, workload_rng);
    Rng drift_rng = MakeRng(DeriveSeed(seed, 2));
    const FeatureDistribution future =
        Drift(historical, {cell.gamma.value_or(0.0)}, drift_rng);
    Rng future_rng = MakeRng(DeriveSeed(seed, 3));
    data.future.emplace(dataset,
                        SampleIidWorkload({future, config.r, config.k},
                                          config.future_size, future_rng));
  }
  data.truth.reserve(ConsistentQueryCount(data.workload, schema));
  const StreamStats stats = StreamTrueAnswers(
      dataset, data.workload,
      [&](const AnswerBatch& batch) {
        data.truth.insert(data.truth.end(), batch.answers.begin(),
                          batch.answers.end());
      },
      config.batch_cap);
  data.peak_buffer = stats.peak_buffer;
  return data;
}

ResultRow RowTemplate(const ExperimentConfig& config, const Cell& cell,
                      double delta) {
  ResultRow row;
  row.mode = ToString(config.mode);
  row.mechanism = cell.mechanism;
  row.epsilon = cell.epsilon;
  row.delta = delta;
  row.workload_size = cell.workload_size;
  row.r = config.r;
  row.k = config.k;
  if (cell.mechanism == kRapMechanism) {
    row.rounds = std::to_string(cell.rounds.value_or(1));
    row.per_round = FormatPerRound(cell.per_round);
    row.n_prime = config.n_prime;
    row.selection = ToString(config.selection);
  }
  if (config.mode == WorkloadMode::kPartial) {
    row.distribution = ToString(config.distribution.kind);
    row.distribution_param = DistributionParam(config.distribution);
    row.gamma = FormatOptional(cell.gamma);
    row.future_size = config.future_size;
  }
  return row;
}

void RunTrial(const ExperimentConfig& config, const Dataset& dataset,
              const Cell& cell, const DpParams& params, uint64_t seed,
              size_t trial, const TrainingSink& training,
              const SyntheticSink& synthetic, ResultRow& row) {
  const Schema& schema = dataset.schema();
  const TrialData data = PrepareTrial(config, dataset, cell, seed);
  row.num_queries = data.truth.size();
  row.peak_buffer = data.peak_buffer;

  using Clock = std::chrono::steady_clock;
  Clock::time_point start;
  Clock::time_point stop;
  std::vector<double> answers;
  std::optional<FutureError> future_error;

  if (cell.mechanism == kRapMechanism) {
    RapConfig rap;
    rap.rounds = cell.rounds.value_or(1);
    rap.per_round = cell.per_round;
    rap.n_prime = config.n_prime;
    rap.optimizer = config.optimizer;
    rap.selection = config.selection;
    rap.seed = DeriveSeed(seed, 4);
    rap.batch_cap = config.batch_cap;
    RapObserver observer;
    if (training) {
      observer = [&](size_t round, const IterationRecord& record,
                     const RelaxedDataset& current) {
        TrainingRecord log;
        log.trial = trial;
        log.epsilon = cell.epsilon;
        log.workload_size = cell.workload_size;
        log.rounds = row.rounds;
        log.per_round = row.per_round;
        log.gamma = row.gamma;
        log.round = round;
        log.iteration = record.iteration;
        log.loss = record.loss;
        log.best_loss = record.best_loss;
        std::vector<double> current_answers = WorkloadSurrogateAnswers(
            current, schema, data.workload, config.batch_cap);
        for (double& a : current_answers) a = std::clamp(a, 0.0, 1.0);
        log.err_present = PresentError(data.truth, current_answers);
        if (data.future) {
          log.err_future =
              data.future->Evaluate(SyntheticAnswerer(current, schema)).mean;
        }
        training(log);
      };
    }
    start = Clock::now();
    RapOutput out = Rap(dataset, data.workload, params, rap, observer);
    stop = Clock::now();
    answers = std::move(out.answers);
    row.rho = out.budget.rho;
    row.ledger_total = out.ledger.Total();
    row.rounds_run = out.rounds_run;
    row.selected = out.selected;
    row.iterations = out.iterations;
    if (synthetic) synthetic(trial, out.synthetic);
    if (data.future) {
      future_error = data.future->Evaluate(SyntheticAnswerer(out.synthetic, schema));
    }
  } else if (cell.mechanism == kGaussianMechanismName) {
    Rng rng = MakeRng(DeriveSeed(seed, 5));
    start = Clock::now();
    BaselineOutput out = BaselineGaussian(dataset, data.workload, params, rng,
                                          config.batch_cap);
    stop = Clock::now();
    answers = std::move(out.answers);
    row.rho = out.budget.rho;
    row.ledger_total = out.ledger.Total();
  } else {
    start = Clock::now();
    answers = BaselineAllZero(data.workload, schema);
    stop = Clock::now();
    row.rho = EpsDeltaToRho(params).rho;
    row.ledger_total = 0.0;
    if (data.future) future_error = data.future->Evaluate(ZeroAnswerer(schema));
  }
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  row.err_present = PresentError(data.truth, answers);
  if (future_error) {
    row.err_future = future_error->mean;
    row.err_future_halfwidth = future_error->halfwidth95;
  }
}

// Orders K values with ALL last.
bool PerRoundLess(const std::optional<size_t>& a,
                  const std::optional<size_t>& b) {
  if (!a) return false;
  if (!b) return true;
  return *a < *b;
}

}  // namespace

std::string ToString(WorkloadMode mode) {
  return mode == WorkloadMode::kPrespecified ? "prespecified" : "partial";
}

WorkloadMode ParseWorkloadMode(const std::string& text) {
  if (text == "prespecified") return WorkloadMode::kPrespecified;
  if (text == "partial") return WorkloadMode::kPartial;
  throw std::invalid_argument("unknown workload mode: " + text);
}

std::string FormatPerRound(const std::optional<size_t>& k) {
  return k ? std::to_string(*k) : std::string("ALL");
}

std::optional<size_t> ParsePerRound(const std::string& text) {
  if (text == "ALL" || text == "all") return std::nullopt;
  size_t value = 0;
  const auto result =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size() ||
      value == 0) {
    throw std::invalid_argument("K must be a positive integer or ALL: " + text);
  }
  return value;
}

void ValidateExperimentConfig(const ExperimentConfig& config) {
  if (config.epsilons.empty() || config.workload_sizes.empty() ||
      config.rounds.empty() || config.per_round.empty() ||
      config.mechanisms.empty() || config.gammas.empty()) {
    throw std::invalid_argument("experiment lists must be non-empty");
  }
  if (config.trials == 0) throw std::invalid_argument("trials must be >= 1");
  for (double eps : config.epsilons) ValidateDpParams({eps, 0.5});
  if (config.delta) ValidateDpParams({1.0, *config.delta});
  if (config.k == 0 || config.r < 1 || static_cast<size_t>(config.r) > config.k) {
    throw std::invalid_argument("need 1 <= r <= k");
  }
  for (const std::string& m : config.mechanisms) {
    if (m != kRapMechanism && m != kGaussianMechanismName &&
        m != kAllZeroMechanism) {
      throw std::invalid_argument("unknown mechanism: " + m);
    }
  }
  for (size_t t : config.rounds) {
    for (const auto& k : config.per_round) {
      RapConfig probe;
      probe.rounds = t;
      probe.per_round = k;
      probe.n_prime = config.n_prime;
      probe.optimizer = config.optimizer;
      ValidateRapConfig(probe);
    }
  }
  for (double g : config.gammas) {
    if (!(g >= 0.0 && g <= 1.0)) {
      throw std::invalid_argument("gamma must lie in [0, 1]");
    }
  }
  if (config.mode == WorkloadMode::kPartial && config.future_size < 2) {
    throw std::invalid_argument("future workload needs at least 2 thresholds");
  }
  if (config.batch_cap == 0) throw std::invalid_argument("batch cap must be >= 1");
}

nlohmann::json ExperimentConfigToJson(const ExperimentConfig& config) {
  Json per_round = Json::array();
  for (const auto& k : config.per_round) {
    if (k) {
      per_round.push_back(*k);
    } else {
      per_round.push_back("ALL");
    }
  }
  return Json{
      {"dataset", config.dataset_path},
      {"schema", config.schema_path},
      {"delimiter", std::string(1, config.delimiter)},
      {"workload", config.workload_path},
      {"epsilons", config.epsilons},
      {"delta", config.delta ? Json(*config.delta) : Json("auto")},
      {"workload_sizes", config.workload_sizes},
      {"r", config.r},
      {"k", config.k},
      {"rounds", config.rounds},
      {"per_round", per_round},
      {"n_prime", config.n_prime},
      {"optimizer", OptimizerToJson(config.optimizer)},
      {"selection", ToString(config.selection)},
      {"mechanisms", config.mechanisms},
      {"mode", ToString(config.mode)},
      {"distribution",
       {{"kind", ToString(config.distribution.kind)},
        {"zipf_s", config.distribution.zipf_s},
        {"geometric_p", config.distribution.geometric_p}}},
      {"gammas", config.gammas},
      {"historical_size", config.historical_size},
      {"future_size", config.future_size},
      {"trials", config.trials},
      {"root_seed", config.root_seed},
      {"batch_cap", config.batch_cap},
      {"log_training", config.log_training}};
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& json,
                                          ExperimentConfig base) {
  ExperimentConfig c = std::move(base);
  ReadKey(json, "dataset", c.dataset_path);
  ReadKey(json, "schema", c.schema_path);
  if (json.contains("delimiter")) {
    const auto text = json.at("delimiter").get<std::string>();
    if (text.size() != 1) {
      throw std::invalid_argument("delimiter must be a single character");
    }
    c.delimiter = text[0];
  }
  ReadKey(json, "workload", c.workload_path);
  ReadKey(json, "epsilons", c.epsilons);
  if (json.contains("delta")) {
    const Json& d = json.at("delta");
    if (d.is_string()) {
      if (d.get<std::string>() != "auto") {
        throw std::invalid_argument("delta must be a number or \"auto\"");
      }
      c.delta.reset();
    } else {
      c.delta = d.get<double>();
    }
  }
  ReadKey(json, "workload_sizes", c.workload_sizes);
  ReadKey(json, "r", c.r);
  ReadKey(json, "k", c.k);
  ReadKey(json, "rounds", c.rounds);
  if (json.contains("per_round")) {
    c.per_round.clear();
    for (const Json& v : json.at("per_round")) {
      c.per_round.push_back(v.is_string() ? ParsePerRound(v.get<std::string>())
                                          : std::optional<size_t>(
                                                v.get<size_t>()));
    }
  }
  ReadKey(json, "n_prime", c.n_prime);
  if (json.contains("optimizer")) {
    const Json& o = json.at("optimizer");
    ReadKey(o, "learning_rate", c.optimizer.learning_rate);
    ReadKey(o, "max_iterations", c.optimizer.max_iterations);
    ReadKey(o, "stop_tolerance", c.optimizer.stop_tolerance);
    ReadKey(o, "patience", c.optimizer.patience);
    ReadKey(o, "beta1", c.optimizer.moment_decay_1);
    ReadKey(o, "beta2", c.optimizer.moment_decay_2);
    ReadKey(o, "adam_epsilon", c.optimizer.epsilon_stabilizer);
  }
  if (json.contains("selection")) {
    c.selection = ParseSelectionMode(json.at("selection").get<std::string>());
  }
  ReadKey(json, "mechanisms", c.mechanisms);
  if (json.contains("mode")) {
    c.mode = ParseWorkloadMode(json.at("mode").get<std::string>());
  }
  if (json.contains("distribution")) {
    const Json& d = json.at("distribution");
    if (d.contains("kind")) {
      c.distribution.kind = ParseDistributionKind(d.at("kind").get<std::string>());
    }
    ReadKey(d, "zipf_s", c.distribution.zipf_s);
    ReadKey(d, "geometric_p", c.distribution.geometric_p);
  }
  ReadKey(json, "gammas", c.gammas);
  ReadKey(json, "historical_size", c.historical_size);
  ReadKey(json, "future_size", c.future_size);
  ReadKey(json, "trials", c.trials);
  ReadKey(json, "root_seed", c.root_seed);
  ReadKey(json, "batch_cap", c.batch_cap);
  ReadKey(json, "log_training", c.log_training);
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::string& path,
                                      ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  return ExperimentConfigFromJson(Json::parse(in), std::move(base));
}

Dataset LoadExperimentDataset(const ExperimentConfig& config) {
  std::optional<Schema> schema;
  if (!config.schema_path.empty()) schema = LoadSchema(config.schema_path);
  return LoadDataset(config.dataset_path, schema, {config.delimiter});
}

double ResolveDelta(const ExperimentConfig& config, size_t n) {
  if (config.delta) return *config.delta;
  const double nd = static_cast<double>(n);
  return 1.0 / (nd * nd);
}

std::vector<ResultRow> RunCell(const ExperimentConfig& config,
                               const Dataset& dataset, const Cell& cell,
                               const TrainingSink& training,
                               const SyntheticSink& synthetic) {
  const double delta = ResolveDelta(config, dataset.size());
  const DpParams params{cell.epsilon, delta};
  std::vector<ResultRow> rows;
  rows.reserve(config.trials);
  for (size_t trial = 0; trial < config.trials; ++trial) {
    const uint64_t seed = config.root_seed ^ static_cast<uint64_t>(trial);
    ResultRow row = RowTemplate(config, cell, delta);
    row.trial = trial;
    row.seed = seed;
    try {
      RunTrial(config, dataset, cell, params, seed, trial, training, synthetic,
               row);
    } catch (const std::exception& e) {
      row.status = "error";
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Cell> ExpandGrid(const ExperimentConfig& config) {
  ValidateExperimentConfig(config);
  std::vector<size_t> sizes = config.workload_sizes;
  if (!config.workload_path.empty()) {
    sizes = {LoadWorkload(config.workload_path).thresholds.size()};
  } else if (config.mode == WorkloadMode::kPartial) {
    sizes = {config.historical_size};
  }
  std::vector<std::optional<double>> gammas;
  if (config.mode == WorkloadMode::kPartial) {
    gammas.assign(config.gammas.begin(), config.gammas.end());
  } else {
    gammas.push_back(std::nullopt);
  }
  std::vector<Cell> cells;
  for (double eps : config.epsilons) {
    for (size_t size : sizes) {
      for (const auto& gamma : gammas) {
        for (const std::string& mechanism : config.mechanisms) {
          Cell base{mechanism, eps, size, std::nullopt, std::nullopt, gamma};
          if (mechanism != kRapMechanism) {
            cells.push_back(base);
            continue;
          }
          for (size_t t : config.rounds) {
            for (const auto& k : config.per_round) {
              Cell cell = base;
              cell.rounds = t;
              cell.per_round = k;
              cells.push_back(cell);
            }
          }
        }
      }
    }
  }
  return cells;
}

std::vector<SummaryRow> Summarize(const std::vector<ResultRow>& rows) {
  struct Accumulator {
    double err_present = 0.0;
    double err_future = 0.0;
    size_t count = 0;
    size_t future_count = 0;
  };
  using GroupKey = std::tuple<double, size_t, std::string>;
  using CellKey = std::pair<size_t, std::optional<size_t>>;
  std::map<GroupKey, std::map<CellKey, Accumulator>> groups;
  for (const ResultRow& row : rows) {
    if (row.mechanism != kRapMechanism || row.status != "ok") continue;
    const CellKey cell{std::stoul(row.rounds), ParsePerRound(row.per_round)};
    Accumulator& acc =
        groups[{row.epsilon, row.workload_size, row.gamma}][cell];
    acc.err_present += row.err_present;
    ++acc.count;
    if (row.err_future) {
      acc.err_future += *row.err_future;
      ++acc.future_count;
    }
  }
  std::vector<SummaryRow> out;
  for (const auto& [group, cells] : groups) {
    bool have = false;
    SummaryRow candidate;
    SummaryRow chosen;
    for (const auto& [cell, acc] : cells) {
      candidate.epsilon = std::get<0>(group);
      candidate.workload_size = std::get<1>(group);
      candidate.gamma = std::get<2>(group);
      candidate.rounds = cell.first;
      candidate.per_round = cell.second;
      candidate.mean_err_present = acc.err_present / static_cast<double>(acc.count);
      candidate.mean_err_future =
          acc.future_count > 0
              ? std::optional<double>(acc.err_future /
                                      static_cast<double>(acc.future_count))
              : std::nullopt;
      candidate.trials = acc.count;
      bool better = !have;
      if (!better) {
        if (candidate.mean_err_present != chosen.mean_err_present) {
          better = candidate.mean_err_present < chosen.mean_err_present;
        } else if (candidate.rounds != chosen.rounds) {
          better = candidate.rounds < chosen.rounds;
        } else {
          better = PerRoundLess(candidate.per_round, chosen.per_round);
        }
      }
      if (better) {
        chosen = candidate;
        have = true;
      }
    }
    if (have) out.push_back(chosen);
  }
  return out;
}

std::vector<SummaryRow> RunGrid(const ExperimentConfig& config,
                                const Dataset& dataset, const RowSink& rows,
                                const TrainingSink& training) {
  std::vector<ResultRow> all;
  for (const Cell& cell : ExpandGrid(config)) {
    for (ResultRow& row :
         RunCell(config, dataset, cell, config.log_training ? training
                                                            : TrainingSink())) {
      if (rows) rows(row);
      all.push_back(std::move(row));
    }
  }
  return Summarize(all);
}

ResultWriter::ResultWriter(std::ostream& out) : out_(out) {
  WriteCsvLine(out_, Columns());
}

const std::vector<std::string>& ResultWriter::Columns() {
  static const std::vector<std::string> columns = {
      "mode",          "mechanism",   "epsilon",
      "delta",         "rho",         "workload_size",
      "r",             "k",           "T",
      "K",             "n_prime",     "selection",
      "distribution",  "dist_param",  "gamma",
      "future_size",   "trial",       "seed",
      "num_queries",   "err_present", "err_future",
      "err_future_hw", "runtime_ms",  "peak_buffer",
      "ledger_total",  "rounds_run",  "selected",
      "iterations",    "status",      "error"};
  return columns;
}

void ResultWriter::Write(const ResultRow& row) {
  const bool rap = row.mechanism == kRapMechanism;
  const bool partial = !row.distribution.empty();
  WriteCsvLine(out_, {row.mode,
                      row.mechanism,
                      FormatDouble(row.epsilon),
                      FormatDouble(row.delta),
                      FormatDouble(row.rho),
                      std::to_string(row.workload_size),
                      std::to_string(row.r),
                      std::to_string(row.k),
                      row.rounds,
                      row.per_round,
                      rap ? std::to_string(row.n_prime) : "",
                      row.selection,
                      row.distribution,
                      partial ? FormatDouble(row.distribution_param) : "",
                      row.gamma,
                      partial ? std::to_string(row.future_size) : "",
                      std::to_string(row.trial),
                      std::to_string(row.seed),
                      std::to_string(row.num_queries),
                      FormatDouble(row.err_present),
                      FormatOptional(row.err_future),
                      FormatOptional(row.err_future_halfwidth),
                      FormatDouble(row.runtime_ms),
                      std::to_string(row.peak_buffer),
                      FormatDouble(row.ledger_total),
                      std::to_string(row.rounds_run),
                      std::to_string(row.selected),
                      std::to_string(row.iterations),
                      row.status,
                      row.error});
}

TrainingWriter::TrainingWriter(std::ostream& out) : out_(out) {
  WriteCsvLine(out_, Columns());
}

const std::vector<std::string>& TrainingWriter::Columns() {
  static const std::vector<std::string> columns = {
      "trial", "epsilon",   "workload_size", "T",           "K",
      "gamma", "round",     "iteration",     "loss",        "best_loss",
      "err_present", "err_future"};
  return columns;
}

void TrainingWriter::Write(const TrainingRecord& record) {
  WriteCsvLine(out_, {std::to_string(record.trial),
                      FormatDouble(record.epsilon),
                      std::to_string(record.workload_size),
                      record.rounds,
                      record.per_round,
                      record.gamma,
                      std::to_string(record.round),
                      std::to_string(record.iteration),
                      FormatDouble(record.loss),
                      FormatDouble(record.best_loss),
                      FormatDouble(record.err_present),
                      FormatOptional(record.err_future)});
}

void WriteSummary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  WriteCsvLine(out, {"epsilon", "workload_size", "gamma", "T", "K",
                     "mean_err_present", "mean_err_future", "trials"});
  for (const SummaryRow& row : rows) {
    WriteCsvLine(out, {FormatDouble(row.epsilon),
                       std::to_string(row.workload_size),
                       row.gamma,
                       std::to_string(row.rounds),
                       FormatPerRound(row.per_round),
                       FormatDouble(row.mean_err_present),
                       FormatOptional(row.mean_err_future),
                       std::to_string(row.trials)});
  }
}

std::vector<DriftCurvePoint> DriftCurve(const FeatureDistribution& historical,
                                        const std::vector<double>& gammas,
                                        size_t trials, uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  std::vector<DriftCurvePoint> points;
  for (double gamma : gammas) {
    // Common random numbers across gammas.
    Rng rng = MakeRng(seed);
    std::vector<double> tv(trials);
    for (size_t t = 0; t < trials; ++t) {
      tv[t] = TotalVariation(historical, Drift(historical, {gamma}, rng));
    }
    const FutureError summary = SummarizeErrors(tv);
    points.push_back({gamma, summary.mean, summary.halfwidth95});
  }
  return points;
}

void WriteDriftCurve(std::ostream& out,
                     const std::vector<DriftCurvePoint>& points) {
  WriteCsvLine(out, {"gamma", "mean_tv", "halfwidth95"});
  for (const DriftCurvePoint& p : points) {
    WriteCsvLine(out, {FormatDouble(p.gamma), FormatDouble(p.mean_tv),
                       FormatDouble(p.halfwidth95)});
  }
}

}  // namespace rap
