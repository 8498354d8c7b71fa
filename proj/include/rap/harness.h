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

// Experiment configuration, grid execution and result emission.

#ifndef RAP_HARNESS_H_
#define RAP_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rap/dataset.h"
#include "rap/generalization.h"
#include "rap/mechanism.h"
#include "rap/projection.h"
#include "rap/workload.h"

namespace rap {

enum class WorkloadMode {
  kPrespecified,  // uniform feature sets without replacement
  kPartial,       // i.i.d. historical thresholds from a feature distribution
};

std::string ToString(WorkloadMode mode);
WorkloadMode ParseWorkloadMode(const std::string& text);

inline constexpr char kRapMechanism[] = "rap";
inline constexpr char kGaussianMechanismName[] = "gm";
inline constexpr char kAllZeroMechanism[] = "all0";

struct ExperimentConfig {
  std::string dataset_path;
  std::string schema_path;  // empty: infer from the data
  char delimiter = ',';
  std::string workload_path;  // fixed prespecified workload instead of sampling

  std::vector<double> epsilons = {1.0};
  std::optional<double> delta;  // nullopt: 1 / n^2
  std::vector<size_t> workload_sizes = {64};
  int r = 3;
  size_t k = 3;
  std::vector<size_t> rounds = {1};
  std::vector<std::optional<size_t>> per_round = {std::nullopt};  // nullopt: ALL
  size_t n_prime = 1000;
  OptimizerConfig optimizer;
  SelectionMode selection = SelectionMode::kOneshot;
  std::vector<std::string> mechanisms = {kRapMechanism, kGaussianMechanismName,
                                         kAllZeroMechanism};

  WorkloadMode mode = WorkloadMode::kPrespecified;
  DistributionSpec distribution;
  std::vector<double> gammas = {0.0};
  size_t historical_size = 64;
  size_t future_size = 100;

  size_t trials = 5;
  uint64_t root_seed = 0;
  size_t batch_cap = kDefaultBatchCap;
  bool log_training = false;
};

// Throws std::invalid_argument on empty lists, trials = 0, unknown
// mechanisms, or T > 1 paired with K = ALL.
void ValidateExperimentConfig(const ExperimentConfig& config);

nlohmann::json ExperimentConfigToJson(const ExperimentConfig& config);
// Keys absent from `json` keep the values already in `base`.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& json,
                                          ExperimentConfig base = {});
ExperimentConfig LoadExperimentConfig(const std::string& path,
                                      ExperimentConfig base = {});

std::string FormatPerRound(const std::optional<size_t>& k);
std::optional<size_t> ParsePerRound(const std::string& text);

// One fully instantiated parameter combination. T and K are unset for the
// baselines, gamma is unset in the prespecified mode.
struct Cell {
  std::string mechanism;
  double epsilon = 1.0;
  size_t workload_size = 0;
  std::optional<size_t> rounds;
  std::optional<size_t> per_round;
  std::optional<double> gamma;
};

struct ResultRow {
  std::string mode;
  std::string mechanism;
  double epsilon = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  size_t workload_size = 0;
  int r = 0;
  size_t k = 0;
  std::string rounds;     // empty for baselines
  std::string per_round;  // "ALL", a count, or empty
  size_t n_prime = 0;
  std::string selection;
  std::string distribution;
  double distribution_param = 0.0;
  std::string gamma;  // empty in the prespecified mode
  size_t future_size = 0;
  size_t trial = 0;
  uint64_t seed = 0;
  uint64_t num_queries = 0;
  double err_present = 0.0;
  std::optional<double> err_future;
  std::optional<double> err_future_halfwidth;
  double runtime_ms = 0.0;
  size_t peak_buffer = 0;
  double ledger_total = 0.0;
  size_t rounds_run = 0;
  size_t selected = 0;
  size_t iterations = 0;
  std::string status = "ok";
  std::string error;
};

struct TrainingRecord {
  size_t trial = 0;
  double epsilon = 0.0;
  size_t workload_size = 0;
  std::string rounds;
  std::string per_round;
  std::string gamma;
  size_t round = 0;
  size_t iteration = 0;
  double loss = 0.0;
  double best_loss = 0.0;
  double err_present = 0.0;
  std::optional<double> err_future;
};

using RowSink = std::function<void(const ResultRow&)>;
using TrainingSink = std::function<void(const TrainingRecord&)>;
using SyntheticSink =
    std::function<void(size_t trial, const RelaxedDataset& synthetic)>;

// Reads the dataset (and schema sidecar when configured).
Dataset LoadExperimentDataset(const ExperimentConfig& config);

double ResolveDelta(const ExperimentConfig& config, size_t n);

// Runs every trial of one cell. A trial that throws yields a row with
// status "error" instead of propagating.
std::vector<ResultRow> RunCell(const ExperimentConfig& config,
                               const Dataset& dataset, const Cell& cell,
                               const TrainingSink& training = {},
                               const SyntheticSink& synthetic = {});

// Every cell of the Cartesian product, baselines once per
// (epsilon, |W|, gamma). A fixed workload file replaces the size list.
std::vector<Cell> ExpandGrid(const ExperimentConfig& config);

struct SummaryRow {
  double epsilon = 0.0;
  size_t workload_size = 0;
  std::string gamma;
  size_t rounds = 0;
  std::optional<size_t> per_round;
  double mean_err_present = 0.0;
  std::optional<double> mean_err_future;
  size_t trials = 0;
};

// Per (epsilon, |W|, gamma), the RAP (T, K) with the lowest mean
// err_present; ties go to smaller T, then smaller K (ALL counts as largest).
std::vector<SummaryRow> Summarize(const std::vector<ResultRow>& rows);

std::vector<SummaryRow> RunGrid(const ExperimentConfig& config,
                                const Dataset& dataset, const RowSink& rows,
                                const TrainingSink& training = {});

// CSV emission with a fixed column order; the header is written on
// construction.
class ResultWriter {
 public:
  explicit ResultWriter(std::ostream& out);
  void Write(const ResultRow& row);
  static const std::vector<std::string>& Columns();

 private:
  std::ostream& out_;
};

class TrainingWriter {
 public:
  explicit TrainingWriter(std::ostream& out);
  void Write(const TrainingRecord& record);
  static const std::vector<std::string>& Columns();

 private:
  std::ostream& out_;
};

void WriteSummary(std::ostream& out, const std::vector<SummaryRow>& rows);

struct DriftCurvePoint {
  double gamma = 0.0;
  double mean_tv = 0.0;
  double halfwidth95 = 0.0;
};

// Mean total variation between a distribution and its drifted copy.
std::vector<DriftCurvePoint> DriftCurve(const FeatureDistribution& historical,
                                        const std::vector<double>& gammas,
                                        size_t trials, uint64_t seed);

void WriteDriftCurve(std::ostream& out,
                     const std::vector<DriftCurvePoint>& points);

}  // namespace rap

#endif  // RAP_HARNESS_H_
