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

// The Relaxed Adaptive Projection mechanism, its query-selection step and the
// All-0 / Gaussian baselines.

#ifndef RAP_MECHANISM_H_
#define RAP_MECHANISM_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "rap/dataset.h"
#include "rap/privacy.h"
#include "rap/projection.h"
#include "rap/surrogate.h"
#include "rap/workload.h"

namespace rap {

enum class SelectionMode { kIterative, kOneshot };

std::string ToString(SelectionMode mode);
SelectionMode ParseSelectionMode(const std::string& text);

// Labels under which the mechanisms read the sensitive dataset.
inline constexpr char kGaussianLabel[] = "gaussian";
inline constexpr char kReportNoisyMaxLabel[] = "report_noisy_max";
inline constexpr char kOneshotTopKLabel[] = "oneshot_top_k";

struct RapConfig {
  size_t rounds = 1;                // T
  std::optional<size_t> per_round;  // K; nullopt selects every query
  size_t n_prime = 1000;
  OptimizerConfig optimizer;
  SelectionMode selection = SelectionMode::kOneshot;
  uint64_t seed = 0;
  size_t batch_cap = kDefaultBatchCap;
};

// Throws std::invalid_argument for T = 0, K = 0 or T > 1 with K = ALL.
void ValidateRapConfig(const RapConfig& config);

struct SelectedQuery {
  PolyThresholdSpec spec;
  double noisy_answer = 0.0;
};

// Keyed by global query index.
using SelectedQueries = std::map<uint64_t, SelectedQuery>;

struct RapOutput {
  RelaxedDataset synthetic;
  AnswerVector answers;  // clamped to [0, 1]
  BudgetLedger ledger;
  ZcdpBudget budget;
  size_t rounds_run = 0;
  size_t selected = 0;
  size_t iterations = 0;
};

// Invoked for every optimizer iterate of every round.
using RapObserver = std::function<void(size_t round, const IterationRecord&,
                                       const RelaxedDataset&)>;

RapOutput Rap(const Dataset& dataset, const Workload& workload,
              const DpParams& params, const RapConfig& config,
              const RapObserver& observer = {});

// Selects up to K new queries with the largest private gap between the
// dataset and the synthetic data, then measures each with the Gaussian
// mechanism. Consumes exactly `round_budget`.
SelectedQueries AdaptiveSelect(const Dataset& dataset,
                               const RelaxedDataset& synthetic,
                               const Workload& workload,
                               SelectedQueries selected, size_t k,
                               ZcdpBudget round_budget, SelectionMode mode,
                               Rng& rng, BudgetLedger& ledger,
                               size_t batch_cap = kDefaultBatchCap);

// Picks K indices from fixed gaps the way AdaptiveSelect does: K sequential
// report-noisy-max calls at `selection_budget / K` each, or one top-K call
// at `selection_budget`.
std::vector<uint64_t> SelectFromGaps(const ErrorGapVector& gaps, size_t k,
                                     size_t n, ZcdpBudget selection_budget,
                                     SelectionMode mode, Rng& rng);

AnswerVector BaselineAllZero(const Workload& workload, const Schema& schema);

struct BaselineOutput {
  AnswerVector answers;  // clamped to [0, 1]
  BudgetLedger ledger;
  ZcdpBudget budget;
};

// Every query answered by the Gaussian mechanism at rho / m.
BaselineOutput BaselineGaussian(const Dataset& dataset, const Workload& workload,
                                const DpParams& params, Rng& rng,
                                size_t batch_cap = kDefaultBatchCap);

// max_i |truth_i - answers_i|.
double PresentError(std::span<const double> truth,
                    std::span<const double> answers);

}  // namespace rap

#endif  // RAP_MECHANISM_H_
