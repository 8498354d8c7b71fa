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

#include "rap/mechanism.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rap/threshold_eval.h"

namespace rap {
namespace {

// Exact answer of one consistent query, read under the caller's scope.
double CountFraction(const Dataset& dataset, const ConsistentQuery& query) {
  const auto records = dataset.records();
  const size_t d = dataset.num_features();
  uint64_t count = 0;
  for (size_t i = 0; i < dataset.size(); ++i) {
    count += EvaluatePredicate(records.subspan(i * d, d), query);
  }
  return static_cast<double>(count) / static_cast<double>(dataset.size());
}

void Clamp01(AnswerVector& answers) {
  for (double& a : answers) a = std::clamp(a, 0.0, 1.0);
}

RelaxedDataset RunProjection(const RelaxedDataset& synthetic,
                             const SelectedQueries& selected,
                             const OptimizerConfig& optimizer, size_t round,
                             const RapObserver& observer, size_t& iterations) {
  std::vector<PolyThresholdSpec> specs;
  std::vector<double> targets;
  specs.reserve(selected.size());
  targets.reserve(selected.size());
  for (const auto& [index, entry] : selected) {
    specs.push_back(entry.spec);
    targets.push_back(entry.noisy_answer);
  }
  IterationObserver step_observer;
  if (observer) {
    step_observer = [&](const IterationRecord& record, const RelaxedDataset& d) {
      observer(round, record, d);
    };
  }
  auto result =
      RelaxedProjection(synthetic, specs, targets, optimizer, step_observer);
  iterations += result.iterations;
  return std::move(result.synthetic);
}

}  // namespace

std::string ToString(SelectionMode mode) {
  return mode == SelectionMode::kIterative ? "iterative" : "oneshot";
}

SelectionMode ParseSelectionMode(const std::string& text) {
  if (text == "iterative") return SelectionMode::kIterative;
  if (text == "oneshot") return SelectionMode::kOneshot;
  throw std::invalid_argument("unknown selection mode: " + text);
}

void ValidateRapConfig(const RapConfig& config) {
  if (config.rounds == 0) throw std::invalid_argument("T must be >= 1");
  if (config.per_round && *config.per_round == 0) {
    throw std::invalid_argument("K must be >= 1");
  }
  if (!config.per_round && config.rounds != 1) {
    throw std::invalid_argument("K = ALL requires T = 1");
  }
  if (config.n_prime == 0) throw std::invalid_argument("n' must be >= 1");
  ValidateOptimizerConfig(config.optimizer);
}

std::vector<uint64_t> SelectFromGaps(const ErrorGapVector& gaps, size_t k,
                                     size_t n, ZcdpBudget selection_budget,
                                     SelectionMode mode, Rng& rng) {
  if (k == 0 || k > gaps.size()) {
    throw std::logic_error("selection requires 1 <= K <= number of gaps");
  }
  if (mode == SelectionMode::kOneshot) {
    return OneshotTopK(gaps, k, n, selection_budget, rng);
  }
  const ZcdpBudget each{selection_budget.rho / static_cast<double>(k)};
  ErrorGapVector remaining = gaps;
  std::vector<uint64_t> chosen;
  chosen.reserve(k);
  for (size_t j = 0; j < k; ++j) {
    const uint64_t pick = ReportNoisyMax(remaining, n, each, rng);
    chosen.push_back(pick);
    // Gaps are fixed within a round; drop the chosen entry.
    const auto pos = static_cast<size_t>(
        std::find(remaining.indices.begin(), remaining.indices.end(), pick) -
        remaining.indices.begin());
    remaining.gaps.erase(remaining.gaps.begin() + pos);
    remaining.indices.erase(remaining.indices.begin() + pos);
  }
  return chosen;
}

SelectedQueries AdaptiveSelect(const Dataset& dataset,
                               const RelaxedDataset& synthetic,
                               const Workload& workload,
                               SelectedQueries selected, size_t k,
                               ZcdpBudget round_budget, SelectionMode mode,
                               Rng& rng, BudgetLedger& ledger,
                               size_t batch_cap) {
  const Schema& schema = dataset.schema();
  const QueryIndex index(workload, schema);
  const uint64_t m = index.size();
  if (selected.size() >= m) {
    throw std::invalid_argument("no unselected queries remain");
  }
  if (k == 0) throw std::invalid_argument("K must be >= 1");
  const size_t n = dataset.size();
  const size_t k_eff = static_cast<size_t>(
      std::min<uint64_t>(k, m - selected.size()));

  const AnswerVector synthetic_answers =
      WorkloadSurrogateAnswers(synthetic, schema, workload, batch_cap);

  // Selection spends rho'/(2K) per pick even when K is capped; the remainder
  // is split over the measurements.
  const double selection_each = round_budget.rho / (2.0 * static_cast<double>(k));
  const ZcdpBudget selection_budget{selection_each * static_cast<double>(k_eff)};
  std::vector<uint64_t> picks;
  {
    ScopedAccess scope(dataset, mode == SelectionMode::kIterative
                                    ? kReportNoisyMaxLabel
                                    : kOneshotTopKLabel);
    ErrorGapVector gaps;
    gaps.gaps.reserve(m - selected.size());
    gaps.indices.reserve(m - selected.size());
    StreamTrueAnswers(
        dataset, workload,
        [&](const AnswerBatch& batch) {
          for (size_t j = 0; j < batch.answers.size(); ++j) {
            const uint64_t q = batch.offset + j;
            if (selected.contains(q)) continue;
            gaps.gaps.push_back(std::abs(batch.answers[j] - synthetic_answers[q]));
            gaps.indices.push_back(q);
          }
        },
        batch_cap);
    picks = SelectFromGaps(gaps, k_eff, n, selection_budget, mode, rng);
  }
  if (mode == SelectionMode::kIterative) {
    ledger.Record(kReportNoisyMaxLabel, selection_each, k_eff);
  } else {
    ledger.Record(kOneshotTopKLabel, selection_budget.rho, 1);
  }

  const ZcdpBudget measure_each{(round_budget.rho - selection_budget.rho) /
                                static_cast<double>(k_eff)};
  {
    ScopedAccess scope(dataset, kGaussianLabel);
    for (uint64_t q : picks) {
      const ConsistentQuery query = index.At(q);
      const double truth = CountFraction(dataset, query);
      selected[q] = SelectedQuery{MakePolyThresholdSpec(query, schema),
                                  GaussianMechanism(truth, n, measure_each, rng)};
    }
  }
  ledger.Record(kGaussianLabel, measure_each.rho, k_eff);
  return selected;
}

RapOutput Rap(const Dataset& dataset, const Workload& workload,
              const DpParams& params, const RapConfig& config,
              const RapObserver& observer) {
  ValidateRapConfig(config);
  const Schema& schema = dataset.schema();
  const QueryIndex index(workload, schema);
  const uint64_t m = index.size();
  const size_t n = dataset.size();

  RapOutput out;
  out.budget = EpsDeltaToRho(params);
  const double rho = out.budget.rho;

  Rng noise_rng = MakeRng(DeriveSeed(config.seed, 0));
  Rng init_rng = MakeRng(DeriveSeed(config.seed, 1));
  RelaxedDataset synthetic = InitRelaxed(config.n_prime, schema, init_rng);
  ProjectRowsInPlace(synthetic);

  if (!config.per_round) {
    const ZcdpBudget each{rho / static_cast<double>(m)};
    SelectedQueries all;
    {
      ScopedAccess scope(dataset, kGaussianLabel);
      StreamTrueAnswers(
          dataset, workload,
          [&](const AnswerBatch& batch) {
            for (size_t j = 0; j < batch.answers.size(); ++j) {
              const uint64_t q = batch.offset + j;
              const double noisy =
                  GaussianMechanism(batch.answers[j], n, each, noise_rng);
              all.emplace_hint(all.end(), q,
                               SelectedQuery{MakePolyThresholdSpec(index.At(q), schema),
                                             noisy});
            }
          },
          config.batch_cap);
    }
    out.ledger.Record(kGaussianLabel, each.rho, m);
    synthetic = RunProjection(synthetic, all, config.optimizer, 0, observer,
                              out.iterations);
    out.rounds_run = 1;
    out.selected = all.size();
  } else {
    const size_t k = *config.per_round;
    // At most ceil(m / K) rounds can select anything.
    const uint64_t needed = (m + k - 1) / k;
    const size_t rounds =
        static_cast<size_t>(std::min<uint64_t>(config.rounds, needed));
    const ZcdpBudget round_budget{rho / static_cast<double>(rounds)};
    SelectedQueries selected;
    for (size_t t = 0; t < rounds; ++t) {
      selected = AdaptiveSelect(dataset, synthetic, workload, std::move(selected),
                                k, round_budget, config.selection, noise_rng,
                                out.ledger, config.batch_cap);
      synthetic = RunProjection(synthetic, selected, config.optimizer, t,
                                observer, out.iterations);
    }
    out.rounds_run = rounds;
    out.selected = selected.size();
  }

  out.ledger.CheckComposition(rho, 1e-12);
  out.answers = WorkloadSurrogateAnswers(synthetic, schema, workload,
                                         config.batch_cap);
  Clamp01(out.answers);
  out.synthetic = std::move(synthetic);
  return out;
}

AnswerVector BaselineAllZero(const Workload& workload, const Schema& schema) {
  return AnswerVector(ConsistentQueryCount(workload, schema), 0.0);
}

BaselineOutput BaselineGaussian(const Dataset& dataset, const Workload& workload,
                                const DpParams& params, Rng& rng,
                                size_t batch_cap) {
  BaselineOutput out;
  out.budget = EpsDeltaToRho(params);
  const uint64_t m = ConsistentQueryCount(workload, dataset.schema());
  const ZcdpBudget each{out.budget.rho / static_cast<double>(m)};
  out.answers.resize(m);
  {
    ScopedAccess scope(dataset, kGaussianLabel);
    StreamTrueAnswers(
        dataset, workload,
        [&](const AnswerBatch& batch) {
          for (size_t j = 0; j < batch.answers.size(); ++j) {
            out.answers[batch.offset + j] =
                GaussianMechanism(batch.answers[j], dataset.size(), each, rng);
          }
        },
        batch_cap);
  }
  out.ledger.Record(kGaussianLabel, each.rho, m);
  out.ledger.CheckComposition(out.budget.rho, 1e-12);
  Clamp01(out.answers);
  return out;
}

double PresentError(std::span<const double> truth,
                    std::span<const double> answers) {
  if (truth.size() != answers.size()) {
    throw std::invalid_argument("answer vectors differ in length");
  }
  double worst = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    worst = std::max(worst, std::abs(truth[i] - answers[i]));
  }
  return worst;
}

}  // namespace rap
