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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rap/dataset.h"
#include "rap/generalization.h"
#include "rap/harness.h"
#include "rap/mechanism.h"
#include "rap/privacy.h"
#include "rap/projection.h"
#include "rap/surrogate.h"
#include "rap/threshold_eval.h"
#include "rap/workload.h"
#include "support/test_data.h"

namespace rap {
namespace {

// Pinned tolerances.
constexpr double kFormTolerance = 1e-12;
constexpr double kGradientFdStep = 1e-5;
constexpr double kGradientRelTolerance = 1e-4;
constexpr double kSparsemaxTolerance = 1e-9;
constexpr double kRoundTripTolerance = 1e-9;
constexpr double kVarianceRelTolerance = 0.05;
constexpr double kGumbelRelTolerance = 0.02;
constexpr double kSelectionTvTolerance = 0.02;
constexpr double kLedgerTolerance = 1e-12;
constexpr double kSparsityZeroFraction = 0.99;
constexpr double kSparsityRelTolerance = 0.20;
constexpr double kMinThroughput = 5000.0;

// Runtime limits in seconds.
constexpr double kEedqLimit = 60.0;
constexpr double kSelectionLimit = 120.0;
constexpr double kUtilityLimit = 600.0;

// End-to-end experiment settings.
constexpr size_t kPlantedRows = 2000;
constexpr uint64_t kPlantedSeed = 2024;
constexpr size_t kTrials = 5;
constexpr size_t kSyntheticRows = 1000;
constexpr size_t kMaxIterations = 1000;

constexpr double kEulerGamma = 0.57721566490153286;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

// Visits every k-subset of {0, ..., d-1} in lexicographic order.
void ForEachSubset(size_t d, size_t k,
                   const std::function<void(const std::vector<size_t>&)>& visit) {
  std::vector<size_t> subset(k);
  std::iota(subset.begin(), subset.end(), 0);
  while (true) {
    visit(subset);
    size_t i = k;
    while (i > 0 && subset[i - 1] == d - k + i - 1) --i;
    if (i == 0) return;
    ++subset[i - 1];
    for (size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
}

Outcome EedqEquivalence() {
  const auto start = std::chrono::steady_clock::now();
  uint64_t checks = 0;
  uint64_t mismatches = 0;
  for (size_t d = 1; d <= 4; ++d) {
    std::vector<size_t> cards(d, 2);
    while (true) {
      const Schema schema = testing::MakeSchema(cards);
      const auto records = testing::AllRecords(schema);
      std::vector<Category> flat;
      for (const auto& rec : records) flat.insert(flat.end(), rec.begin(), rec.end());
      const RelaxedDataset onehot = RelaxedFromRecords(flat, schema);
      std::vector<double> grad(schema.one_hot_width());
      for (size_t k = 1; k <= d; ++k) {
        ForEachSubset(d, k, [&](const std::vector<size_t>& features) {
          for (int r = 1; r <= static_cast<int>(k); ++r) {
            const Workload workload{{MakeThreshold(r, features)}};
            const QueryIndex index(workload, schema);
            for (uint64_t q = 0; q < index.size(); ++q) {
              const ConsistentQuery query = index.At(q);
              const PolyThresholdSpec spec = MakePolyThresholdSpec(query, schema);
              for (size_t i = 0; i < records.size(); ++i) {
                const double truth = EvaluatePredicate(records[i], query) ? 1.0 : 0.0;
                const double literal = PolyThreshold(onehot.row(i), spec);
                const double kernel =
                    EvaluatePolyKernel(onehot.row(i).data(), spec, grad.data());
                checks += 2;
                mismatches += (literal != truth) + (kernel != truth);
              }
            }
          }
        });
      }
      size_t f = 0;
      while (f < d && cards[f] == 4) cards[f++] = 2;
      if (f == d) break;
      ++cards[f];
    }
  }
  const double secs = Seconds(start);
  return {mismatches == 0 && secs < kEedqLimit,
          Format("%llu evaluations, %llu mismatches, %.1f s (limit %.0f s)",
                 static_cast<unsigned long long>(checks),
                 static_cast<unsigned long long>(mismatches), secs, kEedqLimit)};
}

Outcome DefinitionForms() {
  Rng rng = MakeRng(2);
  const size_t width = 12;
  double worst_form = 0.0;
  double worst_negation = 0.0;
  std::vector<double> row(width);
  std::vector<double> complement(width);
  for (int k = 1; k <= 4; ++k) {
    for (int r = 1; r <= k; ++r) {
      for (int trial = 0; trial < 1000; ++trial) {
        for (size_t j = 0; j < width; ++j) {
          row[j] = Uniform01(rng);
          complement[j] = 1.0 - row[j];
        }
        std::vector<size_t> coords(width);
        std::iota(coords.begin(), coords.end(), 0);
        std::shuffle(coords.begin(), coords.end(), rng);
        coords.resize(k);
        const double partition = PolyThresholdPartitionSum(row, coords, r);
        const double ie = PolyThresholdInclusionExclusion(row, coords, r);
        const double negated =
            1.0 - PolyThresholdInclusionExclusion(complement, coords, k - r + 1);
        worst_form = std::max(worst_form, std::abs(partition - ie));
        worst_negation = std::max(worst_negation, std::abs(ie - negated));
      }
    }
  }
  return {worst_form <= kFormTolerance && worst_negation <= kFormTolerance,
          Format("max |partition - incl/excl| = %.2e, max negation gap = %.2e "
                 "(tol %.0e)",
                 worst_form, worst_negation, kFormTolerance)};
}

Outcome GradientCheck() {
  Rng rng = MakeRng(3);
  double worst = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    // Random schema with one-hot width at most 30.
    std::vector<size_t> cards;
    size_t width = 0;
    const size_t d = 2 + rng() % 5;
    for (size_t f = 0; f < d; ++f) {
      const size_t c = 2 + rng() % 4;
      if (width + c > 30) break;
      cards.push_back(c);
      width += c;
    }
    const Schema schema = testing::MakeSchema(cards);
    RelaxedDataset relaxed = InitRelaxed(10, schema, rng);
    ProjectRowsInPlace(relaxed);
    std::vector<PolyThresholdSpec> specs;
    std::vector<double> targets;
    for (int q = 0; q < 6; ++q) {
      const size_t k = 1 + rng() % std::min<size_t>(cards.size(), 5);
      std::vector<size_t> features(cards.size());
      std::iota(features.begin(), features.end(), 0);
      std::shuffle(features.begin(), features.end(), rng);
      features.resize(k);
      std::sort(features.begin(), features.end());
      const int r = 1 + static_cast<int>(rng() % k);
      ConsistentQuery query{MakeThreshold(r, features), {}};
      for (size_t f : features) {
        query.target.push_back(static_cast<Category>(rng() % cards[f]));
      }
      specs.push_back(MakePolyThresholdSpec(query, schema));
      targets.push_back(Uniform01(rng));
    }
    const LossGradient analytic = LossAndGradient(relaxed, specs, targets);
    double diff = 0.0;
    double norm_a = 0.0;
    double norm_fd = 0.0;
    auto values = relaxed.values();
    for (size_t j = 0; j < values.size(); ++j) {
      const double saved = values[j];
      values[j] = saved + kGradientFdStep;
      const double up = LossAndGradient(relaxed, specs, targets).loss;
      values[j] = saved - kGradientFdStep;
      const double down = LossAndGradient(relaxed, specs, targets).loss;
      values[j] = saved;
      const double fd = (up - down) / (2.0 * kGradientFdStep);
      diff += (fd - analytic.gradient[j]) * (fd - analytic.gradient[j]);
      norm_a += analytic.gradient[j] * analytic.gradient[j];
      norm_fd += fd * fd;
    }
    const double denom = std::max({std::sqrt(norm_a), std::sqrt(norm_fd), 1e-12});
    worst = std::max(worst, std::sqrt(diff) / denom);
  }
  return {worst <= kGradientRelTolerance,
          Format("max relative error %.2e over 100 instances (tol %.0e)", worst,
                 kGradientRelTolerance)};
}

std::vector<double> SimplexProjectionOracle(const std::vector<double>& z) {
  const size_t t = z.size();
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (uint32_t mask = 1; mask < (1u << t); ++mask) {
    double sum = 0.0;
    size_t count = 0;
    for (size_t j = 0; j < t; ++j) {
      if (mask & (1u << j)) {
        sum += z[j];
        ++count;
      }
    }
    const double tau = (sum - 1.0) / static_cast<double>(count);
    std::vector<double> p(t, 0.0);
    bool feasible = true;
    for (size_t j = 0; j < t; ++j) {
      if (mask & (1u << j)) {
        p[j] = z[j] - tau;
        feasible = feasible && p[j] >= 0.0;
      } else {
        feasible = feasible && z[j] - tau <= 1e-12;
      }
    }
    if (!feasible) continue;
    double dist = 0.0;
    for (size_t j = 0; j < t; ++j) dist += (p[j] - z[j]) * (p[j] - z[j]);
    if (dist < best_dist) {
      best_dist = dist;
      best = p;
    }
  }
  return best;
}

Outcome SparsemaxOracle() {
  Rng rng = MakeRng(4);
  std::normal_distribution<double> normal(0.0, 1.5);
  double worst = 0.0;
  double worst_idem = 0.0;
  double worst_sum = 0.0;
  bool negative = false;
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t t = 1 + trial % 6;
    std::vector<double> z(t);
    for (double& v : z) v = normal(rng);
    const auto p = Sparsemax(z);
    const auto oracle = SimplexProjectionOracle(z);
    const auto again = Sparsemax(p);
    double sum = 0.0;
    for (size_t j = 0; j < t; ++j) {
      worst = std::max(worst, std::abs(p[j] - oracle[j]));
      worst_idem = std::max(worst_idem, std::abs(again[j] - p[j]));
      negative = negative || p[j] < 0.0;
      sum += p[j];
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  const bool pass = worst <= kSparsemaxTolerance &&
                    worst_idem <= kSparsemaxTolerance &&
                    worst_sum <= kSparsemaxTolerance && !negative;
  return {pass, Format("max oracle gap %.2e, idempotence gap %.2e, |sum-1| %.2e, "
                       "negatives %s (tol %.0e)",
                       worst, worst_idem, worst_sum, negative ? "yes" : "no",
                       kSparsemaxTolerance)};
}

Outcome ConversionRoundTrip() {
  double worst = 0.0;
  bool loss = true;
  for (double eps : {0.01, 0.1, 1.0, 10.0}) {
    for (double delta : {1e-12, 1e-9, 1e-6, 1e-3}) {
      const ZcdpBudget budget = EpsDeltaToRho({eps, delta});
      loss = loss && budget.rho > 0.0 && budget.rho < eps;
      worst = std::max(worst, std::abs(RhoToEps(budget, delta) - eps));
    }
  }
  return {worst <= kRoundTripTolerance && loss,
          Format("max |eps' - eps| = %.2e over 16 pairs (tol %.0e), 0 < rho < eps: %s",
                 worst, kRoundTripTolerance, loss ? "yes" : "no")};
}

Outcome NoiseStatistics() {
  Rng rng = MakeRng(6);
  const size_t n = 1000;
  const ZcdpBudget budget{0.1};
  const int gm_draws = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < gm_draws; ++i) {
    const double x = GaussianMechanism(0.5, n, budget, rng) - 0.5;
    sum += x;
    sq += x * x;
  }
  const double mean = sum / gm_draws;
  const double var = (sq - gm_draws * mean * mean) / (gm_draws - 1);
  const double var_err = std::abs(var / GaussianVariance(n, budget) - 1.0);

  const double scale = 0.3;
  const int gumbel_draws = 1000000;
  double gsum = 0.0;
  for (int i = 0; i < gumbel_draws; ++i) gsum += GumbelSample(scale, rng);
  const double gumbel_err =
      std::abs(gsum / gumbel_draws / (kEulerGamma * scale) - 1.0);
  return {var_err <= kVarianceRelTolerance && gumbel_err <= kGumbelRelTolerance,
          Format("GM variance rel. error %.4f (tol %.2f), Gumbel mean rel. error "
                 "%.4f (tol %.2f)",
                 var_err, kVarianceRelTolerance, gumbel_err, kGumbelRelTolerance)};
}

Outcome SelectionEquivalence() {
  const auto start = std::chrono::steady_clock::now();
  const ErrorGapVector gaps{{0.5, 0.4, 0.3, 0.2, 0.1}, {0, 1, 2, 3, 4}};
  const size_t k = 2;
  const size_t n = 100;
  const double rho = 0.5;
  // Selection half of the round budget; each of the K picks gets rho/(2K).
  const ZcdpBudget selection{k * rho / (2.0 * k)};
  const int trials = 200000;
  std::vector<double> freq[2] = {std::vector<double>(25, 0.0),
                                 std::vector<double>(25, 0.0)};
  int slot = 0;
  for (auto mode : {SelectionMode::kIterative, SelectionMode::kOneshot}) {
    Rng rng = MakeRng(70 + slot);
    for (int t = 0; t < trials; ++t) {
      const auto picks = SelectFromGaps(gaps, k, n, selection, mode, rng);
      const auto lo = std::min(picks[0], picks[1]);
      const auto hi = std::max(picks[0], picks[1]);
      freq[slot][lo * 5 + hi] += 1.0 / trials;
    }
    ++slot;
  }
  double tv = 0.0;
  for (size_t i = 0; i < 25; ++i) tv += std::abs(freq[0][i] - freq[1][i]);
  tv *= 0.5;
  const double secs = Seconds(start);
  return {tv <= kSelectionTvTolerance && secs < kSelectionLimit,
          Format("TV(iterative, oneshot) = %.4f (tol %.2f), %.1f s (limit %.0f s)",
                 tv, kSelectionTvTolerance, secs, kSelectionLimit)};
}

Outcome BudgetLedgerAndAccess() {
  Dataset data = testing::MakePlantedDataset(500, 8);
  auto audit = std::make_shared<AccessAudit>();
  data.AttachAudit(audit);
  Rng workload_rng = MakeRng(8);
  const Workload workload =
      SampleUniformWorkload(2, 3, 6, data.schema(), workload_rng);
  const uint64_t m = ConsistentQueryCount(workload, data.schema());
  struct Setting {
    size_t rounds;
    std::optional<size_t> per_round;
  };
  const std::vector<Setting> settings = {
      {1, std::nullopt}, {1, 16}, {4, 8}, {3, 1}, {16, 64}, {64, 4}};
  double worst = 0.0;
  size_t runs = 0;
  for (double eps : {0.1, 1.0}) {
    const DpParams params{eps, 1.0 / (500.0 * 500.0)};
    const double rho = EpsDeltaToRho(params).rho;
    for (const Setting& s : settings) {
      for (auto mode : {SelectionMode::kIterative, SelectionMode::kOneshot}) {
        RapConfig config;
        config.rounds = s.rounds;
        config.per_round = s.per_round;
        config.n_prime = 30;
        config.optimizer.max_iterations = 10;
        config.selection = mode;
        config.seed = runs;
        const RapOutput out = Rap(data, workload, params, config);
        worst = std::max(worst, std::abs(out.ledger.Total() - rho));
        ++runs;
      }
    }
    for (uint64_t seed = 0; seed < 3; ++seed) {
      Rng rng = MakeRng(seed);
      const BaselineOutput out = BaselineGaussian(data, workload, params, rng);
      worst = std::max(worst, std::abs(out.ledger.Total() - rho));
      ++runs;
    }
  }
  bool labels_ok = true;
  for (const auto& [label, count] : audit->reads_by_label()) {
    labels_ok = labels_ok && (label == kGaussianLabel ||
                              label == kReportNoisyMaxLabel ||
                              label == kOneshotTopKLabel);
  }
  const uint64_t unguarded = audit->unguarded_reads();
  return {worst <= kLedgerTolerance && unguarded == 0 && labels_ok &&
              audit->guarded_reads() > 0,
          Format("%zu runs over m = %llu queries, max |ledger - rho| = %.2e "
                 "(tol %.0e), unguarded reads %llu, guarded reads %llu",
                 runs, static_cast<unsigned long long>(m), worst,
                 kLedgerTolerance, static_cast<unsigned long long>(unguarded),
                 static_cast<unsigned long long>(audit->guarded_reads()))};
}

ExperimentConfig PlantedConfig() {
  ExperimentConfig config;
  config.epsilons = {1.0};
  config.workload_sizes = {16};
  config.r = 3;
  config.k = 3;
  config.rounds = {1, 4, 16};
  config.per_round = {4, 16, 64};
  config.n_prime = kSyntheticRows;
  config.optimizer.max_iterations = kMaxIterations;
  config.trials = kTrials;
  config.root_seed = 1;
  return config;
}

double MeanErr(const std::vector<ResultRow>& rows, const std::string& mechanism,
               bool future) {
  double sum = 0.0;
  size_t count = 0;
  for (const auto& row : rows) {
    if (row.mechanism != mechanism || row.status != "ok") continue;
    if (future && !row.err_future) continue;
    sum += future ? *row.err_future : row.err_present;
    ++count;
  }
  return count ? sum / static_cast<double>(count)
               : std::numeric_limits<double>::quiet_NaN();
}

size_t ErrorRows(const std::vector<ResultRow>& rows) {
  return std::count_if(rows.begin(), rows.end(),
                       [](const ResultRow& r) { return r.status != "ok"; });
}

Outcome UtilityOrdering(const Dataset& data) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig config = PlantedConfig();
  std::vector<ResultRow> rows;
  const auto summary =
      RunGrid(config, data, [&](const ResultRow& row) { rows.push_back(row); });
  const double secs = Seconds(start);
  if (summary.size() != 1) return {false, "no RAP summary row"};
  const SummaryRow& best = summary[0];
  const double gm = MeanErr(rows, kGaussianMechanismName, false);
  const double zero = MeanErr(rows, kAllZeroMechanism, false);
  const bool pass = ErrorRows(rows) == 0 && best.mean_err_present < gm &&
                    best.mean_err_present < zero && secs < kUtilityLimit;
  return {pass,
          Format("best RAP (T=%zu, K=%s) %.4f vs GM %.4f vs All-0 %.4f, "
                 "%zu trials, %.1f s (limit %.0f s)",
                 best.rounds, FormatPerRound(best.per_round).c_str(),
                 best.mean_err_present, gm, zero, kTrials, secs, kUtilityLimit)};
}

Outcome SparsityEffect(const Dataset& data) {
  // The sparsest workload available on six features: the full 6-way marginal.
  const Workload workload{{MakeThreshold(6, {0, 1, 2, 3, 4, 5})}};
  const AnswerVector truth = TrueAnswers(data, workload);
  const double zeros =
      static_cast<double>(std::count(truth.begin(), truth.end(), 0.0)) /
      static_cast<double>(truth.size());
  const double zero_err = PresentError(truth, BaselineAllZero(workload, data.schema()));
  const DpParams params{1.0, 1.0 / (static_cast<double>(data.size()) *
                                    static_cast<double>(data.size()))};
  double rap_err = 0.0;
  for (size_t trial = 0; trial < kTrials; ++trial) {
    RapConfig config;
    config.n_prime = kSyntheticRows;
    config.optimizer.max_iterations = kMaxIterations;
    config.seed = trial;
    rap_err += PresentError(truth, Rap(data, workload, params, config).answers);
  }
  rap_err /= static_cast<double>(kTrials);
  const double rel = std::abs(rap_err - zero_err) / zero_err;
  return {zeros >= kSparsityZeroFraction && rel <= kSparsityRelTolerance,
          Format("6-way marginal: %.1f%% zero answers (need >= %.0f%%), "
                 "non-adaptive RAP %.4f vs All-0 %.4f, rel. gap %.2f (tol %.2f)",
                 100.0 * zeros, 100.0 * kSparsityZeroFraction, rap_err, zero_err,
                 rel, kSparsityRelTolerance)};
}

Outcome DriftEndpoints() {
  const FeatureDistribution h =
      MakeDistribution({DistributionKind::kGeometric, 1.0, 0.5}, 14);
  Rng rng = MakeRng(11);
  const bool identity = Drift(h, {0.0}, rng).probs == h.probs;
  const std::vector<double> reversed(h.probs.rbegin(), h.probs.rend());
  const bool reversal = Drift(h, {1.0}, rng).probs == reversed;
  const auto points = DriftCurve(h, {0.0, 0.05, 0.1, 0.2, 0.5}, 100, 11);
  bool monotone = true;
  std::string curve;
  for (size_t i = 0; i < points.size(); ++i) {
    if (i > 0) monotone = monotone && points[i].mean_tv >= points[i - 1].mean_tv;
    curve += Format("%s%.3f", i ? ", " : "", points[i].mean_tv);
  }
  return {identity && reversal && monotone,
          Format("gamma=0 identity %s, gamma=1 reversal %s, mean TV [%s] "
                 "non-decreasing %s",
                 identity ? "yes" : "no", reversal ? "yes" : "no", curve.c_str(),
                 monotone ? "yes" : "no")};
}

Outcome FutureErrorSanity(const Dataset& data) {
  ExperimentConfig config = PlantedConfig();
  config.mode = WorkloadMode::kPartial;
  config.distribution = {DistributionKind::kGeometric, 1.0, 0.5};
  config.historical_size = 64;
  config.future_size = 100;
  config.gammas = {0.0};
  config.mechanisms = {kRapMechanism, kAllZeroMechanism};
  std::vector<ResultRow> rows;
  const auto summary =
      RunGrid(config, data, [&](const ResultRow& row) { rows.push_back(row); });
  if (summary.size() != 1 || !summary[0].mean_err_future) {
    return {false, "no RAP summary row"};
  }
  const SummaryRow& best = summary[0];
  const double zero = MeanErr(rows, kAllZeroMechanism, true);
  return {ErrorRows(rows) == 0 && *best.mean_err_future < zero,
          Format("RAP at best present error (T=%zu, K=%s): err_F %.4f vs All-0 "
                 "%.4f, %zu trials",
                 best.rounds, FormatPerRound(best.per_round).c_str(),
                 *best.mean_err_future, zero, kTrials)};
}

Outcome ScaleStreaming() {
  std::vector<size_t> cards(44, 3);
  cards.insert(cards.end(), {1074, 1074, 1074, 1073});
  const Schema schema = testing::MakeSchema(cards);
  const Dataset data = testing::MakeRandomDataset(schema, 42535, 13);
  Rng rng = MakeRng(13);
  Workload workload;
  workload.thresholds.push_back(MakeThreshold(1, {0, 1, 44, 45}));
  while (workload.thresholds.size() < 64) {
    std::vector<size_t> features(44);
    std::iota(features.begin(), features.end(), 0);
    std::shuffle(features.begin(), features.end(), rng);
    features.resize(4);
    workload.thresholds.push_back(MakeThreshold(1, features));
  }
  const uint64_t m = ConsistentQueryCount(workload, schema);
  const size_t cap = kDefaultBatchCap;

  const auto truth_start = std::chrono::steady_clock::now();
  double truth_checksum = 0.0;
  const StreamStats truth_stats = StreamTrueAnswers(
      data, workload,
      [&](const AnswerBatch& batch) {
        for (double a : batch.answers) truth_checksum += a;
      },
      cap);
  const double truth_secs = Seconds(truth_start);

  RelaxedDataset synthetic = InitRelaxed(1000, schema, rng);
  ProjectRowsInPlace(synthetic);
  const auto surrogate_start = std::chrono::steady_clock::now();
  double surrogate_checksum = 0.0;
  const StreamStats surrogate_stats = StreamSurrogateAnswers(
      synthetic, schema, workload,
      [&](const AnswerBatch& batch) {
        for (double a : batch.answers) surrogate_checksum += a;
      },
      cap);
  const double surrogate_secs = Seconds(surrogate_start);
  const double throughput =
      static_cast<double>(surrogate_stats.queries) / surrogate_secs;

  // Each 1-of-4 threshold's answers sum to at least 1, so the checksums
  // confirm every query was produced.
  const bool complete = truth_stats.queries == m && surrogate_stats.queries == m;
  const size_t peak = std::max(truth_stats.peak_buffer, surrogate_stats.peak_buffer);
  const bool pass = schema.num_features() == 48 &&
                    schema.one_hot_width() == 4427 && m >= 10000000 &&
                    complete && peak <= cap && throughput >= kMinThroughput &&
                    std::isfinite(truth_checksum) &&
                    std::isfinite(surrogate_checksum);
  return {pass,
          Format("d=%zu, d'=%zu, |Q|=%llu, peak buffer %zu <= cap %zu, "
                 "true answers %.1f s, surrogate %.1f s (%.0f q/s, need >= %.0f)",
                 schema.num_features(), schema.one_hot_width(),
                 static_cast<unsigned long long>(m), peak, cap, truth_secs,
                 surrogate_secs, throughput, kMinThroughput)};
}

}  // namespace
}  // namespace rap

int main() {
  using rap::Outcome;
  const rap::Dataset planted =
      rap::testing::MakePlantedDataset(rap::kPlantedRows, rap::kPlantedSeed);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"EEDQ equivalence", rap::EedqEquivalence},
      {"definition-form agreement", rap::DefinitionForms},
      {"gradient check", rap::GradientCheck},
      {"sparsemax oracle", rap::SparsemaxOracle},
      {"zCDP conversion roundtrip", rap::ConversionRoundTrip},
      {"noise statistics", rap::NoiseStatistics},
      {"AS/OSAS equivalence", rap::SelectionEquivalence},
      {"budget ledger", rap::BudgetLedgerAndAccess},
      {"utility ordering", [&] { return rap::UtilityOrdering(planted); }},
      {"sparsity effect", [&] { return rap::SparsityEffect(planted); }},
      {"drift endpoints", rap::DriftEndpoints},
      {"future-error sanity", [&] { return rap::FutureErrorSanity(planted); }},
      {"scale/streaming", rap::ScaleStreaming},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += !outcome.pass;
    std::printf("%s %2zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
