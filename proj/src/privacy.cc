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

#include "rap/privacy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rap {
namespace {

void CheckNonEmpty(const ErrorGapVector& gaps) {
  if (gaps.gaps.empty()) throw std::invalid_argument("gap vector is empty");
  if (gaps.gaps.size() != gaps.indices.size()) {
    throw std::invalid_argument("gap vector and index list differ in length");
  }
}

void CheckBudget(size_t n, ZcdpBudget budget) {
  if (n == 0) throw std::invalid_argument("dataset size must be positive");
  if (!(budget.rho > 0.0)) throw std::invalid_argument("rho must be positive");
}

}  // namespace

void ValidateDpParams(const DpParams& params) {
  if (!std::isfinite(params.epsilon) || !std::isfinite(params.delta)) {
    throw std::invalid_argument("privacy parameters must be finite");
  }
  if (!(params.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(params.delta > 0.0 && params.delta < 1.0)) {
    throw std::invalid_argument("delta must be in (0, 1)");
  }
}

ZcdpBudget EpsDeltaToRho(const DpParams& params) {
  ValidateDpParams(params);
  const double log_inv_delta = -std::log(params.delta);
  const double root_gap = params.epsilon / (std::sqrt(log_inv_delta + params.epsilon) +
                                            std::sqrt(log_inv_delta));
  return ZcdpBudget{root_gap * root_gap};
}

double RhoToEps(ZcdpBudget budget, double delta) {
  if (!(budget.rho >= 0.0) || !(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("invalid rho or delta");
  }
  return budget.rho + 2.0 * std::sqrt(budget.rho * -std::log(delta));
}

double GaussianVariance(size_t n, ZcdpBudget budget) {
  CheckBudget(n, budget);
  const double nn = static_cast<double>(n);
  return 1.0 / (2.0 * nn * nn * budget.rho);
}

double GaussianMechanism(double true_value, size_t n, ZcdpBudget budget,
                         Rng& rng) {
  return true_value + std::sqrt(GaussianVariance(n, budget)) * StandardNormal(rng);
}

double GumbelFromUniform(double u, double scale) {
  return -scale * std::log(-std::log(u));
}

double GumbelSample(double scale, Rng& rng) {
  if (!(scale > 0.0)) throw std::invalid_argument("Gumbel scale must be > 0");
  return GumbelFromUniform(UniformOpen01(rng), scale);
}

double ReportNoisyMaxScale(size_t n, ZcdpBudget budget) {
  CheckBudget(n, budget);
  const double nn = static_cast<double>(n);
  return 1.0 / std::sqrt(2.0 * budget.rho * nn * nn);
}

uint64_t ReportNoisyMax(const ErrorGapVector& gaps, size_t n, ZcdpBudget budget,
                        Rng& rng) {
  CheckNonEmpty(gaps);
  const double scale = ReportNoisyMaxScale(n, budget);
  size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < gaps.size(); ++i) {
    const double noisy = gaps.gaps[i] + GumbelSample(scale, rng);
    if (noisy > best_value ||
        (noisy == best_value && gaps.indices[i] < gaps.indices[best])) {
      best = i;
      best_value = noisy;
    }
  }
  return gaps.indices[best];
}

std::vector<uint64_t> OneshotTopK(const ErrorGapVector& gaps, size_t k,
                                  size_t n, ZcdpBudget budget, Rng& rng) {
  CheckNonEmpty(gaps);
  if (k == 0 || k > gaps.size()) {
    throw std::logic_error("top-K requires 1 <= K <= number of gaps");
  }
  CheckBudget(n, budget);
  const double nn = static_cast<double>(n);
  const double scale =
      std::sqrt(static_cast<double>(k) / (2.0 * budget.rho * nn * nn));
  std::vector<double> noisy(gaps.size());
  for (size_t i = 0; i < gaps.size(); ++i) {
    noisy[i] = gaps.gaps[i] + GumbelSample(scale, rng);
  }
  std::vector<size_t> order(gaps.size());
  std::iota(order.begin(), order.end(), 0);
  auto greater = [&](size_t a, size_t b) {
    if (noisy[a] != noisy[b]) return noisy[a] > noisy[b];
    return gaps.indices[a] < gaps.indices[b];
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), greater);
  std::vector<uint64_t> selected(k);
  for (size_t i = 0; i < k; ++i) selected[i] = gaps.indices[order[i]];
  return selected;
}

void BudgetLedger::Record(std::string mechanism, double rho_each,
                          uint64_t invocations) {
  if (!(rho_each >= 0.0)) throw std::invalid_argument("rho must be >= 0");
  if (invocations == 0) return;
  entries_.push_back({std::move(mechanism), rho_each, invocations});
}

double BudgetLedger::Total() const {
  double sum = 0.0;
  double compensation = 0.0;
  for (const auto& e : entries_) {
    const double x = e.total();
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      compensation += (sum - t) + x;
    } else {
      compensation += (x - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

void BudgetLedger::CheckComposition(double expected, double tolerance) const {
  const double total = Total();
  if (std::abs(total - expected) > tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "budget ledger total " << total << " differs from " << expected;
    throw std::logic_error(msg.str());
  }
}

}  // namespace rap
