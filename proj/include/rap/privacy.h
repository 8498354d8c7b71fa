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

// zCDP accounting and the noise primitives: Gaussian mechanism, Gumbel
// report-noisy-max and one-shot top-K selection.

#ifndef RAP_PRIVACY_H_
#define RAP_PRIVACY_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rap/random.h"

namespace rap {

struct DpParams {
  double epsilon = 1.0;
  double delta = 1e-6;
};

struct ZcdpBudget {
  double rho = 0.0;
};

void ValidateDpParams(const DpParams& params);

// rho = eps + 2 (L - sqrt(L (eps + L))), L = ln(1/delta). Evaluated in the
// algebraically equal form (sqrt(L + eps) - sqrt(L))^2, which does not
// cancel for small eps.
ZcdpBudget EpsDeltaToRho(const DpParams& params);

// eps = rho + 2 sqrt(rho ln(1/delta)).
double RhoToEps(ZcdpBudget budget, double delta);

// sigma^2 = 1 / (2 n^2 rho).
double GaussianVariance(size_t n, ZcdpBudget budget);

// true_value + N(0, sigma^2). Not clamped.
double GaussianMechanism(double true_value, size_t n, ZcdpBudget budget,
                         Rng& rng);

// -scale * ln(-ln u).
double GumbelFromUniform(double u, double scale);
double GumbelSample(double scale, Rng& rng);

// Scale of the Gumbel noise for one report-noisy-max at `budget`:
// 1 / sqrt(2 rho n^2).
double ReportNoisyMaxScale(size_t n, ZcdpBudget budget);

// Gaps over not-yet-selected queries with their global query indices.
struct ErrorGapVector {
  std::vector<double> gaps;
  std::vector<uint64_t> indices;

  size_t size() const { return gaps.size(); }
};

// Global index of argmax_i gaps_i + Gumbel(1 / sqrt(2 rho n^2)). Ties go to
// the lowest global index.
uint64_t ReportNoisyMax(const ErrorGapVector& gaps, size_t n, ZcdpBudget budget,
                        Rng& rng);

// Global indices of the K largest gaps_i + Gumbel(sqrt(K / (2 rho n^2))), one
// draw per gap, where `budget` covers the whole selection. Returned in
// descending noisy order.
std::vector<uint64_t> OneshotTopK(const ErrorGapVector& gaps, size_t k,
                                  size_t n, ZcdpBudget budget, Rng& rng);

// Run-scoped record of every privacy expenditure.
class BudgetLedger {
 public:
  struct Entry {
    std::string mechanism;
    double rho_each = 0.0;
    uint64_t invocations = 0;

    double total() const { return rho_each * static_cast<double>(invocations); }
  };

  void Record(std::string mechanism, double rho_each, uint64_t invocations = 1);

  // Compensated sum of every entry.
  double Total() const;
  const std::vector<Entry>& entries() const { return entries_; }

  // Throws std::logic_error unless |Total() - expected| <= tolerance.
  void CheckComposition(double expected, double tolerance = 1e-12) const;

 private:
  std::vector<Entry> entries_;
};

}  // namespace rap

#endif  // RAP_PRIVACY_H_
