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

// Differentiable surrogates for r-of-k threshold queries on the relaxed
// space [0,1]^d'.
//
// A query with target coordinates T and level r is evaluated as the
// inclusion-exclusion polynomial
//
//   phi(x) = sum_{i=r..k} (-1)^(i-r) C(i-1, i-r) sum_{|A|=i, A in T} prod_A x
//
// which agrees with the boolean predicate on one-hot rows. When r <= k/2 the
// complement form 1 - phi_{k-r+1}(1 - x) is used instead; it is the same
// polynomial with fewer terms.

#ifndef RAP_SURROGATE_H_
#define RAP_SURROGATE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rap/dataset.h"
#include "rap/workload.h"

namespace rap {

inline constexpr int kMaxThresholdWidth = 16;

// Coordinates into [0, d'), at most one per one-hot block, in threshold
// feature order.
struct FeatureIndexSet {
  std::vector<size_t> coords;
};

struct PolyThresholdSpec {
  std::vector<size_t> coords;
  int r = 1;
  bool negated = false;
  int effective_r = 1;

  int k() const { return static_cast<int>(coords.size()); }
};

// Applies the complement transform exactly when r <= k/2.
PolyThresholdSpec MakePolyThresholdSpec(std::vector<size_t> coords, int r);
PolyThresholdSpec MakePolyThresholdSpec(const ConsistentQuery& query,
                                        const Schema& schema);

FeatureIndexSet TargetCoordinates(const ConsistentQuery& query,
                                  const Schema& schema);

// c[i] = (-1)^(i-r) C(i-1, i-r) for r <= i <= k, zero below r.
const std::array<int64_t, kMaxThresholdWidth + 1>& InclusionExclusionCoefficients(
    int r, int k);

double ProductQuery(std::span<const double> row, std::span<const size_t> coords);

// prod_{T+} x_i * prod_{T-} (1 - x_i). Throws if the sets overlap.
double GeneralizedProduct(std::span<const double> row,
                          std::span<const size_t> plus,
                          std::span<const size_t> minus);

// Sum of generalized products over every partition (T+, T-) of `coords`
// with |T+| >= r.
double PolyThresholdPartitionSum(std::span<const double> row,
                                 std::span<const size_t> coords, int r);

// Inclusion-exclusion form evaluated directly at level r, enumerating each
// size-i combination lexicographically.
double PolyThresholdInclusionExclusion(std::span<const double> row,
                                       std::span<const size_t> coords, int r);

// Evaluates the spec, using the complement form when spec.negated.
double PolyThreshold(std::span<const double> row, const PolyThresholdSpec& spec);

// Value of the spec on `row` and, when `grad` is non-null, the partial
// derivative with respect to each coordinate (grad[j] for coords[j]).
// Uses elementary symmetric polynomials, O(k^2) for the value and O(k^3)
// for the gradient.
double EvaluatePolyKernel(const double* row, const PolyThresholdSpec& spec,
                          double* grad);

// Mean over rows of each query's surrogate.
std::vector<double> SurrogateAnswers(const RelaxedDataset& relaxed,
                                     std::span<const PolyThresholdSpec> queries);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // rows x width, same layout as the dataset
  std::vector<double> answers;   // surrogate answers per query
};

// loss = sum_q (mean_rows phi_q - target_q)^2 with its exact gradient.
LossGradient LossAndGradient(const RelaxedDataset& relaxed,
                             std::span<const PolyThresholdSpec> queries,
                             std::span<const double> targets);

// In-place variant for the optimizer loop; `gradient` and `answers` are
// resized as needed.
double LossAndGradientInto(const RelaxedDataset& relaxed,
                           std::span<const PolyThresholdSpec> queries,
                           std::span<const double> targets,
                           std::vector<double>& gradient,
                           std::vector<double>& answers);

}  // namespace rap

#endif  // RAP_SURROGATE_H_
