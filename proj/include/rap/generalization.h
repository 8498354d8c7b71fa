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

// Feature distributions, drift, threshold sampling and future error for the
// partial-knowledge setting.

#ifndef RAP_GENERALIZATION_H_
#define RAP_GENERALIZATION_H_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "rap/dataset.h"
#include "rap/random.h"
#include "rap/workload.h"

namespace rap {

struct FeatureDistribution {
  std::vector<double> probs;

  size_t size() const { return probs.size(); }
};

// Throws std::invalid_argument unless entries are non-negative and sum to 1
// within 1e-12.
void ValidateDistribution(const FeatureDistribution& dist);

enum class DistributionKind { kUniform, kZipf, kGeometric };

struct DistributionSpec {
  DistributionKind kind = DistributionKind::kUniform;
  double zipf_s = 1.0;
  double geometric_p = 0.5;
};

std::string ToString(DistributionKind kind);
DistributionKind ParseDistributionKind(const std::string& text);

// Masses descend with feature index.
FeatureDistribution MakeDistribution(const DistributionSpec& spec, size_t d);

struct DriftParams {
  double gamma = 0.0;
};

// Reassigns the masses of a descending distribution by ranking the keys
// (1 - 2g)(d - i)/(d - 1) + (1 - |1 - 2g|) u_i. Throws if `historical` is not
// sorted in descending order.
FeatureDistribution Drift(const FeatureDistribution& historical,
                          DriftParams params, Rng& rng);

double TotalVariation(const FeatureDistribution& p,
                      const FeatureDistribution& q);

struct ThresholdDistributionSpec {
  FeatureDistribution features;
  int r = 1;
  size_t k = 1;
};

void ValidateThresholdSpec(const ThresholdDistributionSpec& spec);

// k features drawn one at a time without replacement, each draw proportional
// to the remaining mass.
Threshold SampleThreshold(const ThresholdDistributionSpec& spec, Rng& rng);

// Independent draws; duplicates are kept.
Workload SampleIidWorkload(const ThresholdDistributionSpec& spec, size_t size,
                           Rng& rng);

// Answers for every consistent query of one threshold, in canonical order.
using ThresholdAnswerer =
    std::function<std::vector<double>(const Threshold& threshold)>;

ThresholdAnswerer SyntheticAnswerer(const RelaxedDataset& synthetic,
                                    const Schema& schema);
ThresholdAnswerer ZeroAnswerer(const Schema& schema);
ThresholdAnswerer ExactAnswerer(const Dataset& dataset);

struct FutureError {
  double mean = 0.0;
  double halfwidth95 = 0.0;
  size_t thresholds = 0;
};

// Mean and normal-approximation 95% half-width of a list of per-threshold
// errors.
FutureError SummarizeErrors(const std::vector<double>& errors);

// A fixed future workload with its exact answers cached; scores any number of
// answerers.
class FutureWorkload {
 public:
  FutureWorkload(const Dataset& dataset, Workload workload);

  const Workload& workload() const { return workload_; }

  // Per-threshold max |truth - clamp(answer)|.
  std::vector<double> Errors(const ThresholdAnswerer& answerer) const;
  FutureError Evaluate(const ThresholdAnswerer& answerer) const;

 private:
  Workload workload_;
  std::vector<std::vector<double>> truth_;
};

// Samples `num_future` thresholds from `future_spec` and scores `answerer`
// on them. Requires num_future >= 2.
FutureError EstimateFutureError(const ThresholdAnswerer& answerer,
                                const Dataset& dataset,
                                const ThresholdDistributionSpec& future_spec,
                                size_t num_future, Rng& rng);

}  // namespace rap

#endif  // RAP_GENERALIZATION_H_
