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

// Per-threshold streaming evaluation of exact and surrogate answers.
//
// A threshold's consistent queries are produced in contiguous batches of at
// most `batch_cap` answers. A batch fixes the leading target digits, spans a
// range of one "pivot" digit and covers every value of the digits after it.
// Both evaluators expand the inclusion-exclusion polynomial around the fixed
// digits, so memory never scales with (queries x rows).

#ifndef RAP_THRESHOLD_EVAL_H_
#define RAP_THRESHOLD_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rap/dataset.h"
#include "rap/workload.h"

namespace rap {

struct BatchPlan {
  size_t pivot = 0;    // digits [0, pivot) are fixed within a batch
  size_t chunk = 1;    // pivot-digit values per batch
  uint64_t inner = 1;  // product of cardinalities after the pivot
  uint64_t total = 1;  // queries in the threshold

  size_t max_batch() const { return static_cast<size_t>(chunk * inner); }
};

BatchPlan PlanBatches(std::span<const size_t> cardinalities, size_t batch_cap);

struct AnswerBatch {
  size_t threshold = 0;
  uint64_t offset = 0;  // global query index of answers[0]
  std::span<const double> answers;
};

struct StreamStats {
  uint64_t queries = 0;
  size_t batches = 0;
  size_t peak_buffer = 0;  // largest answer batch held at once
};

using BatchSink = std::function<void(const AnswerBatch&)>;

// Exact normalized counts. The answers are (integer count) / n.
StreamStats StreamTrueAnswers(const Dataset& dataset, const Workload& workload,
                              const BatchSink& sink,
                              size_t batch_cap = kDefaultBatchCap);

// Mean over rows of the surrogate polynomial for every consistent query.
StreamStats StreamSurrogateAnswers(const RelaxedDataset& relaxed,
                                   const Schema& schema,
                                   const Workload& workload,
                                   const BatchSink& sink,
                                   size_t batch_cap = kDefaultBatchCap);

std::vector<double> ThresholdTrueAnswers(const Dataset& dataset,
                                         const Threshold& threshold);
std::vector<double> ThresholdSurrogateAnswers(const RelaxedDataset& relaxed,
                                              const Schema& schema,
                                              const Threshold& threshold);

// Collects a whole workload into one vector (length m).
std::vector<double> WorkloadSurrogateAnswers(
    const RelaxedDataset& relaxed, const Schema& schema,
    const Workload& workload, size_t batch_cap = kDefaultBatchCap);

}  // namespace rap

#endif  // RAP_THRESHOLD_EVAL_H_
