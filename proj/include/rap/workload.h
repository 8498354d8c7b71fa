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

// r-of-k thresholds, workloads and the implicit enumeration of their
// consistent queries.
//
// Query enumeration order is fixed: thresholds in workload order, and within a
// threshold the target tuples in mixed-radix order with the last feature of
// the threshold varying fastest.

#ifndef RAP_WORKLOAD_H_
#define RAP_WORKLOAD_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rap/dataset.h"
#include "rap/random.h"

namespace rap {

// "At least r of the k features in `features` match the target."
struct Threshold {
  int r = 1;
  std::vector<size_t> features;  // distinct, ascending

  int k() const { return static_cast<int>(features.size()); }

  friend bool operator==(const Threshold&, const Threshold&) = default;
};

// Sorts the feature set and validates 1 <= r <= k with distinct features.
Threshold MakeThreshold(int r, std::vector<size_t> features);

// Throws if any feature index is outside the schema.
void ValidateThreshold(const Threshold& threshold, const Schema& schema);

struct Workload {
  std::vector<Threshold> thresholds;
};

void ValidateWorkload(const Workload& workload, const Schema& schema);

struct ConsistentQuery {
  Threshold threshold;
  std::vector<Category> target;  // one value per feature in threshold
};

// Product of the threshold's feature cardinalities. Throws
// std::overflow_error when the count does not fit in 64 bits.
uint64_t ThresholdQueryCount(const Threshold& threshold, const Schema& schema);
uint64_t ConsistentQueryCount(const Workload& workload, const Schema& schema);

// Random access into the canonical enumeration of a workload's queries.
class QueryIndex {
 public:
  QueryIndex(const Workload& workload, const Schema& schema);

  uint64_t size() const { return offsets_.back(); }
  size_t num_thresholds() const { return offsets_.size() - 1; }
  // Global index of the first query of threshold `t`.
  uint64_t threshold_offset(size_t t) const { return offsets_[t]; }
  uint64_t threshold_count(size_t t) const {
    return offsets_[t + 1] - offsets_[t];
  }

  // Threshold that owns global `index`.
  size_t ThresholdOf(uint64_t index) const;
  ConsistentQuery At(uint64_t index) const;
  uint64_t IndexOf(size_t threshold, std::span<const Category> target) const;

  const Workload& workload() const { return *workload_; }
  const Schema& schema() const { return *schema_; }

 private:
  const Workload* workload_;
  const Schema* schema_;
  std::vector<uint64_t> offsets_;
};

ConsistentQuery QueryAt(const Workload& workload, const Schema& schema,
                        uint64_t index);

// 1 iff at least r of the threshold's features match the target.
bool EvaluatePredicate(std::span<const Category> record,
                       const ConsistentQuery& query);

using AnswerVector = std::vector<double>;

// Peak per-threshold answer buffer is bounded by `batch_cap` queries.
inline constexpr size_t kDefaultBatchCap = size_t{1} << 20;

// Exact normalized counts for every consistent query, evaluated one
// threshold at a time.
AnswerVector TrueAnswers(const Dataset& dataset, const Workload& workload,
                         size_t batch_cap = kDefaultBatchCap);

// Distinct feature sets drawn uniformly without replacement.
Workload SampleUniformWorkload(int r, int k, size_t size, const Schema& schema,
                               Rng& rng);

// [{"r": 2, "k": 3, "features": [0, 4, 7]}, ...]
std::string WorkloadToJson(const Workload& workload);
Workload WorkloadFromJson(std::string_view json);
void SaveWorkload(const std::string& path, const Workload& workload);
Workload LoadWorkload(const std::string& path);

// C(n, k) saturating at UINT64_MAX.
uint64_t Binomial(uint64_t n, uint64_t k);

}  // namespace rap

#endif  // RAP_WORKLOAD_H_
