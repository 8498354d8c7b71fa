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

#include "rap/workload.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rap/threshold_eval.h"

namespace rap {

Threshold MakeThreshold(int r, std::vector<size_t> features) {
  std::sort(features.begin(), features.end());
  if (std::adjacent_find(features.begin(), features.end()) != features.end()) {
    throw std::invalid_argument("threshold features must be distinct");
  }
  const int k = static_cast<int>(features.size());
  if (k < 1 || r < 1 || r > k) {
    throw std::invalid_argument("threshold requires 1 <= r <= k, got r=" +
                                std::to_string(r) + " k=" + std::to_string(k));
  }
  return Threshold{r, std::move(features)};
}

void ValidateThreshold(const Threshold& threshold, const Schema& schema) {
  const int k = threshold.k();
  if (k < 1 || threshold.r < 1 || threshold.r > k) {
    throw std::invalid_argument("threshold requires 1 <= r <= k");
  }
  for (size_t i = 0; i < threshold.features.size(); ++i) {
    if (threshold.features[i] >= schema.num_features()) {
      throw std::invalid_argument("threshold feature " +
                                  std::to_string(threshold.features[i]) +
                                  " outside schema");
    }
    if (i > 0 && threshold.features[i] <= threshold.features[i - 1]) {
      throw std::invalid_argument(
          "threshold features must be distinct and ascending");
    }
  }
}

void ValidateWorkload(const Workload& workload, const Schema& schema) {
  if (workload.thresholds.empty()) {
    throw std::invalid_argument("workload is empty");
  }
  for (const auto& t : workload.thresholds) ValidateThreshold(t, schema);
}

uint64_t ThresholdQueryCount(const Threshold& threshold, const Schema& schema) {
  uint64_t count = 1;
  for (size_t f : threshold.features) {
    const uint64_t t = schema.cardinality(f);
    if (count > std::numeric_limits<uint64_t>::max() / t) {
      throw std::overflow_error("consistent query count overflows 64 bits");
    }
    count *= t;
  }
  return count;
}

uint64_t ConsistentQueryCount(const Workload& workload, const Schema& schema) {
  uint64_t total = 0;
  for (const auto& t : workload.thresholds) {
    const uint64_t c = ThresholdQueryCount(t, schema);
    if (total > std::numeric_limits<uint64_t>::max() - c) {
      throw std::overflow_error("consistent query count overflows 64 bits");
    }
    total += c;
  }
  return total;
}

QueryIndex::QueryIndex(const Workload& workload, const Schema& schema)
    : workload_(&workload), schema_(&schema) {
  ValidateWorkload(workload, schema);
  offsets_.reserve(workload.thresholds.size() + 1);
  offsets_.push_back(0);
  for (const auto& t : workload.thresholds) {
    const uint64_t c = ThresholdQueryCount(t, schema);
    if (offsets_.back() > std::numeric_limits<uint64_t>::max() - c) {
      throw std::overflow_error("consistent query count overflows 64 bits");
    }
    offsets_.push_back(offsets_.back() + c);
  }
}

size_t QueryIndex::ThresholdOf(uint64_t index) const {
  if (index >= size()) {
    throw std::out_of_range("query index " + std::to_string(index) +
                            " out of range");
  }
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  return static_cast<size_t>(std::distance(offsets_.begin(), it) - 1);
}

ConsistentQuery QueryIndex::At(uint64_t index) const {
  const size_t t = ThresholdOf(index);
  const Threshold& threshold = workload_->thresholds[t];
  uint64_t local = index - offsets_[t];
  ConsistentQuery query{threshold, std::vector<Category>(threshold.k())};
  for (int j = threshold.k() - 1; j >= 0; --j) {
    const uint64_t radix = schema_->cardinality(threshold.features[j]);
    query.target[j] = static_cast<Category>(local % radix);
    local /= radix;
  }
  return query;
}

uint64_t QueryIndex::IndexOf(size_t threshold,
                             std::span<const Category> target) const {
  const Threshold& th = workload_->thresholds.at(threshold);
  if (target.size() != th.features.size()) {
    throw std::invalid_argument("target length does not match threshold");
  }
  uint64_t local = 0;
  for (size_t j = 0; j < target.size(); ++j) {
    const uint64_t radix = schema_->cardinality(th.features[j]);
    if (target[j] >= radix) throw std::out_of_range("target value out of range");
    local = local * radix + target[j];
  }
  return offsets_[threshold] + local;
}

ConsistentQuery QueryAt(const Workload& workload, const Schema& schema,
                        uint64_t index) {
  return QueryIndex(workload, schema).At(index);
}

bool EvaluatePredicate(std::span<const Category> record,
                       const ConsistentQuery& query) {
  int matches = 0;
  const auto& features = query.threshold.features;
  for (size_t j = 0; j < features.size(); ++j) {
    matches += record[features[j]] == query.target[j];
  }
  return matches >= query.threshold.r;
}

AnswerVector TrueAnswers(const Dataset& dataset, const Workload& workload,
                         size_t batch_cap) {
  const uint64_t m = ConsistentQueryCount(workload, dataset.schema());
  AnswerVector answers(m);
  StreamTrueAnswers(
      dataset, workload,
      [&](const AnswerBatch& batch) {
        std::copy(batch.answers.begin(), batch.answers.end(),
                  answers.begin() + batch.offset);
      },
      batch_cap);
  return answers;
}

uint64_t Binomial(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<uint64_t>::max()) {
      return std::numeric_limits<uint64_t>::max();
    }
  }
  return static_cast<uint64_t>(result);
}

namespace {

constexpr uint64_t kEnumerateSubsetsLimit = 1u << 21;

// All k-subsets of [0, d) in lexicographic order.
std::vector<std::vector<size_t>> AllSubsets(size_t d, size_t k) {
  std::vector<std::vector<size_t>> out;
  std::vector<size_t> c(k);
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    out.push_back(c);
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && c[i] == d - k + i) --i;
    if (i < 0) break;
    ++c[i];
    for (size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

}  // namespace

Workload SampleUniformWorkload(int r, int k, size_t size, const Schema& schema,
                               Rng& rng) {
  const size_t d = schema.num_features();
  if (k < 1 || static_cast<size_t>(k) > d || r < 1 || r > k) {
    throw std::invalid_argument("invalid (r, k) for schema");
  }
  const uint64_t available = Binomial(d, k);
  if (size > available) {
    throw std::invalid_argument("workload size " + std::to_string(size) +
                                " exceeds the " + std::to_string(available) +
                                " distinct feature sets");
  }
  Workload workload;
  workload.thresholds.reserve(size);
  if (available <= kEnumerateSubsetsLimit) {
    auto subsets = AllSubsets(d, k);
    // Partial Fisher-Yates: the first `size` slots become a uniform sample.
    for (size_t i = 0; i < size; ++i) {
      const size_t j = i + static_cast<size_t>(Uniform01(rng) *
                                               static_cast<double>(subsets.size() - i));
      std::swap(subsets[i], subsets[std::min(j, subsets.size() - 1)]);
      workload.thresholds.push_back(Threshold{r, subsets[i]});
    }
    return workload;
  }
  std::set<std::vector<size_t>> seen;
  std::vector<size_t> pool(d);
  while (workload.thresholds.size() < size) {
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
      const size_t j = i + static_cast<size_t>(Uniform01(rng) *
                                               static_cast<double>(d - i));
      std::swap(pool[i], pool[std::min(j, d - 1)]);
    }
    std::vector<size_t> features(pool.begin(), pool.begin() + k);
    std::sort(features.begin(), features.end());
    if (seen.insert(features).second) {
      workload.thresholds.push_back(Threshold{r, std::move(features)});
    }
  }
  return workload;
}

std::string WorkloadToJson(const Workload& workload) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : workload.thresholds) {
    out.push_back({{"r", t.r}, {"k", t.k()}, {"features", t.features}});
  }
  return out.dump(2);
}

Workload WorkloadFromJson(std::string_view json) {
  const auto parsed = nlohmann::json::parse(json);
  Workload workload;
  for (const auto& entry : parsed) {
    auto threshold = MakeThreshold(entry.at("r").get<int>(),
                                   entry.at("features").get<std::vector<size_t>>());
    if (entry.contains("k") && entry.at("k").get<int>() != threshold.k()) {
      throw std::invalid_argument("threshold k does not match feature count");
    }
    workload.thresholds.push_back(std::move(threshold));
  }
  return workload;
}

void SaveWorkload(const std::string& path, const Workload& workload) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << WorkloadToJson(workload) << "\n";
}

Workload LoadWorkload(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return WorkloadFromJson(buffer.str());
}

}  // namespace rap
