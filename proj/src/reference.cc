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

#include "rap/reference.h"

#include <algorithm>
#include <stdexcept>

#include "rap/projection.h"

namespace rap::reference {
namespace {

// d/dx_j of sum_{i>=r} c_i sum_{|A|=i} prod_A v, for each j.
std::vector<double> InclusionExclusionGradient(const std::vector<double>& v,
                                               int r) {
  const int k = static_cast<int>(v.size());
  const auto& coeff = InclusionExclusionCoefficients(r, k);
  std::vector<double> grad(v.size(), 0.0);
  for (uint32_t mask = 1; mask < (1u << k); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size < r) continue;
    for (int j = 0; j < k; ++j) {
      if (!(mask >> j & 1u)) continue;
      double prod = static_cast<double>(coeff[size]);
      for (int i = 0; i < k; ++i) {
        if (i != j && (mask >> i & 1u)) prod *= v[i];
      }
      grad[j] += prod;
    }
  }
  return grad;
}

}  // namespace

std::vector<double> TrueAnswers(const Dataset& dataset,
                                const Workload& workload) {
  const Schema& schema = dataset.schema();
  const QueryIndex index(workload, schema);
  const auto records = dataset.records();
  const size_t d = dataset.num_features();
  std::vector<double> out(index.size());
  for (uint64_t q = 0; q < index.size(); ++q) {
    const ConsistentQuery query = index.At(q);
    uint64_t count = 0;
    for (size_t i = 0; i < dataset.size(); ++i) {
      count += EvaluatePredicate(records.subspan(i * d, d), query);
    }
    out[q] = static_cast<double>(count) / static_cast<double>(dataset.size());
  }
  return out;
}

std::vector<double> SurrogateAnswers(
    const RelaxedDataset& relaxed, std::span<const PolyThresholdSpec> queries) {
  std::vector<double> out(queries.size(), 0.0);
  for (size_t q = 0; q < queries.size(); ++q) {
    double sum = 0.0;
    for (size_t i = 0; i < relaxed.rows(); ++i) {
      sum += PolyThreshold(relaxed.row(i), queries[q]);
    }
    out[q] = sum / static_cast<double>(relaxed.rows());
  }
  return out;
}

std::vector<double> WorkloadSurrogateAnswers(const RelaxedDataset& relaxed,
                                             const Schema& schema,
                                             const Workload& workload) {
  const QueryIndex index(workload, schema);
  std::vector<PolyThresholdSpec> specs;
  specs.reserve(index.size());
  for (uint64_t q = 0; q < index.size(); ++q) {
    specs.push_back(MakePolyThresholdSpec(index.At(q), schema));
  }
  return reference::SurrogateAnswers(relaxed, specs);
}

std::vector<double> PolyThresholdGradient(std::span<const double> row,
                                          const PolyThresholdSpec& spec) {
  std::vector<double> v(spec.coords.size());
  for (size_t j = 0; j < v.size(); ++j) {
    v[j] = spec.negated ? 1.0 - row[spec.coords[j]] : row[spec.coords[j]];
  }
  // The complement form 1 - P(1 - x) has derivative P'(1 - x).
  return InclusionExclusionGradient(v, spec.negated ? spec.effective_r : spec.r);
}

LossGradient LossAndGradient(const RelaxedDataset& relaxed,
                             std::span<const PolyThresholdSpec> queries,
                             std::span<const double> targets) {
  if (queries.size() != targets.size()) {
    throw std::invalid_argument("queries and targets differ in length");
  }
  LossGradient out;
  out.answers = reference::SurrogateAnswers(relaxed, queries);
  out.gradient.assign(relaxed.values().size(), 0.0);
  const size_t width = relaxed.layout().width;
  const double n = static_cast<double>(relaxed.rows());
  for (size_t q = 0; q < queries.size(); ++q) {
    const double diff = out.answers[q] - targets[q];
    out.loss += diff * diff;
    for (size_t i = 0; i < relaxed.rows(); ++i) {
      const auto g = PolyThresholdGradient(relaxed.row(i), queries[q]);
      for (size_t j = 0; j < g.size(); ++j) {
        out.gradient[i * width + queries[q].coords[j]] += 2.0 * diff * g[j] / n;
      }
    }
  }
  return out;
}

void ProjectRowsInPlace(RelaxedDataset& relaxed) {
  const BlockLayout& layout = relaxed.layout();
  for (size_t i = 0; i < relaxed.rows(); ++i) {
    const std::span<double> row = relaxed.row(i);
    for (size_t b = 0; b < layout.sizes.size(); ++b) {
      const auto block = row.subspan(layout.offsets[b], layout.sizes[b]);
      const std::vector<double> projected = Sparsemax(block);
      std::copy(projected.begin(), projected.end(), block.begin());
    }
  }
}

}  // namespace rap::reference
