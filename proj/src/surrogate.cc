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

#include "rap/surrogate.h"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include <omp.h>

namespace rap {
namespace {

using CoefficientRow = std::array<int64_t, kMaxThresholdWidth + 1>;

struct CoefficientTable {
  // rows[k][r]
  std::array<std::array<CoefficientRow, kMaxThresholdWidth + 1>,
             kMaxThresholdWidth + 1>
      rows{};

  CoefficientTable() {
    for (int k = 1; k <= kMaxThresholdWidth; ++k) {
      for (int r = 1; r <= k; ++r) {
        for (int i = r; i <= k; ++i) {
          const auto c = static_cast<int64_t>(Binomial(i - 1, i - r));
          rows[k][r][i] = ((i - r) % 2 == 0) ? c : -c;
        }
      }
    }
  }
};

void CheckWidth(int k) {
  if (k < 1 || k > kMaxThresholdWidth) {
    throw std::invalid_argument("threshold width must be in [1, " +
                                std::to_string(kMaxThresholdWidth) + "]");
  }
}

// Inclusion-exclusion sum over explicit values v[0..k), enumerating each
// size-i combination in lexicographic order.
double InclusionExclusionOnValues(const double* v, int k, int r) {
  const auto& c = InclusionExclusionCoefficients(r, k);
  std::array<int, kMaxThresholdWidth> idx{};
  double total = 0.0;
  for (int i = r; i <= k; ++i) {
    for (int j = 0; j < i; ++j) idx[j] = j;
    double level = 0.0;
    while (true) {
      double prod = 1.0;
      for (int j = 0; j < i; ++j) prod *= v[idx[j]];
      level += prod;
      int p = i - 1;
      while (p >= 0 && idx[p] == k - i + p) --p;
      if (p < 0) break;
      ++idx[p];
      for (int j = p + 1; j < i; ++j) idx[j] = idx[j - 1] + 1;
    }
    total += static_cast<double>(c[i]) * level;
  }
  return total;
}

// Elementary symmetric polynomials e[0..n] of v[0..n).
inline void ElementarySymmetric(const double* v, int n, double* e) {
  e[0] = 1.0;
  for (int i = 1; i <= n; ++i) e[i] = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i >= 1; --i) e[i] += v[j] * e[i - 1];
  }
}

}  // namespace

const CoefficientRow& InclusionExclusionCoefficients(int r, int k) {
  static const CoefficientTable table;
  CheckWidth(k);
  if (r < 1 || r > k) throw std::invalid_argument("requires 1 <= r <= k");
  return table.rows[k][r];
}

PolyThresholdSpec MakePolyThresholdSpec(std::vector<size_t> coords, int r) {
  const int k = static_cast<int>(coords.size());
  CheckWidth(k);
  if (r < 1 || r > k) throw std::invalid_argument("requires 1 <= r <= k");
  PolyThresholdSpec spec;
  spec.coords = std::move(coords);
  spec.r = r;
  spec.negated = 2 * r <= k;
  spec.effective_r = spec.negated ? k - r + 1 : r;
  return spec;
}

FeatureIndexSet TargetCoordinates(const ConsistentQuery& query,
                                  const Schema& schema) {
  FeatureIndexSet set;
  set.coords.reserve(query.target.size());
  for (size_t j = 0; j < query.target.size(); ++j) {
    set.coords.push_back(schema.block_offset(query.threshold.features[j]) +
                         query.target[j]);
  }
  return set;
}

PolyThresholdSpec MakePolyThresholdSpec(const ConsistentQuery& query,
                                        const Schema& schema) {
  return MakePolyThresholdSpec(TargetCoordinates(query, schema).coords,
                               query.threshold.r);
}

double ProductQuery(std::span<const double> row, std::span<const size_t> coords) {
  double prod = 1.0;
  for (size_t c : coords) prod *= row[c];
  return prod;
}

double GeneralizedProduct(std::span<const double> row,
                          std::span<const size_t> plus,
                          std::span<const size_t> minus) {
  for (size_t a : plus) {
    if (std::find(minus.begin(), minus.end(), a) != minus.end()) {
      throw std::invalid_argument("generalized product sets overlap");
    }
  }
  double prod = 1.0;
  for (size_t c : plus) prod *= row[c];
  for (size_t c : minus) prod *= 1.0 - row[c];
  return prod;
}

double PolyThresholdPartitionSum(std::span<const double> row,
                                 std::span<const size_t> coords, int r) {
  const int k = static_cast<int>(coords.size());
  CheckWidth(k);
  double total = 0.0;
  for (uint32_t mask = 0; mask < (1u << k); ++mask) {
    if (std::popcount(mask) < r) continue;
    double prod = 1.0;
    for (int j = 0; j < k; ++j) {
      const double x = row[coords[j]];
      prod *= (mask >> j) & 1u ? x : 1.0 - x;
    }
    total += prod;
  }
  return total;
}

double PolyThresholdInclusionExclusion(std::span<const double> row,
                                       std::span<const size_t> coords, int r) {
  const int k = static_cast<int>(coords.size());
  CheckWidth(k);
  std::array<double, kMaxThresholdWidth> v;
  for (int j = 0; j < k; ++j) v[j] = row[coords[j]];
  return InclusionExclusionOnValues(v.data(), k, r);
}

double PolyThreshold(std::span<const double> row, const PolyThresholdSpec& spec) {
  const int k = spec.k();
  CheckWidth(k);
  std::array<double, kMaxThresholdWidth> v;
  for (int j = 0; j < k; ++j) {
    const double x = row[spec.coords[j]];
    v[j] = spec.negated ? 1.0 - x : x;
  }
  const double p = InclusionExclusionOnValues(v.data(), k, spec.effective_r);
  return spec.negated ? 1.0 - p : p;
}

namespace {

// A query with its coefficients resolved, for the inner loops.
struct CompiledQuery {
  int k = 0;
  int r = 0;
  bool negated = false;
  const size_t* coords = nullptr;
  double c[kMaxThresholdWidth + 1] = {};
};

CompiledQuery CompileQuery(const PolyThresholdSpec& spec) {
  CompiledQuery q;
  q.k = spec.k();
  q.r = spec.effective_r;
  q.negated = spec.negated;
  q.coords = spec.coords.data();
  const auto& c = InclusionExclusionCoefficients(q.r, q.k);
  for (int i = 0; i <= q.k; ++i) q.c[i] = static_cast<double>(c[i]);
  return q;
}

std::vector<CompiledQuery> CompileQueries(
    std::span<const PolyThresholdSpec> queries) {
  std::vector<CompiledQuery> out;
  out.reserve(queries.size());
  for (const auto& spec : queries) out.push_back(CompileQuery(spec));
  return out;
}

template <int K>
double EvaluateFixed(const double* row, const CompiledQuery& q, double* grad) {
  constexpr int kCap = K > 0 ? K : kMaxThresholdWidth;
  const int k = K > 0 ? K : q.k;
  const int r = q.r;
  double v[kCap];
  for (int j = 0; j < k; ++j) {
    const double x = row[q.coords[j]];
    v[j] = q.negated ? 1.0 - x : x;
  }
  double p;
  if (r == k) {
    // Plain product; leave-one-out products via prefix/suffix scans.
    double prefix[kCap + 1];
    prefix[0] = 1.0;
    for (int j = 0; j < k; ++j) prefix[j + 1] = prefix[j] * v[j];
    p = prefix[k];
    if (grad) {
      double suffix = 1.0;
      for (int j = k - 1; j >= 0; --j) {
        grad[j] = prefix[j] * suffix;
        suffix *= v[j];
      }
    }
  } else {
    // Coefficients below r are zero, so the sums can run over every level.
    double e[kCap + 1];
    ElementarySymmetric(v, k, e);
    p = 0.0;
    for (int i = 1; i <= k; ++i) p += q.c[i] * e[i];
    if (grad) {
      double rest[kCap];
      double e_rest[kCap + 1];
      for (int j = 0; j < k; ++j) {
        int n = 0;
        for (int i = 0; i < k; ++i) {
          if (i != j) rest[n++] = v[i];
        }
        ElementarySymmetric(rest, k - 1, e_rest);
        double g = 0.0;
        for (int i = 1; i <= k; ++i) g += q.c[i] * e_rest[i - 1];
        grad[j] = g;
      }
    }
  }
  // d/dx of 1 - p(1 - x) is p'(1 - x): the two sign flips cancel.
  return q.negated ? 1.0 - p : p;
}

double EvaluateCompiled(const double* row, const CompiledQuery& q,
                        double* grad) {
  switch (q.k) {
    case 1:
      return EvaluateFixed<1>(row, q, grad);
    case 2:
      return EvaluateFixed<2>(row, q, grad);
    case 3:
      return EvaluateFixed<3>(row, q, grad);
    case 4:
      return EvaluateFixed<4>(row, q, grad);
    case 5:
      return EvaluateFixed<5>(row, q, grad);
    default:
      return EvaluateFixed<0>(row, q, grad);
  }
}

}  // namespace

double EvaluatePolyKernel(const double* row, const PolyThresholdSpec& spec,
                          double* grad) {
  return EvaluateCompiled(row, CompileQuery(spec), grad);
}

std::vector<double> SurrogateAnswers(const RelaxedDataset& relaxed,
                                     std::span<const PolyThresholdSpec> queries) {
  const size_t n = relaxed.rows();
  const auto values = relaxed.values();
  const size_t width = relaxed.width();
  std::vector<double> answers(queries.size());
  const std::vector<CompiledQuery> compiled = CompileQueries(queries);
  const auto count = static_cast<int64_t>(queries.size());
  constexpr size_t kRowTile = 32;
  std::vector<double> sums(queries.size(), 0.0);
  for (size_t begin = 0; begin < n; begin += kRowTile) {
    const size_t end = std::min(n, begin + kRowTile);
#pragma omp parallel for schedule(static)
    for (int64_t q = 0; q < count; ++q) {
      double sum = 0.0;
      for (size_t i = begin; i < end; ++i) {
        sum += EvaluateCompiled(values.data() + i * width, compiled[q], nullptr);
      }
      sums[q] += sum;
    }
  }
  for (size_t q = 0; q < queries.size(); ++q) {
    answers[q] = sums[q] / static_cast<double>(n);
  }
  return answers;
}

double LossAndGradientInto(const RelaxedDataset& relaxed,
                           std::span<const PolyThresholdSpec> queries,
                           std::span<const double> targets,
                           std::vector<double>& gradient,
                           std::vector<double>& answers) {
  if (queries.size() != targets.size()) {
    throw std::invalid_argument("queries and targets differ in length");
  }
  const size_t n = relaxed.rows();
  const size_t width = relaxed.width();
  const auto values = relaxed.values();
  answers = SurrogateAnswers(relaxed, queries);

  std::vector<double> weights(queries.size());
  double loss = 0.0;
  for (size_t q = 0; q < queries.size(); ++q) {
    const double residual = answers[q] - targets[q];
    loss += residual * residual;
    weights[q] = 2.0 * residual / static_cast<double>(n);
  }

  const std::vector<CompiledQuery> compiled = CompileQueries(queries);
  gradient.assign(n * width, 0.0);
  const auto rows = static_cast<int64_t>(n);
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < rows; ++i) {
    const double* row = values.data() + i * width;
    double* g_row = gradient.data() + i * width;
    double local[kMaxThresholdWidth];
    for (size_t q = 0; q < queries.size(); ++q) {
      if (weights[q] == 0.0) continue;
      const CompiledQuery& query = compiled[q];
      EvaluateCompiled(row, query, local);
      for (int j = 0; j < query.k; ++j) {
        g_row[query.coords[j]] += weights[q] * local[j];
      }
    }
  }
  return loss;
}

LossGradient LossAndGradient(const RelaxedDataset& relaxed,
                             std::span<const PolyThresholdSpec> queries,
                             std::span<const double> targets) {
  LossGradient out;
  out.loss = LossAndGradientInto(relaxed, queries, targets, out.gradient,
                                 out.answers);
  return out;
}

}  // namespace rap
