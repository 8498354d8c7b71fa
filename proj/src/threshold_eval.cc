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

#include "rap/threshold_eval.h"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>

#include <omp.h>

#include "rap/surrogate.h"

namespace rap {
namespace {

// Dense tiles are sized to stay cache resident while every row streams over
// them.
constexpr size_t kDenseTile = size_t{1} << 15;

struct ThresholdShape {
  std::vector<size_t> features;
  std::vector<size_t> cards;
  std::vector<size_t> offsets;  // one-hot block offsets
  int r = 1;
  int k = 1;
  std::array<int64_t, kMaxThresholdWidth + 1> coeff{};
};

ThresholdShape ShapeOf(const Threshold& threshold, const Schema& schema) {
  ThresholdShape shape;
  shape.features = threshold.features;
  shape.r = threshold.r;
  shape.k = threshold.k();
  for (size_t f : threshold.features) {
    shape.cards.push_back(schema.cardinality(f));
    shape.offsets.push_back(schema.block_offset(f));
  }
  shape.coeff = InclusionExclusionCoefficients(shape.r, shape.k);
  return shape;
}

struct Batch {
  std::vector<size_t> prefix;  // fixed digits [0, pivot)
  size_t start = 0;            // first pivot value
  size_t len = 0;              // pivot values in the batch
  uint64_t local_offset = 0;   // offset within the threshold
};

template <class F>
void ForEachBatch(std::span<const size_t> cards, const BatchPlan& plan, F&& f) {
  Batch batch;
  batch.prefix.assign(plan.pivot, 0);
  while (true) {
    for (size_t a = 0; a < cards[plan.pivot]; a += plan.chunk) {
      batch.start = a;
      batch.len = std::min(plan.chunk, cards[plan.pivot] - a);
      f(static_cast<const Batch&>(batch));
      batch.local_offset += batch.len * plan.inner;
    }
    int j = static_cast<int>(plan.pivot) - 1;
    while (j >= 0 && ++batch.prefix[j] == cards[j]) {
      batch.prefix[j] = 0;
      --j;
    }
    if (j < 0) break;
  }
}

// g[s] = sum_i c[i + s] * e_i(prefix values): the coefficient of every
// degree-s monomial in the free digits once the prefix is substituted.
void PrefixCoefficients(const ThresholdShape& shape, const double* e_prefix,
                        size_t pivot, double* g) {
  const size_t nfree = shape.k - pivot;
  for (size_t s = 0; s <= nfree; ++s) {
    double sum = 0.0;
    for (size_t i = 0; i <= pivot; ++i) {
      sum += static_cast<double>(shape.coeff[i + s]) * e_prefix[i];
    }
    g[s] = sum;
  }
}

struct Level {
  const double* values;  // block values starting at the first digit in range
  size_t len;
};

// Adds sum_B g[|B|] prod_{j in B} v_j(y_j) for every free-digit tuple y,
// using g'[s] = g[s] + v g[s + 1] one digit at a time.
void Expand(const Level* levels, int nlev, int level, const double* g,
            double*& out) {
  const Level& lv = levels[level];
  if (level == nlev - 1) {
    const double g0 = g[0];
    const double g1 = g[1];
    for (size_t y = 0; y < lv.len; ++y) out[y] += g0 + g1 * lv.values[y];
    out += lv.len;
    return;
  }
  const int glen = nlev - level;  // entries of the next level's g
  double next[kMaxThresholdWidth + 1];
  for (size_t y = 0; y < lv.len; ++y) {
    const double v = lv.values[y];
    for (int s = 0; s < glen; ++s) next[s] = g[s] + v * g[s + 1];
    Expand(levels, nlev, level + 1, next, out);
  }
}

void DenseBatch(const RelaxedDataset& relaxed, const ThresholdShape& shape,
                const BatchPlan& plan, const Batch& batch, double* out) {
  const size_t pivot = plan.pivot;
  const int nlev = shape.k - static_cast<int>(pivot);
  const size_t tile_len =
      std::max<size_t>(1, std::min<size_t>(batch.len, kDenseTile / plan.inner));
  const auto tiles = static_cast<int64_t>((batch.len + tile_len - 1) / tile_len);
  const size_t rows = relaxed.rows();

#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t t = 0; t < tiles; ++t) {
    const size_t first = batch.start + t * tile_len;
    const size_t len = std::min(tile_len, batch.start + batch.len - first);
    double* tile_out = out + (first - batch.start) * plan.inner;
    std::fill(tile_out, tile_out + len * plan.inner, 0.0);

    double u[kMaxThresholdWidth];
    double e[kMaxThresholdWidth + 1];
    double g[kMaxThresholdWidth + 1];
    Level levels[kMaxThresholdWidth];
    for (size_t i = 0; i < rows; ++i) {
      const double* row = relaxed.row(i).data();
      for (size_t j = 0; j < pivot; ++j) {
        u[j] = row[shape.offsets[j] + batch.prefix[j]];
      }
      e[0] = 1.0;
      for (size_t j = 1; j <= pivot; ++j) e[j] = 0.0;
      for (size_t j = 0; j < pivot; ++j) {
        for (size_t s = j + 1; s >= 1; --s) e[s] += u[j] * e[s - 1];
      }
      PrefixCoefficients(shape, e, pivot, g);
      levels[0] = {row + shape.offsets[pivot] + first, len};
      for (int l = 1; l < nlev; ++l) {
        levels[l] = {row + shape.offsets[pivot + l], shape.cards[pivot + l]};
      }
      double* cursor = tile_out;
      Expand(levels, nlev, 0, g, cursor);
    }
    for (size_t q = 0; q < len * plan.inner; ++q) tile_out[q] /= static_cast<double>(rows);
  }
}

void SparseBatch(std::span<const Category> records, size_t d, size_t n,
                 const ThresholdShape& shape, const BatchPlan& plan,
                 const Batch& batch, double* out) {
  const size_t pivot = plan.pivot;
  const int nfree = shape.k - static_cast<int>(pivot);
  std::vector<size_t> start(nfree), len(nfree);
  for (int l = 0; l < nfree; ++l) {
    start[l] = l == 0 ? batch.start : 0;
    len[l] = l == 0 ? batch.len : shape.cards[pivot + l];
  }

  // g[M][s] for M prefix matches: coefficient of a degree-s free monomial.
  std::vector<std::vector<int64_t>> g(pivot + 1,
                                      std::vector<int64_t>(nfree + 1, 0));
  for (size_t m = 0; m <= pivot; ++m) {
    for (int s = 0; s <= nfree; ++s) {
      int64_t sum = 0;
      for (size_t i = 0; i <= m; ++i) {
        sum += shape.coeff[i + s] * static_cast<int64_t>(Binomial(m, i));
      }
      g[m][s] = sum;
    }
  }

  const uint32_t masks = 1u << nfree;
  std::vector<std::vector<int64_t>> tables(masks);
  std::vector<std::vector<size_t>> strides(masks, std::vector<size_t>(nfree, 0));
  for (uint32_t mask = 0; mask < masks; ++mask) {
    size_t size = 1;
    for (int l = nfree - 1; l >= 0; --l) {
      if ((mask >> l) & 1u) {
        strides[mask][l] = size;
        size *= len[l];
      }
    }
    bool nonzero = false;
    for (size_t m = 0; m <= pivot; ++m) {
      nonzero |= g[m][std::popcount(mask)] != 0;
    }
    if (nonzero) tables[mask].assign(size, 0);
  }

#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t mi = 0; mi < static_cast<int64_t>(masks); ++mi) {
    const auto mask = static_cast<uint32_t>(mi);
    auto& table = tables[mask];
    if (table.empty()) continue;
    const int size_b = std::popcount(mask);
    for (size_t rec = 0; rec < n; ++rec) {
      const Category* x = records.data() + rec * d;
      size_t matches = 0;
      for (size_t j = 0; j < pivot; ++j) {
        matches += x[shape.features[j]] == batch.prefix[j];
      }
      const int64_t weight = g[matches][size_b];
      if (weight == 0) continue;
      size_t idx = 0;
      bool inside = true;
      for (int l = 0; l < nfree; ++l) {
        if (!((mask >> l) & 1u)) continue;
        const size_t v = x[shape.features[pivot + l]];
        if (v < start[l] || v >= start[l] + len[l]) {
          inside = false;
          break;
        }
        idx += (v - start[l]) * strides[mask][l];
      }
      if (inside) table[idx] += weight;
    }
  }

  const auto total = static_cast<int64_t>(batch.len * plan.inner);
#pragma omp parallel for schedule(static)
  for (int64_t pos = 0; pos < total; ++pos) {
    size_t digits[kMaxThresholdWidth];
    uint64_t rem = static_cast<uint64_t>(pos);
    for (int l = nfree - 1; l >= 0; --l) {
      digits[l] = rem % len[l];
      rem /= len[l];
    }
    int64_t count = 0;
    for (uint32_t mask = 0; mask < masks; ++mask) {
      if (tables[mask].empty()) continue;
      size_t idx = 0;
      for (int l = 0; l < nfree; ++l) {
        if ((mask >> l) & 1u) idx += digits[l] * strides[mask][l];
      }
      count += tables[mask][idx];
    }
    out[pos] = static_cast<double>(count) / static_cast<double>(n);
  }
}

template <class BatchFn>
StreamStats StreamWorkload(const Schema& schema, const Workload& workload,
                           size_t batch_cap, const BatchSink& sink,
                           BatchFn&& fn) {
  const QueryIndex index(workload, schema);
  StreamStats stats;
  std::vector<double> buffer;
  for (size_t t = 0; t < workload.thresholds.size(); ++t) {
    const ThresholdShape shape = ShapeOf(workload.thresholds[t], schema);
    const BatchPlan plan = PlanBatches(shape.cards, batch_cap);
    buffer.resize(std::max(buffer.size(), plan.max_batch()));
    ForEachBatch(shape.cards, plan, [&](const Batch& batch) {
      const size_t size = batch.len * plan.inner;
      fn(shape, plan, batch, buffer.data());
      stats.peak_buffer = std::max(stats.peak_buffer, size);
      stats.queries += size;
      ++stats.batches;
      sink(AnswerBatch{t, index.threshold_offset(t) + batch.local_offset,
                       std::span<const double>(buffer.data(), size)});
    });
  }
  return stats;
}

}  // namespace

BatchPlan PlanBatches(std::span<const size_t> cardinalities, size_t batch_cap) {
  if (batch_cap == 0) throw std::invalid_argument("batch cap must be positive");
  const size_t k = cardinalities.size();
  if (k == 0) throw std::invalid_argument("threshold has no features");
  std::vector<uint64_t> inner(k, 1);
  for (int j = static_cast<int>(k) - 2; j >= 0; --j) {
    if (inner[j + 1] > std::numeric_limits<uint64_t>::max() / cardinalities[j + 1]) {
      throw std::overflow_error("threshold query count overflows 64 bits");
    }
    inner[j] = inner[j + 1] * cardinalities[j + 1];
  }
  BatchPlan plan;
  if (inner[0] > std::numeric_limits<uint64_t>::max() / cardinalities[0]) {
    throw std::overflow_error("threshold query count overflows 64 bits");
  }
  plan.total = inner[0] * cardinalities[0];
  if (plan.total <= batch_cap) {
    plan.pivot = 0;
    plan.chunk = cardinalities[0];
    plan.inner = inner[0];
    return plan;
  }
  size_t p = 0;
  while (inner[p] > batch_cap) ++p;
  plan.pivot = p;
  plan.inner = inner[p];
  plan.chunk = static_cast<size_t>(
      std::min<uint64_t>(cardinalities[p], batch_cap / inner[p]));
  return plan;
}

StreamStats StreamTrueAnswers(const Dataset& dataset, const Workload& workload,
                              const BatchSink& sink, size_t batch_cap) {
  const auto records = dataset.records();
  const size_t d = dataset.num_features();
  const size_t n = dataset.size();
  return StreamWorkload(
      dataset.schema(), workload, batch_cap, sink,
      [&](const ThresholdShape& shape, const BatchPlan& plan, const Batch& batch,
          double* out) { SparseBatch(records, d, n, shape, plan, batch, out); });
}

StreamStats StreamSurrogateAnswers(const RelaxedDataset& relaxed,
                                   const Schema& schema,
                                   const Workload& workload,
                                   const BatchSink& sink, size_t batch_cap) {
  if (relaxed.width() != schema.one_hot_width()) {
    throw std::invalid_argument("relaxed dataset width does not match schema");
  }
  return StreamWorkload(
      schema, workload, batch_cap, sink,
      [&](const ThresholdShape& shape, const BatchPlan& plan, const Batch& batch,
          double* out) { DenseBatch(relaxed, shape, plan, batch, out); });
}

std::vector<double> ThresholdTrueAnswers(const Dataset& dataset,
                                         const Threshold& threshold) {
  Workload single{{threshold}};
  std::vector<double> answers(ThresholdQueryCount(threshold, dataset.schema()));
  StreamTrueAnswers(
      dataset, single,
      [&](const AnswerBatch& b) {
        std::copy(b.answers.begin(), b.answers.end(), answers.begin() + b.offset);
      },
      std::max<size_t>(answers.size(), 1));
  return answers;
}

std::vector<double> ThresholdSurrogateAnswers(const RelaxedDataset& relaxed,
                                              const Schema& schema,
                                              const Threshold& threshold) {
  Workload single{{threshold}};
  return WorkloadSurrogateAnswers(relaxed, schema, single,
                                  std::max<uint64_t>(
                                      ThresholdQueryCount(threshold, schema), 1));
}

std::vector<double> WorkloadSurrogateAnswers(const RelaxedDataset& relaxed,
                                             const Schema& schema,
                                             const Workload& workload,
                                             size_t batch_cap) {
  std::vector<double> answers(ConsistentQueryCount(workload, schema));
  StreamSurrogateAnswers(
      relaxed, schema, workload,
      [&](const AnswerBatch& b) {
        std::copy(b.answers.begin(), b.answers.end(), answers.begin() + b.offset);
      },
      batch_cap);
  return answers;
}

}  // namespace rap
