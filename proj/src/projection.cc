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

#include "rap/projection.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <omp.h>

namespace rap {

void ValidateOptimizerConfig(const OptimizerConfig& config) {
  if (!(config.learning_rate > 0.0) || config.max_iterations == 0 ||
      !(config.stop_tolerance >= 0.0) || config.patience == 0 ||
      !(config.moment_decay_1 > 0.0 && config.moment_decay_1 < 1.0) ||
      !(config.moment_decay_2 > 0.0 && config.moment_decay_2 < 1.0) ||
      !(config.epsilon_stabilizer > 0.0)) {
    throw std::invalid_argument("invalid optimizer configuration");
  }
}

void SparsemaxInPlace(std::span<double> z) {
  const size_t t = z.size();
  if (t == 0) throw std::invalid_argument("sparsemax of an empty vector");
  for (double v : z) {
    if (!std::isfinite(v)) throw std::invalid_argument("sparsemax input not finite");
  }
  // Blocks are small, so a full sort is enough.
  double sorted[512];
  std::vector<double> heap;
  double* s = sorted;
  if (t > std::size(sorted)) {
    heap.resize(t);
    s = heap.data();
  }
  std::copy(z.begin(), z.end(), s);
  std::sort(s, s + t, std::greater<>());
  double cumulative = 0.0;
  double support_sum = 0.0;
  size_t support = 0;
  for (size_t j = 0; j < t; ++j) {
    cumulative += s[j];
    if (1.0 + static_cast<double>(j + 1) * s[j] > cumulative) {
      support = j + 1;
      support_sum = cumulative;
    }
  }
  const double tau = (support_sum - 1.0) / static_cast<double>(support);
  for (double& v : z) v = std::max(v - tau, 0.0);
}

std::vector<double> Sparsemax(std::span<const double> z) {
  std::vector<double> out(z.begin(), z.end());
  SparsemaxInPlace(out);
  return out;
}

void ProjectRowsInPlace(RelaxedDataset& relaxed) {
  const auto& layout = relaxed.layout();
  const auto rows = static_cast<int64_t>(relaxed.rows());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < rows; ++i) {
    auto row = relaxed.row(i);
    for (size_t b = 0; b < layout.num_blocks(); ++b) {
      SparsemaxInPlace(row.subspan(layout.offsets[b], layout.sizes[b]));
    }
  }
}

RelaxedDataset ProjectRows(RelaxedDataset relaxed) {
  ProjectRowsInPlace(relaxed);
  return relaxed;
}

ProjectionResult RelaxedProjection(const RelaxedDataset& initial,
                                   std::span<const PolyThresholdSpec> queries,
                                   std::span<const double> targets,
                                   const OptimizerConfig& config,
                                   const IterationObserver& observer) {
  ValidateOptimizerConfig(config);
  if (queries.empty() || queries.size() != targets.size()) {
    throw std::invalid_argument(
        "relaxed projection needs matching, non-empty queries and targets");
  }
  RelaxedDataset current = initial;
  ProjectionResult result{initial, std::numeric_limits<double>::infinity(), 0};

  const size_t size = current.values().size();
  std::vector<double> first_moment(size, 0.0);
  std::vector<double> second_moment(size, 0.0);
  std::vector<double> gradient;
  std::vector<double> answers;
  double decay1_power = 1.0;
  double decay2_power = 1.0;
  size_t stalled = 0;

  for (size_t iteration = 0;; ++iteration) {
    const double loss =
        LossAndGradientInto(current, queries, targets, gradient, answers);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("relaxed projection diverged at iteration " +
                               std::to_string(iteration));
    }
    if (loss < result.best_loss) {
      stalled = result.best_loss - loss < config.stop_tolerance ? stalled + 1 : 0;
      result.best_loss = loss;
      result.synthetic = current;
    } else {
      ++stalled;
    }
    if (observer) observer({iteration, loss, result.best_loss}, current);
    if (loss == 0.0 || iteration == config.max_iterations ||
        stalled >= config.patience) {
      break;
    }

    decay1_power *= config.moment_decay_1;
    decay2_power *= config.moment_decay_2;
    const double step = config.learning_rate;
    const double c1 = 1.0 / (1.0 - decay1_power);
    const double c2 = 1.0 / (1.0 - decay2_power);
    auto values = current.values();
    for (size_t j = 0; j < size; ++j) {
      const double g = gradient[j];
      first_moment[j] = config.moment_decay_1 * first_moment[j] +
                        (1.0 - config.moment_decay_1) * g;
      second_moment[j] = config.moment_decay_2 * second_moment[j] +
                         (1.0 - config.moment_decay_2) * g * g;
      values[j] -= step * (first_moment[j] * c1) /
                   (std::sqrt(second_moment[j] * c2) + config.epsilon_stabilizer);
    }
    ProjectRowsInPlace(current);
    result.iterations = iteration + 1;
  }
  return result;
}

}  // namespace rap
