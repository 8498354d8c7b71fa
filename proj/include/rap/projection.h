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

// Relaxed projection: first-order minimization of the squared gap between
// surrogate answers and noisy targets, with every one-hot block projected
// back onto the probability simplex after each step.

#ifndef RAP_PROJECTION_H_
#define RAP_PROJECTION_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rap/dataset.h"
#include "rap/surrogate.h"

namespace rap {

// Adaptive-moment optimizer settings.
struct OptimizerConfig {
  double learning_rate = 0.05;
  size_t max_iterations = 1000;
  double stop_tolerance = 1e-7;  // minimum best-loss improvement
  size_t patience = 50;          // non-improving iterations before stopping
  double moment_decay_1 = 0.9;
  double moment_decay_2 = 0.999;
  double epsilon_stabilizer = 1e-8;
};

void ValidateOptimizerConfig(const OptimizerConfig& config);

// Euclidean projection onto {p >= 0, sum p = 1}.
std::vector<double> Sparsemax(std::span<const double> z);
void SparsemaxInPlace(std::span<double> z);

// Projects every feature block of every row.
void ProjectRowsInPlace(RelaxedDataset& relaxed);
RelaxedDataset ProjectRows(RelaxedDataset relaxed);

struct IterationRecord {
  size_t iteration = 0;
  double loss = 0.0;       // loss of the current iterate
  double best_loss = 0.0;  // lowest loss seen so far
};

// Called once per evaluated iterate, with the iterate itself.
using IterationObserver =
    std::function<void(const IterationRecord&, const RelaxedDataset&)>;

struct ProjectionResult {
  RelaxedDataset synthetic;  // lowest-loss iterate
  double best_loss = 0.0;
  size_t iterations = 0;     // optimizer steps taken
};

// Throws std::runtime_error when the loss becomes non-finite.
ProjectionResult RelaxedProjection(const RelaxedDataset& initial,
                                   std::span<const PolyThresholdSpec> queries,
                                   std::span<const double> targets,
                                   const OptimizerConfig& config,
                                   const IterationObserver& observer = {});

}  // namespace rap

#endif  // RAP_PROJECTION_H_
