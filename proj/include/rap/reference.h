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

// Serial, definition-level implementations of the evaluation kernels. They
// favour directness over speed and serve as oracles for the parallel code.

#ifndef RAP_REFERENCE_H_
#define RAP_REFERENCE_H_

#include <span>
#include <vector>

#include "rap/dataset.h"
#include "rap/surrogate.h"
#include "rap/workload.h"

namespace rap::reference {

// One predicate scan per consistent query.
std::vector<double> TrueAnswers(const Dataset& dataset,
                                const Workload& workload);

// Mean over rows of the literal inclusion-exclusion polynomial.
std::vector<double> SurrogateAnswers(const RelaxedDataset& relaxed,
                                     std::span<const PolyThresholdSpec> queries);

std::vector<double> WorkloadSurrogateAnswers(const RelaxedDataset& relaxed,
                                             const Schema& schema,
                                             const Workload& workload);

// Partial derivatives of PolyThreshold(row, spec) for each of spec.coords,
// by differentiating every product term.
std::vector<double> PolyThresholdGradient(std::span<const double> row,
                                          const PolyThresholdSpec& spec);

LossGradient LossAndGradient(const RelaxedDataset& relaxed,
                             std::span<const PolyThresholdSpec> queries,
                             std::span<const double> targets);

void ProjectRowsInPlace(RelaxedDataset& relaxed);

}  // namespace rap::reference

#endif  // RAP_REFERENCE_H_
