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

#include "rap/generalization.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rap/threshold_eval.h"

namespace rap {
namespace {

FeatureDistribution Normalize(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  return FeatureDistribution{std::move(weights)};
}

}  // namespace

void ValidateDistribution(const FeatureDistribution& dist) {
  if (dist.probs.empty()) {
    throw std::invalid_argument("distribution has no features");
  }
  double total = 0.0;
  for (double p : dist.probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("distribution has a negative mass");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("distribution does not sum to 1");
  }
}

std::string ToString(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::kUniform:
      return "uniform";
    case DistributionKind::kZipf:
      return "zipf";
    case DistributionKind::kGeometric:
      return "geometric";
  }
  return "uniform";
}

DistributionKind ParseDistributionKind(const std::string& text) {
  if (text == "uniform") return DistributionKind::kUniform;
  if (text == "zipf") return DistributionKind::kZipf;
  if (text == "geometric") return DistributionKind::kGeometric;
  throw std::invalid_argument("unknown distribution: " + text);
}

FeatureDistribution MakeDistribution(const DistributionSpec& spec, size_t d) {
  if (d == 0) throw std::invalid_argument("distribution needs d >= 1");
  std::vector<double> w(d);
  switch (spec.kind) {
    case DistributionKind::kUniform:
      std::fill(w.begin(), w.end(), 1.0);
      break;
    case DistributionKind::kZipf:
      if (!(spec.zipf_s > 0.0)) {
        throw std::invalid_argument("zipf exponent must be positive");
      }
      for (size_t i = 0; i < d; ++i) {
        w[i] = std::pow(static_cast<double>(i + 1), -spec.zipf_s);
      }
      break;
    case DistributionKind::kGeometric:
      if (!(spec.geometric_p > 0.0 && spec.geometric_p < 1.0)) {
        throw std::invalid_argument("geometric p must lie in (0, 1)");
      }
      for (size_t i = 0; i < d; ++i) {
        w[i] = std::pow(1.0 - spec.geometric_p, static_cast<double>(i)) *
               spec.geometric_p;
      }
      break;
  }
  return Normalize(std::move(w));
}

FeatureDistribution Drift(const FeatureDistribution& historical,
                          DriftParams params, Rng& rng) {
  if (!(params.gamma >= 0.0 && params.gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1]");
  }
  const size_t d = historical.size();
  if (d == 0) throw std::invalid_argument("distribution has no features");
  if (!std::is_sorted(historical.probs.begin(), historical.probs.end(),
                      std::greater<>())) {
    throw std::invalid_argument("drift requires descending masses");
  }
  if (d == 1) return historical;

  const double g = params.gamma;
  const double trend = 1.0 - 2.0 * g;
  const double noise = 1.0 - std::abs(1.0 - 2.0 * g);
  std::vector<double> keys(d);
  for (size_t i = 0; i < d; ++i) {
    // Features are 1-based in the key formula.
    const double position =
        static_cast<double>(d - (i + 1)) / static_cast<double>(d - 1);
    keys[i] = trend * position + noise * Uniform01(rng);
  }
  std::vector<size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return keys[a] > keys[b]; });
  FeatureDistribution out{std::vector<double>(d)};
  for (size_t rank = 0; rank < d; ++rank) {
    out.probs[order[rank]] = historical.probs[rank];
  }
  return out;
}

double TotalVariation(const FeatureDistribution& p,
                      const FeatureDistribution& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("distributions differ in dimension");
  }
  double sum = 0.0;
  for (size_t i = 0; i < p.size(); ++i) sum += std::abs(p.probs[i] - q.probs[i]);
  return 0.5 * sum;
}

void ValidateThresholdSpec(const ThresholdDistributionSpec& spec) {
  ValidateDistribution(spec.features);
  if (spec.k == 0 || spec.k > spec.features.size()) {
    throw std::invalid_argument("k must lie in [1, d]");
  }
  if (spec.r < 1 || static_cast<size_t>(spec.r) > spec.k) {
    throw std::invalid_argument("r must lie in [1, k]");
  }
  const auto positive = std::count_if(spec.features.probs.begin(),
                                      spec.features.probs.end(),
                                      [](double p) { return p > 0.0; });
  if (static_cast<size_t>(positive) < spec.k) {
    throw std::invalid_argument("fewer than k features have positive mass");
  }
}

Threshold SampleThreshold(const ThresholdDistributionSpec& spec, Rng& rng) {
  ValidateThresholdSpec(spec);
  std::vector<double> mass = spec.features.probs;
  std::vector<size_t> chosen;
  chosen.reserve(spec.k);
  for (size_t draw = 0; draw < spec.k; ++draw) {
    double remaining = 0.0;
    size_t last_positive = 0;
    for (size_t i = 0; i < mass.size(); ++i) {
      remaining += mass[i];
      if (mass[i] > 0.0) last_positive = i;
    }
    const double u = Uniform01(rng) * remaining;
    double acc = 0.0;
    size_t pick = last_positive;
    for (size_t i = 0; i < mass.size(); ++i) {
      if (mass[i] <= 0.0) continue;
      acc += mass[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    chosen.push_back(pick);
    mass[pick] = 0.0;
  }
  return MakeThreshold(spec.r, std::move(chosen));
}

Workload SampleIidWorkload(const ThresholdDistributionSpec& spec, size_t size,
                           Rng& rng) {
  Workload workload;
  workload.thresholds.reserve(size);
  for (size_t i = 0; i < size; ++i) {
    workload.thresholds.push_back(SampleThreshold(spec, rng));
  }
  return workload;
}

ThresholdAnswerer SyntheticAnswerer(const RelaxedDataset& synthetic,
                                    const Schema& schema) {
  return [&synthetic, &schema](const Threshold& threshold) {
    return ThresholdSurrogateAnswers(synthetic, schema, threshold);
  };
}

ThresholdAnswerer ZeroAnswerer(const Schema& schema) {
  return [&schema](const Threshold& threshold) {
    return std::vector<double>(ThresholdQueryCount(threshold, schema), 0.0);
  };
}

ThresholdAnswerer ExactAnswerer(const Dataset& dataset) {
  return [&dataset](const Threshold& threshold) {
    return ThresholdTrueAnswers(dataset, threshold);
  };
}

FutureError SummarizeErrors(const std::vector<double>& errors) {
  FutureError out;
  out.thresholds = errors.size();
  if (errors.empty()) return out;
  double sum = 0.0;
  for (double e : errors) sum += e;
  out.mean = sum / static_cast<double>(errors.size());
  if (errors.size() < 2) return out;
  double ss = 0.0;
  for (double e : errors) ss += (e - out.mean) * (e - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(errors.size() - 1));
  out.halfwidth95 = 1.96 * sd / std::sqrt(static_cast<double>(errors.size()));
  return out;
}

FutureWorkload::FutureWorkload(const Dataset& dataset, Workload workload)
    : workload_(std::move(workload)) {
  ValidateWorkload(workload_, dataset.schema());
  truth_.reserve(workload_.thresholds.size());
  for (const Threshold& threshold : workload_.thresholds) {
    truth_.push_back(ThresholdTrueAnswers(dataset, threshold));
  }
}

std::vector<double> FutureWorkload::Errors(
    const ThresholdAnswerer& answerer) const {
  std::vector<double> errors(workload_.thresholds.size());
  for (size_t t = 0; t < errors.size(); ++t) {
    const std::vector<double> answers = answerer(workload_.thresholds[t]);
    const std::vector<double>& truth = truth_[t];
    if (answers.size() != truth.size()) {
      throw std::logic_error("answerer returned the wrong number of answers");
    }
    double worst = 0.0;
    for (size_t q = 0; q < truth.size(); ++q) {
      worst = std::max(worst,
                       std::abs(truth[q] - std::clamp(answers[q], 0.0, 1.0)));
    }
    errors[t] = worst;
  }
  return errors;
}

FutureError FutureWorkload::Evaluate(const ThresholdAnswerer& answerer) const {
  return SummarizeErrors(Errors(answerer));
}

FutureError EstimateFutureError(const ThresholdAnswerer& answerer,
                                const Dataset& dataset,
                                const ThresholdDistributionSpec& future_spec,
                                size_t num_future, Rng& rng) {
  if (num_future < 2) {
    throw std::invalid_argument("future error needs at least 2 thresholds");
  }
  FutureWorkload future(dataset, SampleIidWorkload(future_spec, num_future, rng));
  return future.Evaluate(answerer);
}

}  // namespace rap
