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

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "rap/random.h"
#include "support/test_data.h"

namespace rap {
namespace {

// Euclidean projection onto the simplex by enumerating supports and keeping
// the candidate that satisfies the KKT conditions.
std::vector<double> SimplexProjectionOracle(const std::vector<double>& z) {
  const size_t t = z.size();
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (uint32_t mask = 1; mask < (1u << t); ++mask) {
    double sum = 0.0;
    size_t count = 0;
    for (size_t j = 0; j < t; ++j) {
      if (mask & (1u << j)) {
        sum += z[j];
        ++count;
      }
    }
    const double tau = (sum - 1.0) / static_cast<double>(count);
    std::vector<double> p(t, 0.0);
    bool feasible = true;
    for (size_t j = 0; j < t; ++j) {
      if (mask & (1u << j)) {
        p[j] = z[j] - tau;
        if (p[j] < 0.0) feasible = false;
      } else if (z[j] - tau > 1e-12) {
        feasible = false;
      }
    }
    if (!feasible) continue;
    double dist = 0.0;
    for (size_t j = 0; j < t; ++j) dist += (p[j] - z[j]) * (p[j] - z[j]);
    if (dist < best_dist) {
      best_dist = dist;
      best = p;
    }
  }
  return best;
}

TEST(SparsemaxTest, Example) {
  const auto p = Sparsemax(std::vector<double>{0.8, 0.3, -0.1});
  EXPECT_NEAR(p[0], 0.75, 1e-15);
  EXPECT_NEAR(p[1], 0.25, 1e-15);
  EXPECT_EQ(p[2], 0.0);
}

TEST(SparsemaxTest, UniformInputAndSingleton) {
  const auto p = Sparsemax(std::vector<double>{3.0, 3.0, 3.0, 3.0});
  for (double v : p) EXPECT_NEAR(v, 0.25, 1e-15);
  EXPECT_EQ(Sparsemax(std::vector<double>{-7.0}), std::vector<double>{1.0});
}

TEST(SparsemaxTest, RejectsBadInput) {
  EXPECT_THROW(Sparsemax(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(Sparsemax(std::vector<double>{1.0, NAN}), std::invalid_argument);
}

TEST(SparsemaxTest, MatchesOracleAndIsIdempotent) {
  Rng rng = MakeRng(11);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (size_t t = 1; t <= 8; ++t) {
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> z(t);
      for (double& v : z) v = normal(rng);
      const auto p = Sparsemax(z);
      const auto oracle = SimplexProjectionOracle(z);
      ASSERT_EQ(oracle.size(), t);
      double sum = 0.0;
      for (size_t j = 0; j < t; ++j) {
        EXPECT_NEAR(p[j], oracle[j], 1e-12);
        EXPECT_GE(p[j], 0.0);
        sum += p[j];
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
      const auto again = Sparsemax(p);
      for (size_t j = 0; j < t; ++j) EXPECT_NEAR(again[j], p[j], 1e-14);
    }
  }
}

TEST(ProjectRowsTest, EveryBlockOnSimplex) {
  const Schema schema = testing::MakeSchema({2, 3, 5});
  Rng rng = MakeRng(12);
  RelaxedDataset relaxed(7, BlockLayout::FromSchema(schema));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : relaxed.values()) v = normal(rng);
  const RelaxedDataset projected = ProjectRows(relaxed);
  for (size_t i = 0; i < projected.rows(); ++i) {
    const auto row = projected.row(i);
    const auto raw = relaxed.row(i);
    for (size_t b = 0; b < schema.num_features(); ++b) {
      const size_t off = schema.block_offset(b);
      const size_t len = schema.cardinality(b);
      const auto oracle = SimplexProjectionOracle(
          std::vector<double>(raw.begin() + off, raw.begin() + off + len));
      for (size_t j = 0; j < len; ++j) {
        EXPECT_NEAR(row[off + j], oracle[j], 1e-12);
      }
    }
  }
  const RelaxedDataset twice = ProjectRows(projected);
  for (size_t j = 0; j < twice.values().size(); ++j) {
    EXPECT_NEAR(twice.values()[j], projected.values()[j], 1e-15);
  }
}

TEST(OptimizerConfigTest, Validation) {
  EXPECT_NO_THROW(ValidateOptimizerConfig({}));
  OptimizerConfig bad;
  bad.learning_rate = 0.0;
  EXPECT_THROW(ValidateOptimizerConfig(bad), std::invalid_argument);
  bad = {};
  bad.max_iterations = 0;
  EXPECT_THROW(ValidateOptimizerConfig(bad), std::invalid_argument);
  bad = {};
  bad.moment_decay_2 = 1.0;
  EXPECT_THROW(ValidateOptimizerConfig(bad), std::invalid_argument);
}

class RelaxedProjectionTest : public ::testing::Test {
 protected:
  RelaxedProjectionTest() : schema_(testing::MakeSchema({2, 3})) {}

  RelaxedDataset Initial(size_t rows, uint64_t seed) const {
    Rng rng = MakeRng(seed);
    return ProjectRows(InitRelaxed(rows, schema_, rng));
  }

  Schema schema_;
};

TEST_F(RelaxedProjectionTest, MinimizerIsLeftUnchanged) {
  const RelaxedDataset initial = Initial(5, 1);
  std::vector<PolyThresholdSpec> specs{MakePolyThresholdSpec({0, 2}, 1),
                                       MakePolyThresholdSpec({1, 4}, 2)};
  const std::vector<double> targets = SurrogateAnswers(initial, specs);
  const ProjectionResult result =
      RelaxedProjection(initial, specs, targets, OptimizerConfig{});
  EXPECT_EQ(result.best_loss, 0.0);
  EXPECT_EQ(result.iterations, 0u);
  EXPECT_EQ(result.synthetic, initial);
}

TEST_F(RelaxedProjectionTest, SingleMarginalTargetConverges) {
  std::vector<PolyThresholdSpec> specs{MakePolyThresholdSpec({1}, 1)};
  const std::vector<double> targets{0.3};
  OptimizerConfig config;
  config.max_iterations = 5000;
  const ProjectionResult result =
      RelaxedProjection(Initial(10, 2), specs, targets, config);
  EXPECT_LE(result.best_loss, 1e-6);
  EXPECT_NEAR(SurrogateAnswers(result.synthetic, specs)[0], 0.3, 1e-3);
}

TEST_F(RelaxedProjectionTest, BestLossIsNonIncreasing) {
  std::vector<PolyThresholdSpec> specs{MakePolyThresholdSpec({0, 2}, 2),
                                       MakePolyThresholdSpec({1, 3}, 1),
                                       MakePolyThresholdSpec({0}, 1)};
  const std::vector<double> targets{0.2, 0.7, 0.9};
  std::vector<IterationRecord> records;
  OptimizerConfig config;
  config.max_iterations = 300;
  const ProjectionResult result = RelaxedProjection(
      Initial(20, 3), specs, targets, config,
      [&](const IterationRecord& rec, const RelaxedDataset& current) {
        records.push_back(rec);
        for (size_t i = 0; i < current.rows(); ++i) {
          const auto row = current.row(i);
          EXPECT_NEAR(row[0] + row[1], 1.0, 1e-12);
          EXPECT_NEAR(row[2] + row[3] + row[4], 1.0, 1e-12);
        }
      });
  ASSERT_FALSE(records.empty());
  for (size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].iteration, i);
    EXPECT_LE(records[i].best_loss, records[i].loss);
    if (i > 0) EXPECT_LE(records[i].best_loss, records[i - 1].best_loss);
  }
  EXPECT_EQ(result.best_loss, records.back().best_loss);
  EXPECT_EQ(result.iterations + 1, records.size());
  const auto answers = SurrogateAnswers(result.synthetic, specs);
  double loss = 0.0;
  for (size_t q = 0; q < specs.size(); ++q) {
    loss += (answers[q] - targets[q]) * (answers[q] - targets[q]);
  }
  EXPECT_NEAR(loss, result.best_loss, 1e-12);
}

TEST_F(RelaxedProjectionTest, ToyWorkloadConverges) {
  // Targets realised by an actual one-hot dataset are reachable.
  const Dataset data = testing::MakeRandomDataset(schema_, 30, 4);
  const RelaxedDataset truth = RelaxedFromRecords(data.records(), schema_);
  std::vector<PolyThresholdSpec> specs;
  for (size_t a = 0; a < 2; ++a) {
    for (size_t b = 2; b < 5; ++b) {
      specs.push_back(MakePolyThresholdSpec({a, b}, 1));
      specs.push_back(MakePolyThresholdSpec({a, b}, 2));
    }
  }
  const std::vector<double> targets = SurrogateAnswers(truth, specs);
  OptimizerConfig config;
  config.max_iterations = 5000;
  const ProjectionResult result =
      RelaxedProjection(Initial(30, 5), specs, targets, config);
  const auto answers = SurrogateAnswers(result.synthetic, specs);
  for (size_t q = 0; q < specs.size(); ++q) {
    EXPECT_NEAR(answers[q], targets[q], 1e-4);
  }
}

TEST_F(RelaxedProjectionTest, NonFiniteLossThrows) {
  std::vector<PolyThresholdSpec> specs{MakePolyThresholdSpec({0}, 1)};
  const std::vector<double> targets{std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(RelaxedProjection(Initial(3, 6), specs, targets, {}),
               std::runtime_error);
}

TEST_F(RelaxedProjectionTest, RejectsMismatchedInputs) {
  std::vector<PolyThresholdSpec> specs{MakePolyThresholdSpec({0}, 1)};
  const std::vector<double> targets{0.1, 0.2};
  EXPECT_THROW(RelaxedProjection(Initial(3, 7), specs, targets, {}),
               std::invalid_argument);
  EXPECT_THROW(RelaxedProjection(Initial(3, 7), {}, {}, {}),
               std::invalid_argument);
}

TEST_F(RelaxedProjectionTest, Deterministic) {
  std::vector<PolyThresholdSpec> specs{MakePolyThresholdSpec({0, 3}, 1),
                                       MakePolyThresholdSpec({1, 2}, 2)};
  const std::vector<double> targets{0.4, 0.1};
  OptimizerConfig config;
  config.max_iterations = 100;
  const auto a = RelaxedProjection(Initial(8, 8), specs, targets, config);
  const auto b = RelaxedProjection(Initial(8, 8), specs, targets, config);
  EXPECT_EQ(a.synthetic, b.synthetic);
  EXPECT_EQ(a.best_loss, b.best_loss);
}

}  // namespace
}  // namespace rap
