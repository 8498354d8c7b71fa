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

#include "support/test_data.h"

#include <atomic>
#include <filesystem>
#include <unistd.h>

#include "rap/random.h"

namespace rap::testing {
namespace {

Category Draw(Rng& rng, const std::vector<double>& probs) {
  const double u = Uniform01(rng);
  double acc = 0.0;
  for (size_t c = 0; c < probs.size(); ++c) {
    acc += probs[c];
    if (u < acc) return static_cast<Category>(c);
  }
  return static_cast<Category>(probs.size() - 1);
}

}  // namespace

Schema MakeSchema(const std::vector<size_t>& cardinalities) {
  std::vector<Feature> features;
  for (size_t f = 0; f < cardinalities.size(); ++f) {
    Feature feature{"f" + std::to_string(f), {}};
    for (size_t c = 0; c < cardinalities[f]; ++c) {
      feature.categories.push_back("c" + std::to_string(c));
    }
    features.push_back(std::move(feature));
  }
  return Schema(std::move(features));
}

Schema MakeUniformSchema(size_t d, size_t cardinality) {
  return MakeSchema(std::vector<size_t>(d, cardinality));
}

Dataset MakeRandomDataset(const Schema& schema, size_t n, uint64_t seed) {
  Rng rng = MakeRng(seed);
  const size_t d = schema.num_features();
  std::vector<Category> values(n * d);
  for (size_t i = 0; i < n; ++i) {
    for (size_t f = 0; f < d; ++f) {
      values[i * d + f] =
          static_cast<Category>(rng() % schema.cardinality(f));
    }
  }
  return Dataset(schema, std::move(values));
}

Dataset MakePlantedDataset(size_t n, uint64_t seed) {
  const Schema schema = MakeUniformSchema(6, 3);
  Rng rng = MakeRng(seed);
  const std::vector<double> uniform = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const std::vector<double> skewed = {0.6, 0.3, 0.1};
  std::vector<Category> values(n * 6);
  for (size_t i = 0; i < n; ++i) {
    Category* row = values.data() + i * 6;
    row[0] = Draw(rng, uniform);
    row[1] = Uniform01(rng) < 0.9 ? row[0] : Draw(rng, uniform);
    row[2] = Draw(rng, uniform);
    row[3] = Uniform01(rng) < 0.9 ? row[2] : Draw(rng, uniform);
    row[4] = Draw(rng, skewed);
    row[5] = Draw(rng, skewed);
  }
  return Dataset(schema, std::move(values));
}

std::vector<std::vector<Category>> AllRecords(const Schema& schema) {
  std::vector<std::vector<Category>> out;
  std::vector<Category> current(schema.num_features(), 0);
  while (true) {
    out.push_back(current);
    size_t f = current.size();
    while (f > 0) {
      --f;
      if (++current[f] < schema.cardinality(f)) break;
      current[f] = 0;
      if (f == 0) return out;
    }
    if (current.empty()) return out;
  }
}

std::string TempPath(const std::string& stem) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path();
  return (dir / ("rap_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++) + "_" + stem))
      .string();
}

}  // namespace rap::testing
