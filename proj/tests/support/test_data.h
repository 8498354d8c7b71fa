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

// Small datasets and schemas shared by the tests.

#ifndef RAP_TESTS_SUPPORT_TEST_DATA_H_
#define RAP_TESTS_SUPPORT_TEST_DATA_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rap/dataset.h"
#include "rap/workload.h"

namespace rap::testing {

// Features "f0".."f{d-1}" with the given cardinalities and categories
// "c0".."c{t-1}".
Schema MakeSchema(const std::vector<size_t>& cardinalities);
Schema MakeUniformSchema(size_t d, size_t cardinality);

// Records drawn uniformly at random.
Dataset MakeRandomDataset(const Schema& schema, size_t n, uint64_t seed);

// Six ternary features: f1 copies f0 and f3 copies f2 with probability 0.9
// (otherwise uniform); f0, f2 are uniform; f4, f5 are independent with
// probabilities (0.6, 0.3, 0.1).
Dataset MakePlantedDataset(size_t n, uint64_t seed);

// Every record of `schema`, enumerated with the last feature fastest.
std::vector<std::vector<Category>> AllRecords(const Schema& schema);

// Unique path under the system temporary directory.
std::string TempPath(const std::string& stem);

}  // namespace rap::testing

#endif  // RAP_TESTS_SUPPORT_TEST_DATA_H_
