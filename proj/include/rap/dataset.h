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

// Categorical datasets, schemas, one-hot encoding and the relaxed synthetic
// dataset that the projection step optimizes.

#ifndef RAP_DATASET_H_
#define RAP_DATASET_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rap/random.h"

namespace rap {

using Category = uint32_t;

// Category label used for empty cells.
inline constexpr std::string_view kMissingCategory = "(missing)";

struct Feature {
  std::string name;
  std::vector<std::string> categories;

  friend bool operator==(const Feature&, const Feature&) = default;
};

// Ordered categorical features. Every feature has at least two distinct
// categories.
class Schema {
 public:
  explicit Schema(std::vector<Feature> features);

  size_t num_features() const { return features_.size(); }
  size_t one_hot_width() const { return one_hot_width_; }
  size_t cardinality(size_t feature) const { return cardinalities_[feature]; }
  size_t block_offset(size_t feature) const { return offsets_[feature]; }
  std::span<const size_t> cardinalities() const { return cardinalities_; }
  std::span<const size_t> block_offsets() const { return offsets_; }
  const Feature& feature(size_t i) const { return features_[i]; }
  const std::vector<Feature>& features() const { return features_; }

  std::optional<Category> category_index(size_t feature,
                                         std::string_view value) const;

  friend bool operator==(const Schema& a, const Schema& b) {
    return a.features_ == b.features_;
  }

 private:
  std::vector<Feature> features_;
  std::vector<size_t> cardinalities_;
  std::vector<size_t> offsets_;
  size_t one_hot_width_ = 0;
  std::vector<std::unordered_map<std::string, Category>> lookup_;
};

// Schema sidecar: {"features": [{"name": ..., "categories": [...]}, ...]}.
std::string SchemaToJson(const Schema& schema);
Schema SchemaFromJson(std::string_view json);
void SaveSchema(const std::string& path, const Schema& schema);
Schema LoadSchema(const std::string& path);

// Counts reads of sensitive records. While at least one scope is open, reads
// are attributed to the innermost scope's label; otherwise they are recorded
// as unguarded.
class AccessAudit {
 public:
  void Enter(std::string label);
  void Leave();
  void NoteRead();

  uint64_t unguarded_reads() const { return unguarded_.load(); }
  uint64_t guarded_reads() const;
  std::map<std::string, uint64_t> reads_by_label() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> stack_;
  std::map<std::string, uint64_t> by_label_;
  std::atomic<int> depth_{0};
  std::atomic<uint64_t> unguarded_{0};
};

// Sensitive categorical dataset: n records stored row-major as category
// indices.
class Dataset {
 public:
  Dataset(Schema schema, std::vector<Category> values);

  const Schema& schema() const { return schema_; }
  size_t size() const { return size_; }
  size_t num_features() const { return schema_.num_features(); }

  // Row-major n x d view of all records.
  std::span<const Category> records() const;
  std::span<const Category> record(size_t i) const;

  void AttachAudit(std::shared_ptr<AccessAudit> audit) {
    audit_ = std::move(audit);
  }
  AccessAudit* audit() const { return audit_.get(); }

 private:
  Schema schema_;
  std::vector<Category> values_;
  size_t size_ = 0;
  std::shared_ptr<AccessAudit> audit_;
};

// Labels record reads on `dataset` for as long as it lives. A no-op when the
// dataset carries no audit.
class ScopedAccess {
 public:
  ScopedAccess(const Dataset& dataset, std::string label);
  ~ScopedAccess();
  ScopedAccess(const ScopedAccess&) = delete;
  ScopedAccess& operator=(const ScopedAccess&) = delete;

 private:
  AccessAudit* audit_;
};

struct LoadOptions {
  char delimiter = ',';
};

// Reads a delimited table with a header row. Without a schema every column is
// treated as categorical and categories are sorted lexicographically.
Dataset LoadDataset(const std::string& path,
                    const std::optional<Schema>& schema = std::nullopt,
                    const LoadOptions& options = {});
Dataset ParseDataset(std::string_view text,
                     const std::optional<Schema>& schema = std::nullopt,
                     const LoadOptions& options = {});
void SaveDataset(const std::string& path, const Dataset& dataset,
                 char delimiter = ',');

struct OneHotRecord {
  std::vector<uint8_t> bits;
};

OneHotRecord OneHot(std::span<const Category> record, const Schema& schema);
std::vector<Category> DecodeOneHot(const OneHotRecord& encoded,
                                   const Schema& schema);

// Start offset and size of each one-hot block.
struct BlockLayout {
  std::vector<size_t> offsets;
  std::vector<size_t> sizes;
  size_t width = 0;

  static BlockLayout FromSchema(const Schema& schema);
  size_t num_blocks() const { return offsets.size(); }
};

// n' x d' real matrix, rows stored contiguously, feature blocks contiguous
// within each row.
class RelaxedDataset {
 public:
  RelaxedDataset() = default;
  RelaxedDataset(size_t rows, BlockLayout layout);

  size_t rows() const { return rows_; }
  size_t width() const { return layout_.width; }
  const BlockLayout& layout() const { return layout_; }

  std::span<double> row(size_t i) {
    return {values_.data() + i * layout_.width, layout_.width};
  }
  std::span<const double> row(size_t i) const {
    return {values_.data() + i * layout_.width, layout_.width};
  }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const RelaxedDataset& a, const RelaxedDataset& b) {
    return a.rows_ == b.rows_ && a.layout_.offsets == b.layout_.offsets &&
           a.layout_.sizes == b.layout_.sizes && a.values_ == b.values_;
  }

 private:
  size_t rows_ = 0;
  BlockLayout layout_;
  std::vector<double> values_;
};

// I.i.d. Uniform[0,1] entries. Callers project the rows before first use.
RelaxedDataset InitRelaxed(size_t n_prime, const Schema& schema, Rng& rng);

// One-hot rows of `records` (row-major, d per record) as a relaxed dataset.
RelaxedDataset RelaxedFromRecords(std::span<const Category> records,
                                  const Schema& schema);

// Delimited numeric dump with a header of "<feature>=<category>" columns.
void SaveRelaxed(const std::string& path, const RelaxedDataset& relaxed,
                 const Schema& schema, char delimiter = ',');

}  // namespace rap

#endif  // RAP_DATASET_H_
