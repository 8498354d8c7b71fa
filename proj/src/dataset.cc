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

#include "rap/dataset.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rap {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits one logical line of a delimited file. Supports double-quoted fields
// with "" escapes; quoted fields may not span lines.
std::vector<std::string> SplitLine(std::string_view line, char delimiter,
                                   size_t line_number) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"' && Trim(current).empty()) {
      current.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == delimiter) {
      fields.push_back(was_quoted ? current : std::string(Trim(current)));
      current.clear();
      was_quoted = false;
    } else {
      current.push_back(c);
    }
  }
  if (quoted) {
    throw std::runtime_error("unterminated quote on line " +
                             std::to_string(line_number));
  }
  fields.push_back(was_quoted ? current : std::string(Trim(current)));
  return fields;
}

std::string Quote(const std::string& s, char delimiter) {
  if (s.find(delimiter) == std::string::npos &&
      s.find('"') == std::string::npos && s == Trim(s)) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

Schema::Schema(std::vector<Feature> features) : features_(std::move(features)) {
  if (features_.empty()) {
    throw std::invalid_argument("schema must have at least one feature");
  }
  lookup_.resize(features_.size());
  std::set<std::string_view> names;
  for (size_t f = 0; f < features_.size(); ++f) {
    const auto& feature = features_[f];
    if (!names.insert(feature.name).second) {
      throw std::invalid_argument("duplicate feature name '" + feature.name + "'");
    }
    if (feature.categories.size() < 2) {
      throw std::invalid_argument("feature '" + feature.name +
                                  "' has fewer than two categories");
    }
    for (size_t c = 0; c < feature.categories.size(); ++c) {
      auto [it, inserted] = lookup_[f].emplace(feature.categories[c],
                                               static_cast<Category>(c));
      if (!inserted) {
        throw std::invalid_argument("feature '" + feature.name +
                                    "' repeats category '" +
                                    feature.categories[c] + "'");
      }
    }
    cardinalities_.push_back(feature.categories.size());
    offsets_.push_back(one_hot_width_);
    one_hot_width_ += feature.categories.size();
  }
}

std::optional<Category> Schema::category_index(size_t feature,
                                               std::string_view value) const {
  const auto& map = lookup_[feature];
  auto it = map.find(std::string(value));
  if (it == map.end()) return std::nullopt;
  return it->second;
}

std::string SchemaToJson(const Schema& schema) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : schema.features()) {
    features.push_back({{"name", f.name}, {"categories", f.categories}});
  }
  return nlohmann::json{{"features", features}}.dump(2);
}

Schema SchemaFromJson(std::string_view json) {
  const auto parsed = nlohmann::json::parse(json);
  std::vector<Feature> features;
  for (const auto& f : parsed.at("features")) {
    features.push_back({f.at("name").get<std::string>(),
                        f.at("categories").get<std::vector<std::string>>()});
  }
  return Schema(std::move(features));
}

void SaveSchema(const std::string& path, const Schema& schema) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << SchemaToJson(schema) << "\n";
}

Schema LoadSchema(const std::string& path) {
  return SchemaFromJson(ReadFile(path));
}

void AccessAudit::Enter(std::string label) {
  std::lock_guard lock(mu_);
  stack_.push_back(std::move(label));
  depth_.store(static_cast<int>(stack_.size()));
}

void AccessAudit::Leave() {
  std::lock_guard lock(mu_);
  stack_.pop_back();
  depth_.store(static_cast<int>(stack_.size()));
}

void AccessAudit::NoteRead() {
  if (depth_.load() == 0) {
    unguarded_.fetch_add(1);
    return;
  }
  std::lock_guard lock(mu_);
  if (stack_.empty()) {
    unguarded_.fetch_add(1);
  } else {
    ++by_label_[stack_.back()];
  }
}

uint64_t AccessAudit::guarded_reads() const {
  std::lock_guard lock(mu_);
  uint64_t total = 0;
  for (const auto& [label, count] : by_label_) total += count;
  return total;
}

std::map<std::string, uint64_t> AccessAudit::reads_by_label() const {
  std::lock_guard lock(mu_);
  return by_label_;
}

Dataset::Dataset(Schema schema, std::vector<Category> values)
    : schema_(std::move(schema)), values_(std::move(values)) {
  const size_t d = schema_.num_features();
  if (values_.empty() || values_.size() % d != 0) {
    throw std::invalid_argument("dataset must hold at least one full record");
  }
  size_ = values_.size() / d;
  for (size_t i = 0; i < size_; ++i) {
    for (size_t f = 0; f < d; ++f) {
      if (values_[i * d + f] >= schema_.cardinality(f)) {
        throw std::invalid_argument("record " + std::to_string(i) +
                                    " has out-of-range value for feature " +
                                    std::to_string(f));
      }
    }
  }
}

std::span<const Category> Dataset::records() const {
  if (audit_) audit_->NoteRead();
  return values_;
}

std::span<const Category> Dataset::record(size_t i) const {
  if (audit_) audit_->NoteRead();
  const size_t d = schema_.num_features();
  return {values_.data() + i * d, d};
}

ScopedAccess::ScopedAccess(const Dataset& dataset, std::string label)
    : audit_(dataset.audit()) {
  if (audit_) audit_->Enter(std::move(label));
}

ScopedAccess::~ScopedAccess() {
  if (audit_) audit_->Leave();
}

Dataset ParseDataset(std::string_view text, const std::optional<Schema>& schema,
                     const LoadOptions& options) {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  size_t line_number = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) continue;
    auto fields = SplitLine(line, options.delimiter, line_number);
    if (header.empty()) {
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size()) {
      throw std::runtime_error("line " + std::to_string(line_number) +
                               " has " + std::to_string(fields.size()) +
                               " fields, expected " +
                               std::to_string(header.size()));
    }
    for (auto& field : fields) {
      if (field.empty()) field = std::string(kMissingCategory);
    }
    rows.push_back(std::move(fields));
  }
  if (header.empty() || rows.empty()) {
    throw std::runtime_error("table has no records");
  }
  const size_t d = header.size();

  Schema resolved = [&] {
    if (schema) {
      if (schema->num_features() != d) {
        throw std::runtime_error("table has " + std::to_string(d) +
                                 " columns but schema has " +
                                 std::to_string(schema->num_features()));
      }
      for (size_t f = 0; f < d; ++f) {
        if (schema->feature(f).name != header[f]) {
          throw std::runtime_error("column '" + header[f] +
                                   "' does not match schema feature '" +
                                   schema->feature(f).name + "'");
        }
      }
      return *schema;
    }
    std::vector<Feature> features;
    for (size_t f = 0; f < d; ++f) {
      std::set<std::string> values;
      for (const auto& row : rows) values.insert(row[f]);
      features.push_back({header[f], {values.begin(), values.end()}});
    }
    return Schema(std::move(features));
  }();

  std::vector<Category> values;
  values.reserve(rows.size() * d);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t f = 0; f < d; ++f) {
      auto index = resolved.category_index(f, rows[i][f]);
      if (!index) {
        throw std::runtime_error("record " + std::to_string(i) + " value '" +
                                 rows[i][f] + "' not in schema for feature '" +
                                 header[f] + "'");
      }
      values.push_back(*index);
    }
  }
  return Dataset(std::move(resolved), std::move(values));
}

Dataset LoadDataset(const std::string& path, const std::optional<Schema>& schema,
                    const LoadOptions& options) {
  return ParseDataset(ReadFile(path), schema, options);
}

void SaveDataset(const std::string& path, const Dataset& dataset,
                 char delimiter) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  const Schema& schema = dataset.schema();
  const size_t d = schema.num_features();
  for (size_t f = 0; f < d; ++f) {
    if (f) out << delimiter;
    out << Quote(schema.feature(f).name, delimiter);
  }
  out << "\n";
  const auto values = dataset.records();
  for (size_t i = 0; i < dataset.size(); ++i) {
    for (size_t f = 0; f < d; ++f) {
      if (f) out << delimiter;
      out << Quote(schema.feature(f).categories[values[i * d + f]], delimiter);
    }
    out << "\n";
  }
}

OneHotRecord OneHot(std::span<const Category> record, const Schema& schema) {
  OneHotRecord encoded;
  encoded.bits.assign(schema.one_hot_width(), 0);
  for (size_t f = 0; f < schema.num_features(); ++f) {
    encoded.bits[schema.block_offset(f) + record[f]] = 1;
  }
  return encoded;
}

std::vector<Category> DecodeOneHot(const OneHotRecord& encoded,
                                   const Schema& schema) {
  if (encoded.bits.size() != schema.one_hot_width()) {
    throw std::invalid_argument("one-hot width does not match schema");
  }
  std::vector<Category> record(schema.num_features());
  for (size_t f = 0; f < schema.num_features(); ++f) {
    int ones = 0;
    for (size_t c = 0; c < schema.cardinality(f); ++c) {
      if (encoded.bits[schema.block_offset(f) + c]) {
        record[f] = static_cast<Category>(c);
        ++ones;
      }
    }
    if (ones != 1) {
      throw std::invalid_argument("block " + std::to_string(f) +
                                  " is not a valid one-hot encoding");
    }
  }
  return record;
}

BlockLayout BlockLayout::FromSchema(const Schema& schema) {
  BlockLayout layout;
  layout.offsets.assign(schema.block_offsets().begin(),
                        schema.block_offsets().end());
  layout.sizes.assign(schema.cardinalities().begin(),
                      schema.cardinalities().end());
  layout.width = schema.one_hot_width();
  return layout;
}

RelaxedDataset::RelaxedDataset(size_t rows, BlockLayout layout)
    : rows_(rows), layout_(std::move(layout)) {
  if (rows_ == 0) throw std::invalid_argument("relaxed dataset needs rows");
  values_.assign(rows_ * layout_.width, 0.0);
}

RelaxedDataset InitRelaxed(size_t n_prime, const Schema& schema, Rng& rng) {
  RelaxedDataset relaxed(n_prime, BlockLayout::FromSchema(schema));
  for (double& v : relaxed.values()) v = Uniform01(rng);
  return relaxed;
}

RelaxedDataset RelaxedFromRecords(std::span<const Category> records,
                                  const Schema& schema) {
  const size_t d = schema.num_features();
  const size_t n = records.size() / d;
  RelaxedDataset relaxed(n, BlockLayout::FromSchema(schema));
  for (size_t i = 0; i < n; ++i) {
    auto row = relaxed.row(i);
    for (size_t f = 0; f < d; ++f) {
      row[schema.block_offset(f) + records[i * d + f]] = 1.0;
    }
  }
  return relaxed;
}

void SaveRelaxed(const std::string& path, const RelaxedDataset& relaxed,
                 const Schema& schema, char delimiter) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out.precision(17);
  bool first = true;
  for (size_t f = 0; f < schema.num_features(); ++f) {
    for (const auto& category : schema.feature(f).categories) {
      if (!first) out << delimiter;
      first = false;
      out << Quote(schema.feature(f).name + "=" + category, delimiter);
    }
  }
  out << "\n";
  for (size_t i = 0; i < relaxed.rows(); ++i) {
    auto row = relaxed.row(i);
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) out << delimiter;
      out << row[j];
    }
    out << "\n";
  }
}

}  // namespace rap
