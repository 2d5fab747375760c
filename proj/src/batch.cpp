// Copyright (c) 2026 The icc-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "icclab/batch.hpp"

#include <utility>

#include "icclab/error.hpp"

namespace icclab {

EmbeddingBatch::EmbeddingBatch(std::size_t n_classes, std::size_t per_class,
                               std::size_t dim, std::vector<double> values)
    : EmbeddingBatch(std::vector<std::size_t>(n_classes, per_class), dim,
                     std::move(values)) {}

EmbeddingBatch::EmbeddingBatch(std::vector<std::size_t> class_sizes,
                               std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dim must be >= 1");
  offsets_.reserve(class_sizes.size() + 1);
  offsets_.push_back(0);
  for (const std::size_t k : class_sizes) offsets_.push_back(offsets_.back() + k);
  if (values_.size() != offsets_.back() * dim_) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(offsets_.back() * dim_) +
                    " values, got " + std::to_string(values_.size()));
  }
}

EmbeddingBatch EmbeddingBatch::from_classes(
    const std::vector<std::vector<std::vector<double>>>& classes) {
  std::vector<std::size_t> sizes;
  std::vector<double> values;
  std::size_t dim = 0;
  for (const auto& cls : classes) {
    sizes.push_back(cls.size());
    for (const auto& v : cls) {
      if (dim == 0) dim = v.size();
      if (v.size() != dim) {
        throw Error(ErrorCode::kInvalidArgument, "all vectors must share one dimension");
      }
      values.insert(values.end(), v.begin(), v.end());
    }
  }
  return EmbeddingBatch(std::move(sizes), dim, std::move(values));
}

bool EmbeddingBatch::is_balanced() const {
  for (std::size_t j = 1; j < n_classes(); ++j) {
    if (class_size(j) != class_size(0)) return false;
  }
  return true;
}

std::vector<std::size_t> EmbeddingBatch::class_sizes() const {
  std::vector<std::size_t> sizes(n_classes());
  for (std::size_t j = 0; j < sizes.size(); ++j) sizes[j] = class_size(j);
  return sizes;
}

void EmbeddingBatch::set_class_names(std::vector<std::string> names) {
  if (names.size() != n_classes()) {
    throw Error(ErrorCode::kInvalidArgument, "one name per class required");
  }
  class_names_ = std::move(names);
}

void EmbeddingBatch::set_sample_ids(std::vector<std::string> ids) {
  if (ids.size() != total_rows()) {
    throw Error(ErrorCode::kInvalidArgument, "one sample id per row required");
  }
  sample_ids_ = std::move(ids);
}

}  // namespace icclab
