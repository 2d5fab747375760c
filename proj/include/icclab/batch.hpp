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

#ifndef ICCLAB_BATCH_HPP_
#define ICCLAB_BATCH_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace icclab {

// Labelled embedding vectors grouped by class. Rows of one class are stored
// contiguously (class-major, row-major), so a class is a dense
// [k_j x dim] block that the kernels can stream over.
class EmbeddingBatch {
 public:
  EmbeddingBatch() = default;

  // Balanced layout: n_classes blocks of per_class rows each.
  EmbeddingBatch(std::size_t n_classes, std::size_t per_class, std::size_t dim,
                 std::vector<double> values);

  // Ragged layout: class_sizes[j] rows for class j.
  EmbeddingBatch(std::vector<std::size_t> class_sizes, std::size_t dim,
                 std::vector<double> values);

  // classes[j][i] is sample i of class j.
  static EmbeddingBatch from_classes(
      const std::vector<std::vector<std::vector<double>>>& classes);

  std::size_t n_classes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t dim() const { return dim_; }
  std::size_t total_rows() const { return offsets_.empty() ? 0 : offsets_.back(); }
  std::size_t class_size(std::size_t j) const { return offsets_[j + 1] - offsets_[j]; }
  std::size_t class_begin(std::size_t j) const { return offsets_[j]; }
  bool is_balanced() const;

  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * dim_, dim_};
  }
  // Contiguous [class_size(j) x dim] block.
  std::span<const double> class_block(std::size_t j) const {
    return {values_.data() + offsets_[j] * dim_, class_size(j) * dim_};
  }
  std::vector<std::size_t> class_sizes() const;

  // Optional external labels (e.g. CSV class_id strings), one per class.
  const std::vector<std::string>& class_names() const { return class_names_; }
  void set_class_names(std::vector<std::string> names);
  // Optional per-row sample ids, used only for round-tripping CSV files.
  const std::vector<std::string>& sample_ids() const { return sample_ids_; }
  void set_sample_ids(std::vector<std::string> ids);

  bool operator==(const EmbeddingBatch& other) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
  std::vector<std::string> class_names_;
  std::vector<std::string> sample_ids_;
};

}  // namespace icclab

#endif  // ICCLAB_BATCH_HPP_
