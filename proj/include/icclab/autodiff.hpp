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

// Reverse-mode automatic differentiation over dense matrices.
//
// A Tape records every operation applied to its variables. Calling
// backward() on a 1x1 result walks the record in reverse and accumulates
// d(result)/d(node) into every node; leaves created with requires_grad keep
// theirs for the caller.

#ifndef ICCLAB_AUTODIFF_HPP_
#define ICCLAB_AUTODIFF_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace icclab::ad {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> values);

  std::size_t size() const { return data.size(); }
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool operator==(const Matrix&) const = default;
};

class Tape;

// Handle to a node of a tape. Cheap to copy; valid while the tape lives.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Matrix& value() const;
  const Matrix& grad() const;
  std::size_t rows() const { return value().rows; }
  std::size_t cols() const { return value().cols; }
  double scalar() const;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Matrix value, bool requires_grad = false);
  Var constant(Matrix value) { return leaf(std::move(value), false); }
  Var scalar(double v) { return constant(Matrix(1, 1, v)); }

  // Seeds d(out)/d(out) = 1 and propagates. Throws kNonScalarOutput unless
  // out is 1x1 and kUnsupportedPrimitive when gradient reaches a node that
  // has no adjoint.
  void backward(Var out);

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  // Zero matrix of the node's shape when nothing flowed into it.
  const Matrix& grad(std::size_t id) const;
  std::size_t size() const { return nodes_.size(); }

  // Building blocks for operations. `adjoint` receives the output gradient
  // and adds into the inputs through accumulate(), which returns nullptr for
  // nodes that no parameter depends on.
  using Adjoint = std::function<void(Tape&, const Matrix& g)>;
  Var record(Matrix value, std::vector<std::size_t> inputs, Adjoint adjoint,
             const char* name);
  // Forward-only node: any gradient arriving here is an error.
  Var record_forward_only(Matrix value, std::vector<std::size_t> inputs, const char* name);
  Matrix* accumulate(std::size_t id);

 private:
  struct Node {
    Matrix value;
    mutable Matrix grad;
    bool has_grad = false;
    bool needs_grad = false;
    bool differentiable = true;
    const char* name = "";
    Adjoint adjoint;
  };
  std::vector<Node> nodes_;
};

// Elementwise, same shapes.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
Var relu(Var a);
Var tanh(Var a);
Var exp(Var a);
Var log(Var a);
Var square(Var a);

// Constant factors and offsets.
Var scale(Var a, double c);
Var add_scalar(Var a, double c);
// s is 1x1: s * a and a + s.
Var scale_by(Var a, Var s);
Var shift_by(Var a, Var s);
// r is 1 x cols: row-broadcast a + r and a - r.
Var add_row(Var a, Var r);
Var sub_row(Var a, Var r);
// c is rows x 1: out(i, j) = a(i, j) * c(i).
Var mul_col(Var a, Var c);

// Linear algebra.
Var matmul(Var a, Var b);     // a b
Var matmul_nt(Var a, Var b);  // a b^T
Var transpose(Var a);

// Reductions.
Var row_sum(Var a);   // rows x 1
Var col_sum(Var a);   // 1 x cols
Var sum_all(Var a);   // 1 x 1
Var mean_all(Var a);  // 1 x 1
Var row_dot(Var a, Var b);  // rows x 1
// log sum_j mask(i, j) exp(a(i, j)) per row; mask of 0/1 entries, or all
// entries when mask is empty. Every row must keep at least one entry.
Var logsumexp_rows(Var a, const Matrix& mask = {});

// Row geometry.
Var normalize_rows(Var a);  // a(i, :) / |a(i, :)|; kZeroVector on a zero row
Var cosine_rows(Var a, Var b);  // rows x 1

// Class structure over consecutive row groups of the given sizes.
Var group_mean(Var a, std::span<const std::size_t> sizes);
Var expand_groups(Var a, std::span<const std::size_t> sizes);
Var gather_rows(Var a, std::span<const std::size_t> index);

// Forward-only: column index of each row's maximum, as a rows x 1 matrix.
Var argmax_rows(Var a);

}  // namespace icclab::ad

#endif  // ICCLAB_AUTODIFF_HPP_
