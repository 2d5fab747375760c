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

#include "icclab/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "icclab/error.hpp"
#include "icclab/kernels.hpp"

namespace icclab::ad {

namespace {

void require_same_shape(Var a, Var b, const char* op) {
  if (a.tape != b.tape) throw Error(ErrorCode::kInvalidArgument, std::string(op) + ": variables from different tapes");
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(op) + ": shape " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()));
  }
}

void require(bool ok, const char* op, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string(op) + ": " + what);
}

std::vector<std::size_t> group_offsets(std::span<const std::size_t> sizes, std::size_t rows,
                                       const char* op) {
  std::vector<std::size_t> off(sizes.size() + 1, 0);
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    require(sizes[g] > 0, op, "empty group");
    off[g + 1] = off[g] + sizes[g];
  }
  require(off.back() == rows, op, "group sizes do not cover the rows");
  return off;
}

}  // namespace

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != r * c) throw Error(ErrorCode::kInvalidArgument, "matrix data does not match its shape");
}

const Matrix& Var::value() const { return tape->value(id); }
const Matrix& Var::grad() const { return tape->grad(id); }

double Var::scalar() const {
  const Matrix& v = value();
  if (v.size() != 1) throw Error(ErrorCode::kNonScalarOutput, "value is not 1x1");
  return v.data[0];
}

Var Tape::leaf(Matrix value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = requires_grad;
  n.name = requires_grad ? "parameter" : "constant";
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::record(Matrix value, std::vector<std::size_t> inputs, Adjoint adjoint,
                 const char* name) {
  Node n;
  n.value = std::move(value);
  n.name = name;
  for (std::size_t in : inputs) n.needs_grad = n.needs_grad || nodes_[in].needs_grad;
  if (n.needs_grad) n.adjoint = std::move(adjoint);
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::record_forward_only(Matrix value, std::vector<std::size_t> inputs, const char* name) {
  Var v = record(std::move(value), std::move(inputs), nullptr, name);
  nodes_[v.id].differentiable = false;
  return v;
}

Matrix* Tape::accumulate(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.needs_grad) return nullptr;
  if (!n.has_grad) {
    n.grad = Matrix(n.value.rows, n.value.cols);
    n.has_grad = true;
  }
  return &n.grad;
}

const Matrix& Tape::grad(std::size_t id) const {
  const Node& n = nodes_[id];
  if (!n.has_grad && n.grad.size() != n.value.size()) n.grad = Matrix(n.value.rows, n.value.cols);
  return n.grad;
}

void Tape::backward(Var out) {
  if (out.tape != this) throw Error(ErrorCode::kInvalidArgument, "backward on a foreign variable");
  const Matrix& v = nodes_[out.id].value;
  if (v.rows != 1 || v.cols != 1) {
    throw Error(ErrorCode::kNonScalarOutput, "backward needs a 1x1 output, got " +
                                                 std::to_string(v.rows) + "x" + std::to_string(v.cols));
  }
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad = Matrix();
  }
  if (Matrix* g = accumulate(out.id)) g->data[0] = 1.0;
  for (std::size_t id = out.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.has_grad) continue;
    if (!n.differentiable) {
      throw Error(ErrorCode::kUnsupportedPrimitive,
                  std::string("no gradient is defined for '") + n.name + "'");
    }
    // Adjoints only write to earlier nodes and never add new ones.
    if (n.adjoint) n.adjoint(*this, n.grad);
  }
}

// ---- elementwise -------------------------------------------------------

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += b.value().data[i];
  return a.tape->record(std::move(out), {a.id, b.id}, [a, b](Tape& t, const Matrix& g) {
    for (std::size_t id : {a.id, b.id}) {
      if (Matrix* gx = t.accumulate(id)) {
        for (std::size_t i = 0; i < g.size(); ++i) gx->data[i] += g.data[i];
      }
    }
  }, "add");
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] -= b.value().data[i];
  return a.tape->record(std::move(out), {a.id, b.id}, [a, b](Tape& t, const Matrix& g) {
    if (Matrix* ga = t.accumulate(a.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) ga->data[i] += g.data[i];
    }
    if (Matrix* gb = t.accumulate(b.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) gb->data[i] -= g.data[i];
    }
  }, "sub");
}

Var mul(Var a, Var b) {
  require_same_shape(a, b, "mul");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= b.value().data[i];
  return a.tape->record(std::move(out), {a.id, b.id}, [a, b](Tape& t, const Matrix& g) {
    const Matrix& av = t.value(a.id);
    const Matrix& bv = t.value(b.id);
    if (Matrix* ga = t.accumulate(a.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) ga->data[i] += g.data[i] * bv.data[i];
    }
    if (Matrix* gb = t.accumulate(b.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) gb->data[i] += g.data[i] * av.data[i];
    }
  }, "mul");
}

Var div(Var a, Var b) {
  require_same_shape(a, b, "div");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] /= b.value().data[i];
  return a.tape->record(std::move(out), {a.id, b.id}, [a, b](Tape& t, const Matrix& g) {
    const Matrix& av = t.value(a.id);
    const Matrix& bv = t.value(b.id);
    if (Matrix* ga = t.accumulate(a.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) ga->data[i] += g.data[i] / bv.data[i];
    }
    if (Matrix* gb = t.accumulate(b.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        gb->data[i] -= g.data[i] * av.data[i] / (bv.data[i] * bv.data[i]);
      }
    }
  }, "div");
}

namespace {

// y = f(x) elementwise with dy/dx = df(x, y).
template <typename F, typename DF>
Var pointwise(Var a, const char* name, F f, DF df) {
  Matrix out(a.rows(), a.cols());
  const Matrix& x = a.value();
  for (std::size_t i = 0; i < x.size(); ++i) out.data[i] = f(x.data[i]);
  Tape* tape = a.tape;
  const std::size_t self = tape->size();
  return tape->record(std::move(out), {a.id}, [a, self, df](Tape& t, const Matrix& g) {
    Matrix* ga = t.accumulate(a.id);
    if (!ga) return;
    const Matrix& xv = t.value(a.id);
    const Matrix& yv = t.value(self);
    for (std::size_t i = 0; i < g.size(); ++i) ga->data[i] += g.data[i] * df(xv.data[i], yv.data[i]);
  }, name);
}

}  // namespace

Var relu(Var a) {
  return pointwise(a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
                   [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var tanh(Var a) {
  return pointwise(a, "tanh", [](double x) { return std::tanh(x); },
                   [](double, double y) { return 1.0 - y * y; });
}

Var exp(Var a) {
  return pointwise(a, "exp", [](double x) { return std::exp(x); },
                   [](double, double y) { return y; });
}

Var log(Var a) {
  return pointwise(a, "log", [](double x) { return std::log(x); },
                   [](double x, double) { return 1.0 / x; });
}

Var square(Var a) {
  return pointwise(a, "square", [](double x) { return x * x; },
                   [](double x, double) { return 2.0 * x; });
}

Var scale(Var a, double c) {
  return pointwise(a, "scale", [c](double x) { return c * x; },
                   [c](double, double) { return c; });
}

Var add_scalar(Var a, double c) {
  return pointwise(a, "add_scalar", [c](double x) { return x + c; },
                   [](double, double) { return 1.0; });
}

Var scale_by(Var a, Var s) {
  require(s.rows() == 1 && s.cols() == 1, "scale_by", "factor must be 1x1");
  const double sv = s.value().data[0];
  Matrix out = a.value();
  for (double& x : out.data) x *= sv;
  return a.tape->record(std::move(out), {a.id, s.id}, [a, s](Tape& t, const Matrix& g) {
    const Matrix& av = t.value(a.id);
    const double c = t.value(s.id).data[0];
    if (Matrix* ga = t.accumulate(a.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) ga->data[i] += c * g.data[i];
    }
    if (Matrix* gs = t.accumulate(s.id)) {
      gs->data[0] += simd::kernels().dot(g.data.data(), av.data.data(), g.size());
    }
  }, "scale_by");
}

Var shift_by(Var a, Var s) {
  require(s.rows() == 1 && s.cols() == 1, "shift_by", "offset must be 1x1");
  const double sv = s.value().data[0];
  Matrix out = a.value();
  for (double& x : out.data) x += sv;
  return a.tape->record(std::move(out), {a.id, s.id}, [a, s](Tape& t, const Matrix& g) {
    if (Matrix* ga = t.accumulate(a.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) ga->data[i] += g.data[i];
    }
    if (Matrix* gs = t.accumulate(s.id)) {
      double sum = 0.0;
      for (double v : g.data) sum += v;
      gs->data[0] += sum;
    }
  }, "shift_by");
}

namespace {

Var row_broadcast(Var a, Var r, double sign, const char* name) {
  require(r.rows() == 1 && r.cols() == a.cols(), name, "row vector must be 1 x cols");
  Matrix out = a.value();
  const Matrix& rv = r.value();
  for (std::size_t i = 0; i < out.rows; ++i) {
    for (std::size_t j = 0; j < out.cols; ++j) out(i, j) += sign * rv.data[j];
  }
  return a.tape->record(std::move(out), {a.id, r.id}, [a, r, sign](Tape& t, const Matrix& g) {
    if (Matrix* ga = t.accumulate(a.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) ga->data[i] += g.data[i];
    }
    if (Matrix* gr = t.accumulate(r.id)) {
      std::vector<double> sums(g.cols);
      simd::kernels().col_sum(g.data.data(), g.rows, g.cols, sums.data());
      for (std::size_t j = 0; j < g.cols; ++j) gr->data[j] += sign * sums[j];
    }
  }, name);
}

}  // namespace

Var add_row(Var a, Var r) { return row_broadcast(a, r, 1.0, "add_row"); }
Var sub_row(Var a, Var r) { return row_broadcast(a, r, -1.0, "sub_row"); }

Var mul_col(Var a, Var c) {
  require(c.cols() == 1 && c.rows() == a.rows(), "mul_col", "column vector must be rows x 1");
  Matrix out = a.value();
  const Matrix& cv = c.value();
  for (std::size_t i = 0; i < out.rows; ++i) {
    for (std::size_t j = 0; j < out.cols; ++j) out(i, j) *= cv.data[i];
  }
  return a.tape->record(std::move(out), {a.id, c.id}, [a, c](Tape& t, const Matrix& g) {
    const Matrix& av = t.value(a.id);
    const Matrix& cv = t.value(c.id);
    if (Matrix* ga = t.accumulate(a.id)) {
      for (std::size_t i = 0; i < g.rows; ++i) {
        for (std::size_t j = 0; j < g.cols; ++j) (*ga)(i, j) += g(i, j) * cv.data[i];
      }
    }
    if (Matrix* gc = t.accumulate(c.id)) {
      const auto& k = simd::kernels();
      for (std::size_t i = 0; i < g.rows; ++i) {
        gc->data[i] += k.dot(&g.data[i * g.cols], &av.data[i * av.cols], g.cols);
      }
    }
  }, "mul_col");
}

// ---- linear algebra ----------------------------------------------------

Var matmul(Var a, Var b) {
  require(a.cols() == b.rows(), "matmul", "inner dimensions differ");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Matrix out(m, n);
  simd::kernels().gemm_nn(a.value().data.data(), b.value().data.data(), out.data.data(), m, k, n, false);
  return a.tape->record(std::move(out), {a.id, b.id}, [a, b, m, k, n](Tape& t, const Matrix& g) {
    const auto& ker = simd::kernels();
    if (Matrix* ga = t.accumulate(a.id)) {
      // dA = G B^T
      ker.gemm_nt(g.data.data(), t.value(b.id).data.data(), ga->data.data(), m, n, k, true);
    }
    if (Matrix* gb = t.accumulate(b.id)) {
      // dB = A^T G
      ker.gemm_tn(t.value(a.id).data.data(), g.data.data(), gb->data.data(), k, m, n, true);
    }
  }, "matmul");
}

Var matmul_nt(Var a, Var b) {
  require(a.cols() == b.cols(), "matmul_nt", "inner dimensions differ");
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  Matrix out(m, n);
  simd::kernels().gemm_nt(a.value().data.data(), b.value().data.data(), out.data.data(), m, k, n, false);
  return a.tape->record(std::move(out), {a.id, b.id}, [a, b, m, k, n](Tape& t, const Matrix& g) {
    const auto& ker = simd::kernels();
    if (Matrix* ga = t.accumulate(a.id)) {
      // dA = G B
      ker.gemm_nn(g.data.data(), t.value(b.id).data.data(), ga->data.data(), m, n, k, true);
    }
    if (Matrix* gb = t.accumulate(b.id)) {
      // dB = G^T A
      ker.gemm_tn(g.data.data(), t.value(a.id).data.data(), gb->data.data(), n, m, k, true);
    }
  }, "matmul_nt");
}

Var transpose(Var a) {
  const Matrix& x = a.value();
  Matrix out(x.cols, x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) out(j, i) = x(i, j);
  }
  return a.tape->record(std::move(out), {a.id}, [a](Tape& t, const Matrix& g) {
    if (Matrix* ga = t.accumulate(a.id)) {
      for (std::size_t i = 0; i < ga->rows; ++i) {
        for (std::size_t j = 0; j < ga->cols; ++j) (*ga)(i, j) += g(j, i);
      }
    }
  }, "transpose");
}

// ---- reductions --------------------------------------------------------

Var row_sum(Var a) {
  const Matrix& x = a.value();
  Matrix out(x.rows, 1);
  for (std::size_t i = 0; i < x.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols; ++j) s += x(i, j);
    out.data[i] = s;
  }
  return a.tape->record(std::move(out), {a.id}, [a](Tape& t, const Matrix& g) {
    if (Matrix* ga = t.accumulate(a.id)) {
      for (std::size_t i = 0; i < ga->rows; ++i) {
        for (std::size_t j = 0; j < ga->cols; ++j) (*ga)(i, j) += g.data[i];
      }
    }
  }, "row_sum");
}

Var col_sum(Var a) {
  const Matrix& x = a.value();
  Matrix out(1, x.cols);
  simd::kernels().col_sum(x.data.data(), x.rows, x.cols, out.data.data());
  return a.tape->record(std::move(out), {a.id}, [a](Tape& t, const Matrix& g) {
    if (Matrix* ga = t.accumulate(a.id)) {
      for (std::size_t i = 0; i < ga->rows; ++i) {
        for (std::size_t j = 0; j < ga->cols; ++j) (*ga)(i, j) += g.data[j];
      }
    }
  }, "col_sum");
}

Var sum_all(Var a) {
  double s = 0.0;
  for (double v : a.value().data) s += v;
  return a.tape->record(Matrix(1, 1, s), {a.id}, [a](Tape& t, const Matrix& g) {
    if (Matrix* ga = t.accumulate(a.id)) {
      for (double& v : ga->data) v += g.data[0];
    }
  }, "sum_all");
}

Var mean_all(Var a) {
  require(a.value().size() > 0, "mean_all", "empty matrix");
  return scale(sum_all(a), 1.0 / static_cast<double>(a.value().size()));
}

Var row_dot(Var a, Var b) {
  require_same_shape(a, b, "row_dot");
  const auto& k = simd::kernels();
  const Matrix& x = a.value();
  Matrix out(x.rows, 1);
  for (std::size_t i = 0; i < x.rows; ++i) {
    out.data[i] = k.dot(&x.data[i * x.cols], &b.value().data[i * x.cols], x.cols);
  }
  return a.tape->record(std::move(out), {a.id, b.id}, [a, b](Tape& t, const Matrix& g) {
    const Matrix& av = t.value(a.id);
    const Matrix& bv = t.value(b.id);
    const auto& ker = simd::kernels();
    const std::size_t cols = av.cols;
    if (Matrix* ga = t.accumulate(a.id)) {
      for (std::size_t i = 0; i < av.rows; ++i) ker.axpy(g.data[i], &bv.data[i * cols], &ga->data[i * cols], cols);
    }
    if (Matrix* gb = t.accumulate(b.id)) {
      for (std::size_t i = 0; i < av.rows; ++i) ker.axpy(g.data[i], &av.data[i * cols], &gb->data[i * cols], cols);
    }
  }, "row_dot");
}

Var logsumexp_rows(Var a, const Matrix& mask) {
  const Matrix& x = a.value();
  const bool masked = !mask.data.empty();
  if (masked) require(mask.rows == x.rows && mask.cols == x.cols, "logsumexp_rows", "mask shape differs");
  auto keep = [&mask, masked](std::size_t i) { return !masked || mask.data[i] != 0.0; };
  Matrix out(x.rows, 1);
  // Softmax weights, reused by the adjoint.
  Matrix weights(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < x.cols; ++j) {
      if (keep(i * x.cols + j)) mx = std::max(mx, x(i, j));
    }
    require(std::isfinite(mx), "logsumexp_rows", "a row has no finite entries");
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols; ++j) {
      if (keep(i * x.cols + j)) {
        weights(i, j) = std::exp(x(i, j) - mx);
        s += weights(i, j);
      }
    }
    for (std::size_t j = 0; j < x.cols; ++j) weights(i, j) /= s;
    out.data[i] = mx + std::log(s);
  }
  return a.tape->record(std::move(out), {a.id}, [a, w = std::move(weights)](Tape& t, const Matrix& g) {
    if (Matrix* ga = t.accumulate(a.id)) {
      for (std::size_t i = 0; i < w.rows; ++i) {
        for (std::size_t j = 0; j < w.cols; ++j) (*ga)(i, j) += g.data[i] * w(i, j);
      }
    }
  }, "logsumexp_rows");
}

// ---- row geometry ------------------------------------------------------

Var normalize_rows(Var a) {
  const Matrix& x = a.value();
  const auto& k = simd::kernels();
  Matrix out(x.rows, x.cols);
  std::vector<double> norms(x.rows);
  k.row_sq_norms(x.data.data(), x.rows, x.cols, norms.data());
  for (std::size_t i = 0; i < x.rows; ++i) {
    if (norms[i] == 0.0) {
      throw Error(ErrorCode::kZeroVector, "normalize_rows: row " + std::to_string(i) + " is zero");
    }
    norms[i] = std::sqrt(norms[i]);
    for (std::size_t j = 0; j < x.cols; ++j) out(i, j) = x(i, j) / norms[i];
  }
  const std::size_t self = a.tape->size();
  return a.tape->record(std::move(out), {a.id}, [a, self, norms = std::move(norms)](Tape& t, const Matrix& g) {
    Matrix* ga = t.accumulate(a.id);
    if (!ga) return;
    const Matrix& y = t.value(self);
    const auto& ker = simd::kernels();
    // dx = (g - y (y . g)) / |x|
    for (std::size_t i = 0; i < y.rows; ++i) {
      const double* yi = &y.data[i * y.cols];
      const double* gi = &g.data[i * y.cols];
      const double yg = ker.dot(yi, gi, y.cols);
      const double inv = 1.0 / norms[i];
      for (std::size_t j = 0; j < y.cols; ++j) (*ga)(i, j) += (gi[j] - yi[j] * yg) * inv;
    }
  }, "normalize_rows");
}

Var cosine_rows(Var a, Var b) { return row_dot(normalize_rows(a), normalize_rows(b)); }

// ---- class structure ---------------------------------------------------

Var group_mean(Var a, std::span<const std::size_t> sizes) {
  const Matrix& x = a.value();
  const std::vector<std::size_t> off = group_offsets(sizes, x.rows, "group_mean");
  const auto& k = simd::kernels();
  Matrix out(sizes.size(), x.cols);
  for (std::size_t gi = 0; gi < sizes.size(); ++gi) {
    k.col_sum(&x.data[off[gi] * x.cols], sizes[gi], x.cols, &out.data[gi * x.cols]);
    const double inv = 1.0 / static_cast<double>(sizes[gi]);
    for (std::size_t j = 0; j < x.cols; ++j) out(gi, j) *= inv;
  }
  return a.tape->record(std::move(out), {a.id}, [a, off](Tape& t, const Matrix& g) {
    Matrix* ga = t.accumulate(a.id);
    if (!ga) return;
    for (std::size_t gi = 0; gi + 1 < off.size(); ++gi) {
      const double inv = 1.0 / static_cast<double>(off[gi + 1] - off[gi]);
      for (std::size_t r = off[gi]; r < off[gi + 1]; ++r) {
        for (std::size_t j = 0; j < g.cols; ++j) (*ga)(r, j) += g(gi, j) * inv;
      }
    }
  }, "group_mean");
}

Var expand_groups(Var a, std::span<const std::size_t> sizes) {
  const Matrix& x = a.value();
  require(sizes.size() == x.rows, "expand_groups", "one size per row expected");
  std::size_t total = 0;
  for (std::size_t s : sizes) total += s;
  const std::vector<std::size_t> off = group_offsets(sizes, total, "expand_groups");
  Matrix out(total, x.cols);
  for (std::size_t gi = 0; gi < sizes.size(); ++gi) {
    for (std::size_t r = off[gi]; r < off[gi + 1]; ++r) {
      std::copy_n(&x.data[gi * x.cols], x.cols, &out.data[r * x.cols]);
    }
  }
  return a.tape->record(std::move(out), {a.id}, [a, off](Tape& t, const Matrix& g) {
    Matrix* ga = t.accumulate(a.id);
    if (!ga) return;
    for (std::size_t gi = 0; gi + 1 < off.size(); ++gi) {
      for (std::size_t r = off[gi]; r < off[gi + 1]; ++r) {
        for (std::size_t j = 0; j < g.cols; ++j) (*ga)(gi, j) += g(r, j);
      }
    }
  }, "expand_groups");
}

Var gather_rows(Var a, std::span<const std::size_t> index) {
  const Matrix& x = a.value();
  Matrix out(index.size(), x.cols);
  for (std::size_t r = 0; r < index.size(); ++r) {
    require(index[r] < x.rows, "gather_rows", "row index out of range");
    std::copy_n(&x.data[index[r] * x.cols], x.cols, &out.data[r * x.cols]);
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return a.tape->record(std::move(out), {a.id}, [a, idx = std::move(idx)](Tape& t, const Matrix& g) {
    if (Matrix* ga = t.accumulate(a.id)) {
      for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t j = 0; j < g.cols; ++j) (*ga)(idx[r], j) += g(r, j);
      }
    }
  }, "gather_rows");
}

Var argmax_rows(Var a) {
  const Matrix& x = a.value();
  Matrix out(x.rows, 1);
  for (std::size_t i = 0; i < x.rows; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < x.cols; ++j) {
      if (x(i, j) > x(i, best)) best = j;
    }
    out.data[i] = static_cast<double>(best);
  }
  return a.tape->record_forward_only(std::move(out), {a.id}, "argmax_rows");
}

}  // namespace icclab::ad
