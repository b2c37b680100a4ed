// Copyright 2026 The hrtfkit Authors
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

#ifndef HRTFKIT_NN_TENSOR_HPP_
#define HRTFKIT_NN_TENSOR_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace hrtf {

// Reverse-mode autodiff over dense row-major tensors. Scalar type T is
// float in training and double in gradient-checking builds; finite
// differences are unreliable at 32 bits.
template <typename T>
struct TensorNode {
  std::vector<int> shape;
  std::vector<T> values;
  std::vector<T> grad;  // allocated iff requires_grad
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode<T>>> parents;
  std::function<void()> backward_fn;

  size_t numel() const { return values.size(); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }

  void zero_grad() {
    if (requires_grad) grad.assign(values.size(), T(0));
  }
};

template <typename T>
using TensorPtr = std::shared_ptr<TensorNode<T>>;

namespace detail {

inline size_t shape_numel(const std::vector<int>& shape) {
  size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw_invalid("tensor: non-positive dimension");
    n *= static_cast<size_t>(d);
  }
  return n;
}

template <typename T>
void assert_finite(const std::vector<T>& v, const char* op) {
  for (T x : v) {
    if (!std::isfinite(static_cast<double>(x))) {
      throw_numeric(std::string("non-finite value produced by ") + op);
    }
  }
}

template <typename T>
using EMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using EMap = Eigen::Map<EMat<T>>;
template <typename T>
using ECMap = Eigen::Map<const EMat<T>>;

}  // namespace detail

template <typename T>
TensorPtr<T> make_tensor(std::vector<int> shape, std::vector<T> values,
                         bool requires_grad = false) {
  if (detail::shape_numel(shape) != values.size()) {
    throw_invalid("tensor: shape does not match value count");
  }
  detail::assert_finite(values, "make_tensor");
  auto node = std::make_shared<TensorNode<T>>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->requires_grad = requires_grad;
  if (requires_grad) node->grad.assign(node->values.size(), T(0));
  return node;
}

template <typename T>
TensorPtr<T> zeros(std::vector<int> shape, bool requires_grad = false) {
  const size_t n = detail::shape_numel(shape);
  return make_tensor<T>(std::move(shape), std::vector<T>(n, T(0)), requires_grad);
}

// Gaussian-initialized parameter tensor.
template <typename T>
TensorPtr<T> randn(std::vector<int> shape, Rng& rng, double stddev,
                   bool requires_grad = true) {
  const size_t n = detail::shape_numel(shape);
  std::vector<T> values(n);
  for (T& v : values) v = static_cast<T>(rng.next_gaussian() * stddev);
  return make_tensor<T>(std::move(shape), std::move(values), requires_grad);
}

namespace detail {

template <typename T>
TensorPtr<T> new_result(std::vector<int> shape, std::vector<T> values,
                        std::vector<TensorPtr<T>> parents, const char* op) {
  assert_finite(values, op);
  auto node = std::make_shared<TensorNode<T>>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->parents = std::move(parents);
  for (const auto& p : node->parents) {
    if (p->requires_grad) node->requires_grad = true;
  }
  if (node->requires_grad) node->grad.assign(node->values.size(), T(0));
  return node;
}

template <typename T>
void check_same_shape(const TensorPtr<T>& a, const TensorPtr<T>& b, const char* op) {
  if (a->shape != b->shape) {
    throw_invalid(std::string(op) + ": shape mismatch");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise arithmetic
// ---------------------------------------------------------------------------

template <typename T>
TensorPtr<T> add(const TensorPtr<T>& a, const TensorPtr<T>& b) {
  detail::check_same_shape(a, b, "add");
  std::vector<T> out(a->numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a->values[i] + b->values[i];
  auto node = detail::new_result<T>(a->shape, std::move(out), {a, b}, "add");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, b, raw]() {
      if (a->requires_grad) {
        for (size_t i = 0; i < raw->grad.size(); ++i) a->grad[i] += raw->grad[i];
      }
      if (b->requires_grad) {
        for (size_t i = 0; i < raw->grad.size(); ++i) b->grad[i] += raw->grad[i];
      }
    };
  }
  return node;
}

template <typename T>
TensorPtr<T> sub(const TensorPtr<T>& a, const TensorPtr<T>& b) {
  detail::check_same_shape(a, b, "sub");
  std::vector<T> out(a->numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a->values[i] - b->values[i];
  auto node = detail::new_result<T>(a->shape, std::move(out), {a, b}, "sub");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, b, raw]() {
      if (a->requires_grad) {
        for (size_t i = 0; i < raw->grad.size(); ++i) a->grad[i] += raw->grad[i];
      }
      if (b->requires_grad) {
        for (size_t i = 0; i < raw->grad.size(); ++i) b->grad[i] -= raw->grad[i];
      }
    };
  }
  return node;
}

template <typename T>
TensorPtr<T> mul(const TensorPtr<T>& a, const TensorPtr<T>& b) {
  detail::check_same_shape(a, b, "mul");
  std::vector<T> out(a->numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a->values[i] * b->values[i];
  auto node = detail::new_result<T>(a->shape, std::move(out), {a, b}, "mul");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, b, raw]() {
      if (a->requires_grad) {
        for (size_t i = 0; i < raw->grad.size(); ++i) {
          a->grad[i] += raw->grad[i] * b->values[i];
        }
      }
      if (b->requires_grad) {
        for (size_t i = 0; i < raw->grad.size(); ++i) {
          b->grad[i] += raw->grad[i] * a->values[i];
        }
      }
    };
  }
  return node;
}

template <typename T>
TensorPtr<T> scale(const TensorPtr<T>& a, T c) {
  std::vector<T> out(a->numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a->values[i] * c;
  auto node = detail::new_result<T>(a->shape, std::move(out), {a}, "scale");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, c, raw]() {
      for (size_t i = 0; i < raw->grad.size(); ++i) a->grad[i] += raw->grad[i] * c;
    };
  }
  return node;
}

// ---------------------------------------------------------------------------
// Shape plumbing
// ---------------------------------------------------------------------------

template <typename T>
TensorPtr<T> reshape(const TensorPtr<T>& a, std::vector<int> shape) {
  if (detail::shape_numel(shape) != a->numel()) {
    throw_invalid("reshape: element count mismatch");
  }
  auto node = detail::new_result<T>(std::move(shape), a->values, {a}, "reshape");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, raw]() {
      for (size_t i = 0; i < raw->grad.size(); ++i) a->grad[i] += raw->grad[i];
    };
  }
  return node;
}

template <typename T>
TensorPtr<T> transpose2d(const TensorPtr<T>& a) {
  if (a->shape.size() != 2) throw_invalid("transpose2d: rank-2 tensor required");
  const int rows = a->dim(0);
  const int cols = a->dim(1);
  std::vector<T> out(a->numel());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      out[static_cast<size_t>(c) * rows + static_cast<size_t>(r)] =
          a->values[static_cast<size_t>(r) * cols + static_cast<size_t>(c)];
    }
  }
  auto node = detail::new_result<T>({cols, rows}, std::move(out), {a}, "transpose2d");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, rows, cols, raw]() {
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
          a->grad[static_cast<size_t>(r) * cols + static_cast<size_t>(c)] +=
              raw->grad[static_cast<size_t>(c) * rows + static_cast<size_t>(r)];
        }
      }
    };
  }
  return node;
}

// Columns [start, start+count) of a rank-2 tensor.
template <typename T>
TensorPtr<T> slice_cols(const TensorPtr<T>& a, int start, int count) {
  if (a->shape.size() != 2) throw_invalid("slice_cols: rank-2 tensor required");
  const int rows = a->dim(0);
  const int cols = a->dim(1);
  if (start < 0 || count <= 0 || start + count > cols) {
    throw_invalid("slice_cols: column range out of bounds");
  }
  std::vector<T> out(static_cast<size_t>(rows) * static_cast<size_t>(count));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < count; ++c) {
      out[static_cast<size_t>(r) * count + static_cast<size_t>(c)] =
          a->values[static_cast<size_t>(r) * cols + static_cast<size_t>(start + c)];
    }
  }
  auto node = detail::new_result<T>({rows, count}, std::move(out), {a}, "slice_cols");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, start, count, rows, cols, raw]() {
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < count; ++c) {
          a->grad[static_cast<size_t>(r) * cols + static_cast<size_t>(start + c)] +=
              raw->grad[static_cast<size_t>(r) * count + static_cast<size_t>(c)];
        }
      }
    };
  }
  return node;
}

// Concatenation along the column axis of rank-2 tensors with equal rows.
template <typename T>
TensorPtr<T> concat_cols(const std::vector<TensorPtr<T>>& parts) {
  if (parts.empty()) throw_invalid("concat_cols: no inputs");
  const int rows = parts[0]->dim(0);
  int total = 0;
  for (const auto& p : parts) {
    if (p->shape.size() != 2 || p->dim(0) != rows) {
      throw_invalid("concat_cols: row mismatch");
    }
    total += p->dim(1);
  }
  std::vector<T> out(static_cast<size_t>(rows) * static_cast<size_t>(total));
  int offset = 0;
  for (const auto& p : parts) {
    const int cols = p->dim(1);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        out[static_cast<size_t>(r) * total + static_cast<size_t>(offset + c)] =
            p->values[static_cast<size_t>(r) * cols + static_cast<size_t>(c)];
      }
    }
    offset += cols;
  }
  auto node = detail::new_result<T>({rows, total}, std::move(out), parts, "concat_cols");
  if (node->requires_grad) {
    auto* raw = node.get();
    auto held = parts;
    node->backward_fn = [held, rows, total, raw]() {
      int off = 0;
      for (const auto& p : held) {
        const int cols = p->dim(1);
        if (p->requires_grad) {
          for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
              p->grad[static_cast<size_t>(r) * cols + static_cast<size_t>(c)] +=
                  raw->grad[static_cast<size_t>(r) * total + static_cast<size_t>(off + c)];
            }
          }
        }
        off += cols;
      }
    };
  }
  return node;
}

// ---------------------------------------------------------------------------
// Reductions
// ---------------------------------------------------------------------------

// Mean over the last axis: (..., F) -> (...).
template <typename T>
TensorPtr<T> mean_last(const TensorPtr<T>& a) {
  if (a->shape.empty()) throw_invalid("mean_last: rank >= 1 required");
  const int last = a->shape.back();
  const size_t rows = a->numel() / static_cast<size_t>(last);
  std::vector<T> out(rows);
  for (size_t r = 0; r < rows; ++r) {
    T s = T(0);
    for (int f = 0; f < last; ++f) s += a->values[r * static_cast<size_t>(last) + static_cast<size_t>(f)];
    out[r] = s / static_cast<T>(last);
  }
  std::vector<int> shape(a->shape.begin(), a->shape.end() - 1);
  if (shape.empty()) shape = {1};
  auto node = detail::new_result<T>(std::move(shape), std::move(out), {a}, "mean_last");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, last, rows, raw]() {
      for (size_t r = 0; r < rows; ++r) {
        const T g = raw->grad[r] / static_cast<T>(last);
        for (int f = 0; f < last; ++f) {
          a->grad[r * static_cast<size_t>(last) + static_cast<size_t>(f)] += g;
        }
      }
    };
  }
  return node;
}

// Mean over every element: scalar result of shape {1}.
template <typename T>
TensorPtr<T> mean_all(const TensorPtr<T>& a) {
  T s = T(0);
  for (T v : a->values) s += v;
  const T m = s / static_cast<T>(a->numel());
  auto node = detail::new_result<T>({1}, {m}, {a}, "mean_all");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, raw]() {
      const T g = raw->grad[0] / static_cast<T>(a->numel());
      for (size_t i = 0; i < a->grad.size(); ++i) a->grad[i] += g;
    };
  }
  return node;
}

template <typename T>
TensorPtr<T> sum_all(const TensorPtr<T>& a) {
  T s = T(0);
  for (T v : a->values) s += v;
  auto node = detail::new_result<T>({1}, {s}, {a}, "sum_all");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, raw]() {
      const T g = raw->grad[0];
      for (size_t i = 0; i < a->grad.size(); ++i) a->grad[i] += g;
    };
  }
  return node;
}

// First differences along the last axis: (..., F) -> (..., F-1).
template <typename T>
TensorPtr<T> delta_last(const TensorPtr<T>& a) {
  if (a->shape.empty() || a->shape.back() < 2) {
    throw_invalid("delta_last: last axis must have length >= 2");
  }
  const int last = a->shape.back();
  const size_t rows = a->numel() / static_cast<size_t>(last);
  std::vector<T> out(rows * static_cast<size_t>(last - 1));
  for (size_t r = 0; r < rows; ++r) {
    for (int f = 0; f + 1 < last; ++f) {
      out[r * static_cast<size_t>(last - 1) + static_cast<size_t>(f)] =
          a->values[r * static_cast<size_t>(last) + static_cast<size_t>(f + 1)] -
          a->values[r * static_cast<size_t>(last) + static_cast<size_t>(f)];
    }
  }
  std::vector<int> shape = a->shape;
  shape.back() = last - 1;
  auto node = detail::new_result<T>(std::move(shape), std::move(out), {a}, "delta_last");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, last, rows, raw]() {
      for (size_t r = 0; r < rows; ++r) {
        for (int f = 0; f + 1 < last; ++f) {
          const T g = raw->grad[r * static_cast<size_t>(last - 1) + static_cast<size_t>(f)];
          a->grad[r * static_cast<size_t>(last) + static_cast<size_t>(f + 1)] += g;
          a->grad[r * static_cast<size_t>(last) + static_cast<size_t>(f)] -= g;
        }
      }
    };
  }
  return node;
}

// ---------------------------------------------------------------------------
// Nonlinearities
// ---------------------------------------------------------------------------

// Elementwise square root with subgradient 0 at zero (the loss uses it on
// nonnegative means; a tied zero contributes no gradient).
template <typename T>
TensorPtr<T> sqrt_t(const TensorPtr<T>& a) {
  std::vector<T> out(a->numel());
  for (size_t i = 0; i < out.size(); ++i) {
    if (a->values[i] < T(0)) throw_numeric("sqrt of a negative value");
    out[i] = std::sqrt(a->values[i]);
  }
  auto node = detail::new_result<T>(a->shape, std::move(out), {a}, "sqrt");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, raw]() {
      for (size_t i = 0; i < raw->grad.size(); ++i) {
        if (raw->values[i] > T(0)) {
          a->grad[i] += raw->grad[i] / (T(2) * raw->values[i]);
        }
      }
    };
  }
  return node;
}

// Elementwise absolute value with subgradient 0 at ties.
template <typename T>
TensorPtr<T> abs_t(const TensorPtr<T>& a) {
  std::vector<T> out(a->numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::abs(a->values[i]);
  auto node = detail::new_result<T>(a->shape, std::move(out), {a}, "abs");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, raw]() {
      for (size_t i = 0; i < raw->grad.size(); ++i) {
        if (a->values[i] > T(0)) {
          a->grad[i] += raw->grad[i];
        } else if (a->values[i] < T(0)) {
          a->grad[i] -= raw->grad[i];
        }
      }
    };
  }
  return node;
}

template <typename T>
TensorPtr<T> sigmoid(const TensorPtr<T>& a) {
  std::vector<T> out(a->numel());
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = T(1) / (T(1) + std::exp(-a->values[i]));
  }
  auto node = detail::new_result<T>(a->shape, std::move(out), {a}, "sigmoid");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, raw]() {
      for (size_t i = 0; i < raw->grad.size(); ++i) {
        const T s = raw->values[i];
        a->grad[i] += raw->grad[i] * s * (T(1) - s);
      }
    };
  }
  return node;
}

// swish(x) = x * sigmoid(x)
template <typename T>
TensorPtr<T> swish(const TensorPtr<T>& a) {
  std::vector<T> out(a->numel());
  for (size_t i = 0; i < out.size(); ++i) {
    const T s = T(1) / (T(1) + std::exp(-a->values[i]));
    out[i] = a->values[i] * s;
  }
  auto node = detail::new_result<T>(a->shape, std::move(out), {a}, "swish");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [a, raw]() {
      for (size_t i = 0; i < raw->grad.size(); ++i) {
        const T s = T(1) / (T(1) + std::exp(-a->values[i]));
        a->grad[i] += raw->grad[i] * (s + a->values[i] * s * (T(1) - s));
      }
    };
  }
  return node;
}

// glu(a || b) = a * sigmoid(b), halving the last axis.
template <typename T>
TensorPtr<T> glu(const TensorPtr<T>& x) {
  if (x->shape.empty() || x->shape.back() % 2 != 0) {
    throw_invalid("glu: last axis must have even length");
  }
  const int last = x->shape.back();
  const int half = last / 2;
  const size_t rows = x->numel() / static_cast<size_t>(last);
  std::vector<T> out(rows * static_cast<size_t>(half));
  for (size_t r = 0; r < rows; ++r) {
    for (int c = 0; c < half; ++c) {
      const T a = x->values[r * static_cast<size_t>(last) + static_cast<size_t>(c)];
      const T b = x->values[r * static_cast<size_t>(last) + static_cast<size_t>(half + c)];
      out[r * static_cast<size_t>(half) + static_cast<size_t>(c)] =
          a * (T(1) / (T(1) + std::exp(-b)));
    }
  }
  std::vector<int> shape = x->shape;
  shape.back() = half;
  auto node = detail::new_result<T>(std::move(shape), std::move(out), {x}, "glu");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [x, last, half, rows, raw]() {
      for (size_t r = 0; r < rows; ++r) {
        for (int c = 0; c < half; ++c) {
          const T a = x->values[r * static_cast<size_t>(last) + static_cast<size_t>(c)];
          const T b = x->values[r * static_cast<size_t>(last) + static_cast<size_t>(half + c)];
          const T s = T(1) / (T(1) + std::exp(-b));
          const T g = raw->grad[r * static_cast<size_t>(half) + static_cast<size_t>(c)];
          x->grad[r * static_cast<size_t>(last) + static_cast<size_t>(c)] += g * s;
          x->grad[r * static_cast<size_t>(last) + static_cast<size_t>(half + c)] +=
              g * a * s * (T(1) - s);
        }
      }
    };
  }
  return node;
}

// ---------------------------------------------------------------------------
// Linear algebra
// ---------------------------------------------------------------------------

// x: (..., I), w: (O, I), b: (O) -> (..., O); y = x w^T + b.
template <typename T>
TensorPtr<T> linear(const TensorPtr<T>& x, const TensorPtr<T>& w,
                    const TensorPtr<T>& b) {
  if (x->shape.empty() || w->shape.size() != 2 || b->shape.size() != 1) {
    throw_invalid("linear: expected x (..., I), w (O, I), b (O)");
  }
  const int in_dim = x->shape.back();
  const int out_dim = w->dim(0);
  if (w->dim(1) != in_dim || b->dim(0) != out_dim) {
    throw_invalid("linear: inner dimensions do not match");
  }
  const size_t rows = x->numel() / static_cast<size_t>(in_dim);

  std::vector<T> out(rows * static_cast<size_t>(out_dim));
  {
    detail::ECMap<T> xm(x->values.data(), static_cast<Eigen::Index>(rows), in_dim);
    detail::ECMap<T> wm(w->values.data(), out_dim, in_dim);
    detail::EMap<T> om(out.data(), static_cast<Eigen::Index>(rows), out_dim);
    om.noalias() = xm * wm.transpose();
    for (size_t r = 0; r < rows; ++r) {
      for (int o = 0; o < out_dim; ++o) {
        out[r * static_cast<size_t>(out_dim) + static_cast<size_t>(o)] +=
            b->values[static_cast<size_t>(o)];
      }
    }
  }
  std::vector<int> shape = x->shape;
  shape.back() = out_dim;
  auto node = detail::new_result<T>(std::move(shape), std::move(out), {x, w, b}, "linear");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [x, w, b, rows, in_dim, out_dim, raw]() {
      detail::ECMap<T> gm(raw->grad.data(), static_cast<Eigen::Index>(rows), out_dim);
      if (x->requires_grad) {
        detail::ECMap<T> wm(w->values.data(), out_dim, in_dim);
        detail::EMap<T> xg(x->grad.data(), static_cast<Eigen::Index>(rows), in_dim);
        xg.noalias() += gm * wm;
      }
      if (w->requires_grad) {
        detail::ECMap<T> xm(x->values.data(), static_cast<Eigen::Index>(rows), in_dim);
        detail::EMap<T> wg(w->grad.data(), out_dim, in_dim);
        wg.noalias() += gm.transpose() * xm;
      }
      if (b->requires_grad) {
        for (size_t r = 0; r < rows; ++r) {
          for (int o = 0; o < out_dim; ++o) {
            b->grad[static_cast<size_t>(o)] +=
                raw->grad[r * static_cast<size_t>(out_dim) + static_cast<size_t>(o)];
          }
        }
      }
    };
  }
  return node;
}

// Layer normalization over the last axis with affine (gamma, beta).
template <typename T>
TensorPtr<T> layer_norm(const TensorPtr<T>& x, const TensorPtr<T>& gamma,
                        const TensorPtr<T>& beta, T eps = T(1e-5)) {
  if (x->shape.empty()) throw_invalid("layer_norm: rank >= 1 required");
  const int ch = x->shape.back();
  if (gamma->shape != std::vector<int>{ch} || beta->shape != std::vector<int>{ch}) {
    throw_invalid("layer_norm: gamma/beta must have the channel shape");
  }
  const size_t rows = x->numel() / static_cast<size_t>(ch);

  std::vector<T> out(x->numel());
  std::vector<T> inv_std(rows);
  std::vector<T> xhat(x->numel());
  for (size_t r = 0; r < rows; ++r) {
    const T* xr = x->values.data() + r * static_cast<size_t>(ch);
    T mean = T(0);
    for (int c = 0; c < ch; ++c) mean += xr[c];
    mean /= static_cast<T>(ch);
    T var = T(0);
    for (int c = 0; c < ch; ++c) {
      const T d = xr[c] - mean;
      var += d * d;
    }
    var /= static_cast<T>(ch);
    const T istd = T(1) / std::sqrt(var + eps);
    inv_std[r] = istd;
    for (int c = 0; c < ch; ++c) {
      const T h = (xr[c] - mean) * istd;
      xhat[r * static_cast<size_t>(ch) + static_cast<size_t>(c)] = h;
      out[r * static_cast<size_t>(ch) + static_cast<size_t>(c)] =
          gamma->values[static_cast<size_t>(c)] * h + beta->values[static_cast<size_t>(c)];
    }
  }
  auto node = detail::new_result<T>(x->shape, std::move(out), {x, gamma, beta}, "layer_norm");
  if (node->requires_grad) {
    auto* raw = node.get();
    auto saved_istd = std::make_shared<std::vector<T>>(std::move(inv_std));
    auto saved_xhat = std::make_shared<std::vector<T>>(std::move(xhat));
    node->backward_fn = [x, gamma, beta, ch, rows, saved_istd, saved_xhat, raw]() {
      for (size_t r = 0; r < rows; ++r) {
        const T* g = raw->grad.data() + r * static_cast<size_t>(ch);
        const T* h = saved_xhat->data() + r * static_cast<size_t>(ch);
        if (gamma->requires_grad) {
          for (int c = 0; c < ch; ++c) gamma->grad[static_cast<size_t>(c)] += g[c] * h[c];
        }
        if (beta->requires_grad) {
          for (int c = 0; c < ch; ++c) beta->grad[static_cast<size_t>(c)] += g[c];
        }
        if (x->requires_grad) {
          // dl/dxhat = g * gamma; project out the mean and the xhat
          // component, then rescale by 1/std.
          T mean_gg = T(0);
          T mean_ggh = T(0);
          for (int c = 0; c < ch; ++c) {
            const T gg = g[c] * gamma->values[static_cast<size_t>(c)];
            mean_gg += gg;
            mean_ggh += gg * h[c];
          }
          mean_gg /= static_cast<T>(ch);
          mean_ggh /= static_cast<T>(ch);
          T* xg = x->grad.data() + r * static_cast<size_t>(ch);
          for (int c = 0; c < ch; ++c) {
            const T gg = g[c] * gamma->values[static_cast<size_t>(c)];
            xg[c] += (gg - mean_gg - h[c] * mean_ggh) * (*saved_istd)[r];
          }
        }
      }
    };
  }
  return node;
}

// Scaled dot-product attention over one head: q, k, v are (F, dh).
// probs_out, when non-null, receives the F x F softmax rows (no grad).
template <typename T>
TensorPtr<T> scaled_dot_attention(const TensorPtr<T>& q, const TensorPtr<T>& k,
                                  const TensorPtr<T>& v, T scale_factor,
                                  std::vector<T>* probs_out = nullptr) {
  if (q->shape.size() != 2 || k->shape != q->shape || v->shape != q->shape) {
    throw_invalid("attention: q, k, v must share an (F, dh) shape");
  }
  const int f = q->dim(0);
  const int dh = q->dim(1);

  detail::ECMap<T> qm(q->values.data(), f, dh);
  detail::ECMap<T> km(k->values.data(), f, dh);
  detail::ECMap<T> vm(v->values.data(), f, dh);

  detail::EMat<T> scores = (qm * km.transpose()) * scale_factor;
  // Row-wise softmax with max subtraction.
  detail::EMat<T> probs(f, f);
  for (int r = 0; r < f; ++r) {
    const T row_max = scores.row(r).maxCoeff();
    T denom = T(0);
    for (int c = 0; c < f; ++c) {
      const T e = std::exp(scores(r, c) - row_max);
      probs(r, c) = e;
      denom += e;
    }
    for (int c = 0; c < f; ++c) probs(r, c) /= denom;
  }
  if (probs_out) {
    probs_out->assign(probs.data(), probs.data() + static_cast<size_t>(f) * f);
  }

  std::vector<T> out(static_cast<size_t>(f) * static_cast<size_t>(dh));
  detail::EMap<T>(out.data(), f, dh).noalias() = probs * vm;

  auto node = detail::new_result<T>({f, dh}, std::move(out), {q, k, v}, "attention");
  if (node->requires_grad) {
    auto* raw = node.get();
    auto saved_probs = std::make_shared<detail::EMat<T>>(std::move(probs));
    node->backward_fn = [q, k, v, f, dh, scale_factor, saved_probs, raw]() {
      detail::ECMap<T> gm(raw->grad.data(), f, dh);
      detail::ECMap<T> qm2(q->values.data(), f, dh);
      detail::ECMap<T> km2(k->values.data(), f, dh);
      detail::ECMap<T> vm2(v->values.data(), f, dh);
      const detail::EMat<T>& p = *saved_probs;

      if (v->requires_grad) {
        detail::EMap<T> vg(v->grad.data(), f, dh);
        vg.noalias() += p.transpose() * gm;
      }
      if (q->requires_grad || k->requires_grad) {
        detail::EMat<T> dp = gm * vm2.transpose();  // F x F
        // Softmax backward per row: ds = p .* (dp - rowsum(dp .* p)).
        detail::EMat<T> ds(f, f);
        for (int r = 0; r < f; ++r) {
          T dot = T(0);
          for (int c = 0; c < f; ++c) dot += dp(r, c) * p(r, c);
          for (int c = 0; c < f; ++c) ds(r, c) = p(r, c) * (dp(r, c) - dot);
        }
        if (q->requires_grad) {
          detail::EMap<T> qg(q->grad.data(), f, dh);
          qg.noalias() += (ds * km2) * scale_factor;
        }
        if (k->requires_grad) {
          detail::EMap<T> kg(k->grad.data(), f, dh);
          kg.noalias() += (ds.transpose() * qm2) * scale_factor;
        }
      }
    };
  }
  return node;
}

// 1-D convolution along the first axis of (F, C) with zero padding that
// preserves the length, stride 1, odd kernel. Depthwise weights are
// (C, k); full weights are (C_out, C, k). Bias is per output channel.
template <typename T>
TensorPtr<T> conv1d(const TensorPtr<T>& x, const TensorPtr<T>& w,
                    const TensorPtr<T>& b, int dilation, bool depthwise) {
  if (x->shape.size() != 2) throw_invalid("conv1d: input must be (F, C)");
  if (dilation < 1) throw_invalid("conv1d: dilation must be >= 1");
  const int f_len = x->dim(0);
  const int ch_in = x->dim(1);

  int kernel = 0;
  int ch_out = 0;
  if (depthwise) {
    if (w->shape.size() != 2 || w->dim(0) != ch_in) {
      throw_invalid("conv1d: depthwise weights must be (C, k)");
    }
    kernel = w->dim(1);
    ch_out = ch_in;
  } else {
    if (w->shape.size() != 3 || w->dim(1) != ch_in) {
      throw_invalid("conv1d: weights must be (C_out, C_in, k)");
    }
    kernel = w->dim(2);
    ch_out = w->dim(0);
  }
  if (kernel % 2 == 0) throw_invalid("conv1d: kernel size must be odd");
  if (b->shape != std::vector<int>{ch_out}) throw_invalid("conv1d: bias shape mismatch");
  const int center = kernel / 2;

  std::vector<T> out(static_cast<size_t>(f_len) * static_cast<size_t>(ch_out));
  for (int f = 0; f < f_len; ++f) {
    for (int o = 0; o < ch_out; ++o) {
      T acc = b->values[static_cast<size_t>(o)];
      for (int j = 0; j < kernel; ++j) {
        const int src = f + (j - center) * dilation;
        if (src < 0 || src >= f_len) continue;
        if (depthwise) {
          acc += w->values[static_cast<size_t>(o) * kernel + static_cast<size_t>(j)] *
                 x->values[static_cast<size_t>(src) * ch_in + static_cast<size_t>(o)];
        } else {
          for (int i = 0; i < ch_in; ++i) {
            acc += w->values[(static_cast<size_t>(o) * ch_in + static_cast<size_t>(i)) * kernel +
                             static_cast<size_t>(j)] *
                   x->values[static_cast<size_t>(src) * ch_in + static_cast<size_t>(i)];
          }
        }
      }
      out[static_cast<size_t>(f) * ch_out + static_cast<size_t>(o)] = acc;
    }
  }
  auto node = detail::new_result<T>({f_len, ch_out}, std::move(out), {x, w, b}, "conv1d");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [x, w, b, f_len, ch_in, ch_out, kernel, center, dilation,
                         depthwise, raw]() {
      for (int f = 0; f < f_len; ++f) {
        for (int o = 0; o < ch_out; ++o) {
          const T g = raw->grad[static_cast<size_t>(f) * ch_out + static_cast<size_t>(o)];
          if (b->requires_grad) b->grad[static_cast<size_t>(o)] += g;
          for (int j = 0; j < kernel; ++j) {
            const int src = f + (j - center) * dilation;
            if (src < 0 || src >= f_len) continue;
            if (depthwise) {
              const size_t wi = static_cast<size_t>(o) * kernel + static_cast<size_t>(j);
              const size_t xi = static_cast<size_t>(src) * ch_in + static_cast<size_t>(o);
              if (w->requires_grad) w->grad[wi] += g * x->values[xi];
              if (x->requires_grad) x->grad[xi] += g * w->values[wi];
            } else {
              for (int i = 0; i < ch_in; ++i) {
                const size_t wi = (static_cast<size_t>(o) * ch_in + static_cast<size_t>(i)) * kernel +
                                  static_cast<size_t>(j);
                const size_t xi = static_cast<size_t>(src) * ch_in + static_cast<size_t>(i);
                if (w->requires_grad) w->grad[wi] += g * x->values[xi];
                if (x->requires_grad) x->grad[xi] += g * w->values[wi];
              }
            }
          }
        }
      }
    };
  }
  return node;
}

// Inverted dropout: kept activations scale by 1/(1-p) in training so
// inference is the identity.
template <typename T>
TensorPtr<T> dropout(const TensorPtr<T>& x, double p, bool training, Rng& rng) {
  if (p < 0.0 || p >= 1.0) throw_invalid("dropout: p must be in [0, 1)");
  if (!training || p == 0.0) {
    auto node = detail::new_result<T>(x->shape, x->values, {x}, "dropout");
    if (node->requires_grad) {
      auto* raw = node.get();
      node->backward_fn = [x, raw]() {
        for (size_t i = 0; i < raw->grad.size(); ++i) x->grad[i] += raw->grad[i];
      };
    }
    return node;
  }
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
  auto mask = std::make_shared<std::vector<T>>(x->numel());
  std::vector<T> out(x->numel());
  for (size_t i = 0; i < out.size(); ++i) {
    const bool keep = rng.next_double() >= p;
    (*mask)[i] = keep ? keep_scale : T(0);
    out[i] = x->values[i] * (*mask)[i];
  }
  auto node = detail::new_result<T>(x->shape, std::move(out), {x}, "dropout");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [x, mask, raw]() {
      for (size_t i = 0; i < raw->grad.size(); ++i) {
        x->grad[i] += raw->grad[i] * (*mask)[i];
      }
    };
  }
  return node;
}

// Binaural spectral representation: (M, 2, F) -> (3M, F) stacking the
// left block, the right block, and the left-minus-right block.
template <typename T>
TensorPtr<T> binaural_repr(const TensorPtr<T>& x) {
  if (x->shape.size() != 3 || x->dim(1) != 2) {
    throw_invalid("binaural_repr: input must be (M, 2, F)");
  }
  const int m = x->dim(0);
  const int f_len = x->dim(2);
  const size_t row = static_cast<size_t>(f_len);
  std::vector<T> out(static_cast<size_t>(3 * m) * row);
  for (int i = 0; i < m; ++i) {
    const T* left = x->values.data() + (static_cast<size_t>(i) * 2) * row;
    const T* right = x->values.data() + (static_cast<size_t>(i) * 2 + 1) * row;
    T* l_dst = out.data() + static_cast<size_t>(i) * row;
    T* r_dst = out.data() + static_cast<size_t>(m + i) * row;
    T* d_dst = out.data() + static_cast<size_t>(2 * m + i) * row;
    for (int f = 0; f < f_len; ++f) {
      l_dst[f] = left[f];
      r_dst[f] = right[f];
      d_dst[f] = left[f] - right[f];
    }
  }
  auto node = detail::new_result<T>({3 * m, f_len}, std::move(out), {x}, "binaural_repr");
  if (node->requires_grad) {
    auto* raw = node.get();
    node->backward_fn = [x, m, f_len, raw]() {
      const size_t row = static_cast<size_t>(f_len);
      for (int i = 0; i < m; ++i) {
        T* left = x->grad.data() + (static_cast<size_t>(i) * 2) * row;
        T* right = x->grad.data() + (static_cast<size_t>(i) * 2 + 1) * row;
        const T* l_g = raw->grad.data() + static_cast<size_t>(i) * row;
        const T* r_g = raw->grad.data() + static_cast<size_t>(m + i) * row;
        const T* d_g = raw->grad.data() + static_cast<size_t>(2 * m + i) * row;
        for (int f = 0; f < f_len; ++f) {
          left[f] += l_g[f] + d_g[f];
          right[f] += r_g[f] - d_g[f];
        }
      }
    };
  }
  return node;
}

// ---------------------------------------------------------------------------
// Backward pass
// ---------------------------------------------------------------------------

// Runs reverse-mode accumulation from a scalar root. Gradients add into
// every requires_grad node reachable from the root.
template <typename T>
void backward(const TensorPtr<T>& root) {
  if (root->numel() != 1) throw_invalid("backward: root must be a scalar");
  if (!root->requires_grad) {
    throw_invalid("backward: root does not require gradients");
  }

  std::vector<TensorNode<T>*> order;
  std::unordered_set<TensorNode<T>*> seen;
  std::vector<std::pair<TensorNode<T>*, size_t>> stack;
  stack.emplace_back(root.get(), 0);
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      TensorNode<T>* parent = node->parents[next].get();
      ++next;
      if (parent->requires_grad && seen.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->grad[0] = T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward_fn) (*it)->backward_fn();
  }
  for (TensorNode<T>* node : order) {
    detail::assert_finite(node->grad, "backward");
  }
}

}  // namespace hrtf

#endif  // HRTFKIT_NN_TENSOR_HPP_
