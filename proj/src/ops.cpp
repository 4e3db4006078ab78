/*
 * Copyright 2026 The MulCom Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mulcom/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

namespace mulcom {
namespace {

void require_rank2(const Tensor& x, const char* op) {
  if (x.rank() != 2)
    throw DimensionError(std::string(op) + ": expected a matrix, got " + shape_string(x.shape()));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                         " vs " + shape_string(b.shape()));
}

template <typename Fn>
Tensor unary(const Tensor& x, Fn&& fn) {
  std::vector<double> out(x.size());
  auto in = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(in[i]);
  return Tensor::from(x.shape(), std::move(out));
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  if (a.dim(1) != b.dim(0))
    throw DimensionError("matmul: inner extents differ, " + shape_string(a.shape()) + " * " +
                         shape_string(b.shape()));
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor out = Tensor::zeros({m, n});
  kernels::gemm_nn(m, n, k, a.values(), b.values(), out.values());
  if (tape.prepare(out, {&a, &b})) {
    tape.record([a, b, out, m, n, k]() mutable {
      if (a.tracked()) kernels::gemm_nt(m, k, n, out.grad(), b.values(), a.grad());
      if (b.tracked()) kernels::gemm_tn(k, n, m, a.values(), out.grad(), b.grad());
    });
  }
  return out;
}

Tensor affine(Tape& tape, const Tensor& x, const Tensor& w, const Tensor& b) {
  require_rank2(w, "affine");
  const bool has_bias = b.defined();
  if (x.rank() > 2 || x.cols() != w.dim(0) || (has_bias && b.size() != w.dim(1)))
    throw DimensionError("affine: cannot apply weight " + shape_string(w.shape()) + " and bias " +
                         (has_bias ? shape_string(b.shape()) : "none") + " to input " +
                         shape_string(x.shape()));
  const std::size_t m = x.rows(), k = w.dim(0), n = w.dim(1);
  Shape shape = x.rank() == 2 ? Shape{m, n} : Shape{n};
  std::vector<double> values(m * n);
  if (has_bias) {
    auto bias = b.values();
    for (std::size_t i = 0; i < m; ++i) std::copy(bias.begin(), bias.end(), values.begin() + i * n);
  }
  Tensor out = Tensor::from(std::move(shape), std::move(values));
  kernels::gemm_nn(m, n, k, x.values(), w.values(), out.values());
  const bool record = has_bias ? tape.prepare(out, {&x, &w, &b}) : tape.prepare(out, {&x, &w});
  if (record) {
    tape.record([x, w, b, out, m, n, k, has_bias]() mutable {
      auto g = out.grad();
      if (x.tracked()) kernels::gemm_nt(m, k, n, g, w.values(), x.grad());
      if (w.tracked()) kernels::gemm_tn(k, n, m, x.values(), g, w.grad());
      if (has_bias && b.tracked()) {
        auto gb = b.grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
      }
    });
  }
  return out;
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> values(a.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = a[i] + b[i];
  Tensor out = Tensor::from(a.shape(), std::move(values));
  if (tape.prepare(out, {&a, &b})) {
    tape.record([a, b, out]() mutable {
      auto g = out.grad();
      if (a.tracked())
        for (std::size_t i = 0; i < g.size(); ++i) a.grad()[i] += g[i];
      if (b.tracked())
        for (std::size_t i = 0; i < g.size(); ++i) b.grad()[i] += g[i];
    });
  }
  return out;
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> values(a.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = a[i] * b[i];
  Tensor out = Tensor::from(a.shape(), std::move(values));
  if (tape.prepare(out, {&a, &b})) {
    tape.record([a, b, out]() mutable {
      auto g = out.grad();
      if (a.tracked())
        for (std::size_t i = 0; i < g.size(); ++i) a.grad()[i] += g[i] * b[i];
      if (b.tracked())
        for (std::size_t i = 0; i < g.size(); ++i) b.grad()[i] += g[i] * a[i];
    });
  }
  return out;
}

Tensor scale(Tape& tape, const Tensor& x, double factor) {
  Tensor out = unary(x, [factor](double v) { return v * factor; });
  if (tape.prepare(out, {&x})) {
    tape.record([x, out, factor]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * factor;
    });
  }
  return out;
}

Tensor scale_rows(Tape& tape, const Tensor& x, const Tensor& w) {
  if (x.rank() > 2 || w.size() != x.rows())
    throw DimensionError("scale_rows: " + shape_string(w.shape()) + " weights for " +
                         shape_string(x.shape()));
  const std::size_t m = x.rows(), n = x.cols();
  std::vector<double> values(x.size());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) values[i * n + j] = x[i * n + j] * w[i];
  Tensor out = Tensor::from(x.shape(), std::move(values));
  if (tape.prepare(out, {&x, &w})) {
    tape.record([x, w, out, m, n]() mutable {
      auto g = out.grad();
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (x.tracked()) x.grad()[i * n + j] += g[i * n + j] * w[i];
          acc += g[i * n + j] * x[i * n + j];
        }
        if (w.tracked()) w.grad()[i] += acc;
      }
    });
  }
  return out;
}

Tensor sigmoid(Tape& tape, const Tensor& x) {
  Tensor out = unary(x, stable_sigmoid);
  if (tape.prepare(out, {&x})) {
    tape.record([x, out]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * out[i] * (1.0 - out[i]);
    });
  }
  return out;
}

Tensor tanh(Tape& tape, const Tensor& x) {
  Tensor out = unary(x, [](double v) { return std::tanh(v); });
  if (tape.prepare(out, {&x})) {
    tape.record([x, out]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (1.0 - out[i] * out[i]);
    });
  }
  return out;
}

Tensor relu(Tape& tape, const Tensor& x) {
  tape.note_relu_inputs(x.values());
  Tensor out = unary(x, [](double v) { return v > 0.0 ? v : 0.0; });
  if (tape.prepare(out, {&x})) {
    tape.record([x, out]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < g.size(); ++i)
        if (x[i] > 0.0) gx[i] += g[i];
    });
  }
  return out;
}

Tensor softmax(Tape& tape, const Tensor& x, std::size_t axis) {
  if (axis >= x.rank())
    throw DimensionError("softmax: axis " + std::to_string(axis) + " out of range for " +
                         shape_string(x.shape()));
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= x.dim(d);
  for (std::size_t d = axis + 1; d < x.rank(); ++d) inner *= x.dim(d);
  const std::size_t n = x.dim(axis);
  std::vector<double> values(x.size());
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * n * inner + in;
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, x[base + i * inner]);
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        values[base + i * inner] = std::exp(x[base + i * inner] - peak);
        total += values[base + i * inner];
      }
      for (std::size_t i = 0; i < n; ++i) values[base + i * inner] /= total;
    }
  }
  Tensor out = Tensor::from(x.shape(), std::move(values));
  if (tape.prepare(out, {&x})) {
    tape.record([x, out, outer, inner, n]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
          const std::size_t base = o * n * inner + in;
          double dot = 0.0;
          for (std::size_t i = 0; i < n; ++i) dot += g[base + i * inner] * out[base + i * inner];
          for (std::size_t i = 0; i < n; ++i)
            gx[base + i * inner] += out[base + i * inner] * (g[base + i * inner] - dot);
        }
      }
    });
  }
  return out;
}

Tensor concat(Tape& tape, const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw DimensionError("concat: no parts");
  const Tensor& first = parts.front();
  if (first.rank() == 0 || first.rank() > 2 || axis >= first.rank())
    throw DimensionError("concat: axis " + std::to_string(axis) + " invalid for " +
                         shape_string(first.shape()));
  // Rank-1 parts behave as a single row concatenated along columns.
  const bool along_rows = first.rank() == 2 && axis == 0;
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    bool ok = p.rank() == first.rank();
    if (ok && along_rows) ok = p.cols() == first.cols();
    if (ok && !along_rows) ok = p.rows() == first.rows();
    if (!ok)
      throw DimensionError("concat: incompatible extents " + shape_string(first.shape()) +
                           " and " + shape_string(p.shape()) + " along axis " +
                           std::to_string(axis));
    total += along_rows ? p.rows() : p.cols();
  }
  Shape shape = first.shape();
  shape[axis] = total;
  std::vector<double> values;
  values.reserve(shape_size(shape));
  if (along_rows) {
    for (const Tensor& p : parts) values.insert(values.end(), p.values().begin(), p.values().end());
  } else {
    const std::size_t rows = first.rows();
    for (std::size_t r = 0; r < rows; ++r)
      for (const Tensor& p : parts) {
        auto v = p.values();
        values.insert(values.end(), v.begin() + r * p.cols(), v.begin() + (r + 1) * p.cols());
      }
  }
  Tensor out = Tensor::from(std::move(shape), std::move(values));
  if (tape.prepare(out, std::span<const Tensor>(parts))) {
    tape.record([parts, out, along_rows, total]() mutable {
      auto g = out.grad();
      if (along_rows) {
        std::size_t offset = 0;
        for (const Tensor& p : parts) {
          if (p.tracked()) {
            auto gp = p.grad();
            for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g[offset + i];
          }
          offset += p.size();
        }
      } else {
        const std::size_t rows = parts.front().rows();
        std::size_t col = 0;
        for (const Tensor& p : parts) {
          const std::size_t c = p.cols();
          if (p.tracked()) {
            auto gp = p.grad();
            for (std::size_t r = 0; r < rows; ++r)
              for (std::size_t j = 0; j < c; ++j) gp[r * c + j] += g[r * total + col + j];
          }
          col += c;
        }
      }
    });
  }
  return out;
}

Tensor slice_rows(Tape& tape, const Tensor& x, std::size_t begin, std::size_t end) {
  require_rank2(x, "slice_rows");
  if (begin > end || end > x.dim(0))
    throw DimensionError("slice_rows: [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") out of range for " + shape_string(x.shape()));
  const std::size_t n = x.dim(1);
  auto v = x.values();
  Tensor out = Tensor::from({end - begin, n},
                            std::vector<double>(v.begin() + begin * n, v.begin() + end * n));
  if (tape.prepare(out, {&x})) {
    tape.record([x, out, begin, n]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < g.size(); ++i) gx[begin * n + i] += g[i];
    });
  }
  return out;
}

Tensor slice_cols(Tape& tape, const Tensor& x, std::size_t begin, std::size_t end) {
  if (x.rank() == 0 || x.rank() > 2 || begin > end || end > x.cols())
    throw DimensionError("slice_cols: [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") out of range for " + shape_string(x.shape()));
  const std::size_t m = x.rows(), n = x.cols(), w = end - begin;
  std::vector<double> values(m * w);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t j = 0; j < w; ++j) values[r * w + j] = x[r * n + begin + j];
  Tensor out = Tensor::from(x.rank() == 2 ? Shape{m, w} : Shape{w}, std::move(values));
  if (tape.prepare(out, {&x})) {
    tape.record([x, out, begin, m, n, w]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t j = 0; j < w; ++j) gx[r * n + begin + j] += g[r * w + j];
    });
  }
  return out;
}

Tensor reshape(Tape& tape, const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size())
    throw DimensionError("reshape: " + shape_string(x.shape()) + " to " + shape_string(shape));
  Tensor out = Tensor::from(std::move(shape), std::vector<double>(x.values().begin(), x.values().end()));
  if (tape.prepare(out, {&x})) {
    tape.record([x, out]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    });
  }
  return out;
}

Tensor gather_rows(Tape& tape, const Tensor& x, const std::vector<std::size_t>& index) {
  require_rank2(x, "gather_rows");
  const std::size_t n = x.dim(1);
  std::vector<double> values(index.size() * n);
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= x.dim(0))
      throw DimensionError("gather_rows: row " + std::to_string(index[r]) + " out of range for " +
                           shape_string(x.shape()));
    std::copy_n(x.values().begin() + index[r] * n, n, values.begin() + r * n);
  }
  Tensor out = Tensor::from({index.size(), n}, std::move(values));
  if (tape.prepare(out, {&x})) {
    tape.record([x, out, index, n]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t r = 0; r < index.size(); ++r)
        for (std::size_t j = 0; j < n; ++j) gx[index[r] * n + j] += g[r * n + j];
    });
  }
  return out;
}

Tensor scatter_add_rows(Tape& tape, const Tensor& x, const std::vector<std::size_t>& index,
                        std::size_t rows) {
  require_rank2(x, "scatter_add_rows");
  if (index.size() != x.dim(0))
    throw DimensionError("scatter_add_rows: " + std::to_string(index.size()) +
                         " indices for " + shape_string(x.shape()));
  const std::size_t n = x.dim(1);
  Tensor out = Tensor::zeros({rows, n});
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= rows)
      throw DimensionError("scatter_add_rows: target row " + std::to_string(index[r]) +
                           " out of range " + std::to_string(rows));
    for (std::size_t j = 0; j < n; ++j) out[index[r] * n + j] += x[r * n + j];
  }
  if (tape.prepare(out, {&x})) {
    tape.record([x, out, index, n]() mutable {
      auto g = out.grad();
      auto gx = x.grad();
      for (std::size_t r = 0; r < index.size(); ++r)
        for (std::size_t j = 0; j < n; ++j) gx[r * n + j] += g[index[r] * n + j];
    });
  }
  return out;
}

Tensor reduce_sum(Tape& tape, const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) total += v;
  Tensor out = Tensor::scalar(total);
  if (tape.prepare(out, {&x})) {
    tape.record([x, out]() mutable {
      const double g = out.grad()[0];
      for (double& gx : x.grad()) gx += g;
    });
  }
  return out;
}

Tensor reduce_mean(Tape& tape, const Tensor& x) {
  if (x.size() == 0) throw DimensionError("reduce_mean of an empty tensor");
  return scale(tape, reduce_sum(tape, x), 1.0 / static_cast<double>(x.size()));
}

namespace {

kernels::AttentionShape attention_shape(const Tensor& q, const Tensor& k, const Tensor* v,
                                        std::size_t groups, std::size_t heads) {
  require_rank2(q, "attention");
  require_rank2(k, "attention");
  if (groups == 0 || heads == 0) throw DimensionError("attention: zero groups or heads");
  if (q.dim(0) % groups || k.dim(0) % groups || k.dim(0) == 0)
    throw DimensionError("attention: rows " + shape_string(q.shape()) + " / " +
                         shape_string(k.shape()) + " not divisible into " +
                         std::to_string(groups) + " groups");
  if (q.dim(1) != k.dim(1) || q.dim(1) % heads)
    throw DimensionError("attention: query/key widths " + shape_string(q.shape()) + " / " +
                         shape_string(k.shape()) + " incompatible with " +
                         std::to_string(heads) + " heads");
  kernels::AttentionShape s;
  s.groups = groups;
  s.heads = heads;
  s.queries = q.dim(0) / groups;
  s.keys = k.dim(0) / groups;
  s.key_dim = q.dim(1) / heads;
  if (v) {
    require_rank2(*v, "attention");
    if (v->dim(0) != k.dim(0) || v->dim(1) % heads)
      throw DimensionError("attention: value " + shape_string(v->shape()) +
                           " incompatible with key " + shape_string(k.shape()));
    s.value_dim = v->dim(1) / heads;
  }
  return s;
}

}  // namespace

Tensor scaled_dot_attention(Tape& tape, const Tensor& q, const Tensor& k, const Tensor& v,
                            std::size_t groups, std::size_t heads) {
  const kernels::AttentionShape s = attention_shape(q, k, &v, groups, heads);
  auto weights = std::make_shared<std::vector<double>>(s.weight_count());
  Tensor out = Tensor::zeros({q.dim(0), v.dim(1)});
  kernels::attention_forward(s, q.values(), k.values(), v.values(), *weights, out.values());
  if (tape.prepare(out, {&q, &k, &v})) {
    tape.record([q, k, v, out, s, weights]() mutable {
      // Untracked inputs still need somewhere to write; discard it.
      std::vector<double> scratch_q, scratch_k, scratch_v;
      auto sink = [](const Tensor& t, std::vector<double>& scratch) -> std::span<double> {
        if (t.tracked()) return t.grad();
        scratch.assign(t.size(), 0.0);
        return scratch;
      };
      kernels::attention_backward(s, q.values(), k.values(), v.values(), *weights, out.grad(),
                                  sink(q, scratch_q), sink(k, scratch_k), sink(v, scratch_v));
    });
  }
  return out;
}

Tensor attention_weights(const Tensor& q, const Tensor& k, std::size_t groups,
                         std::size_t heads) {
  kernels::AttentionShape s = attention_shape(q, k, nullptr, groups, heads);
  s.value_dim = 1;
  std::vector<double> weights(s.weight_count());
  std::vector<double> dummy_v(k.dim(0) * heads, 0.0), out(q.dim(0) * heads);
  kernels::serial::attention_forward(s, q.values(), k.values(), dummy_v, weights, out);
  return Tensor::from({groups * heads * s.queries, s.keys}, std::move(weights));
}

}  // namespace mulcom
