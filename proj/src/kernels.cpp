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

#include "mulcom/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mulcom::kernels {
namespace {

constexpr std::size_t kParallelWork = 1 << 15;

// One (group, head) block of attention. Shared by both variants so the
// arithmetic is identical.
void attention_block_forward(const AttentionShape& s, std::size_t g, std::size_t h,
                             std::span<const double> q, std::span<const double> k,
                             std::span<const double> v, std::span<double> weights,
                             std::span<double> out) {
  const std::size_t qcols = s.heads * s.key_dim;
  const std::size_t vcols = s.heads * s.value_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(s.key_dim));
  for (std::size_t a = 0; a < s.queries; ++a) {
    const double* qrow = q.data() + (g * s.queries + a) * qcols + h * s.key_dim;
    double* w = weights.data() + ((g * s.heads + h) * s.queries + a) * s.keys;
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < s.keys; ++b) {
      const double* krow = k.data() + (g * s.keys + b) * qcols + h * s.key_dim;
      double dot = 0.0;
      for (std::size_t d = 0; d < s.key_dim; ++d) dot += qrow[d] * krow[d];
      w[b] = dot * scale;
      peak = std::max(peak, w[b]);
    }
    double total = 0.0;
    for (std::size_t b = 0; b < s.keys; ++b) {
      w[b] = std::exp(w[b] - peak);
      total += w[b];
    }
    for (std::size_t b = 0; b < s.keys; ++b) w[b] /= total;
    double* orow = out.data() + (g * s.queries + a) * vcols + h * s.value_dim;
    for (std::size_t e = 0; e < s.value_dim; ++e) orow[e] = 0.0;
    for (std::size_t b = 0; b < s.keys; ++b) {
      const double* vrow = v.data() + (g * s.keys + b) * vcols + h * s.value_dim;
      for (std::size_t e = 0; e < s.value_dim; ++e) orow[e] += w[b] * vrow[e];
    }
  }
}

void attention_block_backward(const AttentionShape& s, std::size_t g, std::size_t h,
                              std::span<const double> q, std::span<const double> k,
                              std::span<const double> v, std::span<const double> weights,
                              std::span<const double> dout, std::span<double> dq,
                              std::span<double> dk, std::span<double> dv) {
  const std::size_t qcols = s.heads * s.key_dim;
  const std::size_t vcols = s.heads * s.value_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(s.key_dim));
  std::vector<double> dw(s.keys);
  for (std::size_t a = 0; a < s.queries; ++a) {
    const double* w = weights.data() + ((g * s.heads + h) * s.queries + a) * s.keys;
    const double* grow = dout.data() + (g * s.queries + a) * vcols + h * s.value_dim;
    double weighted = 0.0;
    for (std::size_t b = 0; b < s.keys; ++b) {
      const double* vrow = v.data() + (g * s.keys + b) * vcols + h * s.value_dim;
      double* dvrow = dv.data() + (g * s.keys + b) * vcols + h * s.value_dim;
      double acc = 0.0;
      for (std::size_t e = 0; e < s.value_dim; ++e) {
        acc += grow[e] * vrow[e];
        dvrow[e] += w[b] * grow[e];
      }
      dw[b] = acc;
      weighted += w[b] * acc;
    }
    const double* qrow = q.data() + (g * s.queries + a) * qcols + h * s.key_dim;
    double* dqrow = dq.data() + (g * s.queries + a) * qcols + h * s.key_dim;
    for (std::size_t b = 0; b < s.keys; ++b) {
      const double dscore = w[b] * (dw[b] - weighted) * scale;
      const double* krow = k.data() + (g * s.keys + b) * qcols + h * s.key_dim;
      double* dkrow = dk.data() + (g * s.keys + b) * qcols + h * s.key_dim;
      for (std::size_t d = 0; d < s.key_dim; ++d) {
        dqrow[d] += dscore * krow[d];
        dkrow[d] += dscore * qrow[d];
      }
    }
  }
}

bool use_parallel(std::size_t work) { return work >= kParallelWork && omp_get_max_threads() > 1; }

}  // namespace

namespace serial {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a.data() + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b.data() + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      c[i * n + j] += acc;
    }
  }
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double api = a[p * m + i];
      const double* brow = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += api * brow[j];
    }
  }
}

void attention_forward(const AttentionShape& s, std::span<const double> q,
                       std::span<const double> k, std::span<const double> v,
                       std::span<double> weights, std::span<double> out) {
  for (std::size_t g = 0; g < s.groups; ++g)
    for (std::size_t h = 0; h < s.heads; ++h)
      attention_block_forward(s, g, h, q, k, v, weights, out);
}

void attention_backward(const AttentionShape& s, std::span<const double> q,
                        std::span<const double> k, std::span<const double> v,
                        std::span<const double> weights, std::span<const double> dout,
                        std::span<double> dq, std::span<double> dk, std::span<double> dv) {
  for (std::size_t g = 0; g < s.groups; ++g)
    for (std::size_t h = 0; h < s.heads; ++h)
      attention_block_backward(s, g, h, q, k, v, weights, dout, dq, dk, dv);
}

}  // namespace serial

namespace parallel {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  const auto rows = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    double* crow = c.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  const auto rows = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const double* arow = a.data() + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b.data() + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      c[i * n + j] += acc;
    }
  }
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  const auto rows = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    double* crow = c.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double api = a[p * m + i];
      const double* brow = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += api * brow[j];
    }
  }
}

void attention_forward(const AttentionShape& s, std::span<const double> q,
                       std::span<const double> k, std::span<const double> v,
                       std::span<double> weights, std::span<double> out) {
  const auto blocks = static_cast<std::ptrdiff_t>(s.groups * s.heads);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk)
    attention_block_forward(s, blk / s.heads, blk % s.heads, q, k, v, weights, out);
}

// Blocks write disjoint (group rows, head columns) regions of dq, dk and dv.
void attention_backward(const AttentionShape& s, std::span<const double> q,
                        std::span<const double> k, std::span<const double> v,
                        std::span<const double> weights, std::span<const double> dout,
                        std::span<double> dq, std::span<double> dk, std::span<double> dv) {
  const auto blocks = static_cast<std::ptrdiff_t>(s.groups * s.heads);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk)
    attention_block_backward(s, blk / s.heads, blk % s.heads, q, k, v, weights, dout, dq, dk,
                             dv);
}

}  // namespace parallel

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  if (use_parallel(m * n * k) && m > 1)
    parallel::gemm_nn(m, n, k, a, b, c);
  else
    serial::gemm_nn(m, n, k, a, b, c);
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  if (use_parallel(m * n * k) && m > 1)
    parallel::gemm_nt(m, n, k, a, b, c);
  else
    serial::gemm_nt(m, n, k, a, b, c);
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  if (use_parallel(m * n * k) && m > 1)
    parallel::gemm_tn(m, n, k, a, b, c);
  else
    serial::gemm_tn(m, n, k, a, b, c);
}

void attention_forward(const AttentionShape& s, std::span<const double> q,
                       std::span<const double> k, std::span<const double> v,
                       std::span<double> weights, std::span<double> out) {
  const std::size_t work = s.weight_count() * (s.key_dim + s.value_dim);
  if (use_parallel(work) && s.groups * s.heads > 1)
    parallel::attention_forward(s, q, k, v, weights, out);
  else
    serial::attention_forward(s, q, k, v, weights, out);
}

void attention_backward(const AttentionShape& s, std::span<const double> q,
                        std::span<const double> k, std::span<const double> v,
                        std::span<const double> weights, std::span<const double> dout,
                        std::span<double> dq, std::span<double> dk, std::span<double> dv) {
  const std::size_t work = s.weight_count() * (s.key_dim + s.value_dim);
  if (use_parallel(work) && s.groups * s.heads > 1)
    parallel::attention_backward(s, q, k, v, weights, dout, dq, dk, dv);
  else
    serial::attention_backward(s, q, k, v, weights, dout, dq, dk, dv);
}

void set_threads(int threads) { omp_set_num_threads(std::max(1, threads)); }

int threads() { return omp_get_max_threads(); }

}  // namespace mulcom::kernels
