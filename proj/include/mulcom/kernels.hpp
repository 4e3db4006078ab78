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

#pragma once

#include <cstddef>
#include <span>

// Dense inner loops. Each kernel has a serial reference and an OpenMP
// version; both accumulate every output element in the same order, so they
// agree bit for bit and thread count never changes results.
namespace mulcom::kernels {

// Block layout for grouped multi-head scaled dot-product attention.
// Q is [groups*queries x heads*key_dim], K is [groups*keys x heads*key_dim],
// V is [groups*keys x heads*value_dim]; rows of one group attend only among
// themselves, and head h owns columns [h*dim, (h+1)*dim).
struct AttentionShape {
  std::size_t groups = 1;
  std::size_t heads = 1;
  std::size_t queries = 1;
  std::size_t keys = 1;
  std::size_t key_dim = 1;
  std::size_t value_dim = 1;

  std::size_t weight_count() const { return groups * heads * queries * keys; }
};

namespace serial {

// c[m x n] += a[m x k] * b[k x n]
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
// c[m x n] += a[m x k] * b[n x k]^T
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
// c[m x n] += a[k x m]^T * b[k x n]
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);

void attention_forward(const AttentionShape& s, std::span<const double> q,
                       std::span<const double> k, std::span<const double> v,
                       std::span<double> weights, std::span<double> out);
// Accumulates into dq, dk, dv.
void attention_backward(const AttentionShape& s, std::span<const double> q,
                        std::span<const double> k, std::span<const double> v,
                        std::span<const double> weights, std::span<const double> dout,
                        std::span<double> dq, std::span<double> dk, std::span<double> dv);

}  // namespace serial

namespace parallel {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);

void attention_forward(const AttentionShape& s, std::span<const double> q,
                       std::span<const double> k, std::span<const double> v,
                       std::span<double> weights, std::span<double> out);
void attention_backward(const AttentionShape& s, std::span<const double> q,
                        std::span<const double> k, std::span<const double> v,
                        std::span<const double> weights, std::span<const double> dout,
                        std::span<double> dq, std::span<double> dk, std::span<double> dv);

}  // namespace parallel

// Dispatchers: parallel when more than one thread is available and the work
// is large enough to amortize the fork, serial otherwise.
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void attention_forward(const AttentionShape& s, std::span<const double> q,
                       std::span<const double> k, std::span<const double> v,
                       std::span<double> weights, std::span<double> out);
void attention_backward(const AttentionShape& s, std::span<const double> q,
                        std::span<const double> k, std::span<const double> v,
                        std::span<const double> weights, std::span<const double> dout,
                        std::span<double> dq, std::span<double> dk, std::span<double> dv);

// Sets the OpenMP thread count used by the dispatchers and by document-level
// parallel loops.
void set_threads(int threads);
int threads();

}  // namespace mulcom::kernels
