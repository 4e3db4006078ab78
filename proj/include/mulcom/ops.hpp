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
#include <vector>

#include "mulcom/kernels.hpp"
#include "mulcom/tensor.hpp"

// Differentiable primitives. Every function takes the tape that records its
// backward pass; results are tracked only when the tape records and some
// input is tracked. Matrices are rank 2; vectors may be rank 1.
namespace mulcom {

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);
// x[m x k] * w[k x n] + b[n], bias broadcast over rows; an undefined b
// means no bias.
Tensor affine(Tape& tape, const Tensor& x, const Tensor& w, const Tensor& b);

Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& x, double factor);
// Multiplies row r of x by w[r]; w holds one value per row of x.
Tensor scale_rows(Tape& tape, const Tensor& x, const Tensor& w);

Tensor sigmoid(Tape& tape, const Tensor& x);
Tensor tanh(Tape& tape, const Tensor& x);
Tensor relu(Tape& tape, const Tensor& x);
Tensor softmax(Tape& tape, const Tensor& x, std::size_t axis);

Tensor concat(Tape& tape, const std::vector<Tensor>& parts, std::size_t axis);
Tensor slice_rows(Tape& tape, const Tensor& x, std::size_t begin, std::size_t end);
Tensor slice_cols(Tape& tape, const Tensor& x, std::size_t begin, std::size_t end);
Tensor reshape(Tape& tape, const Tensor& x, Shape shape);

// out[r] = x[index[r]]
Tensor gather_rows(Tape& tape, const Tensor& x, const std::vector<std::size_t>& index);
// out[index[r]] += x[r], out has `rows` rows.
Tensor scatter_add_rows(Tape& tape, const Tensor& x, const std::vector<std::size_t>& index,
                        std::size_t rows);

Tensor reduce_sum(Tape& tape, const Tensor& x);
Tensor reduce_mean(Tape& tape, const Tensor& x);

// Grouped multi-head softmax(Q K^T / sqrt(key_dim)) V; see AttentionShape.
Tensor scaled_dot_attention(Tape& tape, const Tensor& q, const Tensor& k, const Tensor& v,
                            std::size_t groups, std::size_t heads);
// The weights the same call would use, [groups*heads*queries x keys]. Not
// differentiable.
Tensor attention_weights(const Tensor& q, const Tensor& k, std::size_t groups,
                         std::size_t heads);

}  // namespace mulcom
