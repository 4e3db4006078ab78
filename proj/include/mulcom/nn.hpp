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
#include <string>
#include <utility>
#include <vector>

#include "mulcom/ops.hpp"
#include "mulcom/rng.hpp"
#include "mulcom/tensor.hpp"

namespace mulcom {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Ordered list of named trainable tensors. Names are unique and stable; they
// key checkpoints and the optimizer state.
class ParameterSet {
 public:
  void add(std::string name, Tensor tensor);
  const std::vector<std::pair<std::string, Tensor>>& entries() const { return entries_; }
  std::vector<std::pair<std::string, Tensor>>& entries() { return entries_; }
  Tensor* find(const std::string& name);
  std::size_t scalar_count() const;
  void zero_grad();

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
};

// Weight uniform in +-1/sqrt(fan_in), tracked.
Tensor init_weight(std::size_t fan_in, std::size_t fan_out, Rng& rng);

struct Linear {
  Tensor weight;  // [in x out]
  Tensor bias;    // [out]; undefined for a bias-free projection

  Linear() = default;
  Linear(std::size_t in, std::size_t out, Rng& rng);
  // x * W only.
  static Linear projection(std::size_t in, std::size_t out, Rng& rng);
  static Linear identity(std::size_t n, bool with_bias = true);
  static Linear zero(std::size_t in, std::size_t out);

  bool has_bias() const { return bias.defined(); }

  std::size_t in_dim() const { return weight.dim(0); }
  std::size_t out_dim() const { return weight.dim(1); }
  Tensor operator()(Tape& tape, const Tensor& x) const { return affine(tape, x, weight, bias); }
  void collect(ParameterSet& params, const std::string& prefix) const;
};

// affine -> relu -> affine
struct Mlp {
  Linear hidden;
  Linear output;

  Mlp() = default;
  Mlp(std::size_t in, std::size_t width, std::size_t out, Rng& rng);
  static Mlp zero(std::size_t in, std::size_t width, std::size_t out);

  Tensor operator()(Tape& tape, const Tensor& x) const;
  void collect(ParameterSet& params, const std::string& prefix) const;
};

struct LstmState {
  Tensor hidden;
  Tensor cell;
};

// Standard LSTM cell applied row-wise: every row of h, c and the input is an
// independent sequence element. Gate blocks in the weight columns are
// ordered input, forget, candidate, output; the weight rows take concat(h, x).
struct LstmCell {
  Tensor weight;  // [(hidden + input) x 4*hidden]
  Tensor bias;    // [4*hidden]

  LstmCell() = default;
  LstmCell(std::size_t input, std::size_t hidden, Rng& rng);
  static LstmCell zero(std::size_t input, std::size_t hidden);

  std::size_t hidden_dim() const { return bias.size() / 4; }
  std::size_t input_dim() const { return weight.dim(0) - hidden_dim(); }
  LstmState operator()(Tape& tape, const LstmState& state, const Tensor& input) const;
  void collect(ParameterSet& params, const std::string& prefix) const;
};

// Bias-free query/key/value projections, grouped scaled dot-product
// attention per head, then the output projection.
struct MultiHeadAttention {
  Linear query, key, value, output;
  std::size_t heads = 1;

  MultiHeadAttention() = default;
  MultiHeadAttention(std::size_t model_dim, std::size_t heads, Rng& rng);
  static MultiHeadAttention identity(std::size_t model_dim, std::size_t heads);

  // Rows are split into `groups` equal blocks that attend independently.
  Tensor operator()(Tape& tape, const Tensor& q, const Tensor& k, const Tensor& v,
                    std::size_t groups = 1) const;
  void collect(ParameterSet& params, const std::string& prefix) const;
};

}  // namespace mulcom
