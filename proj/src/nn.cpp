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

#include "mulcom/nn.hpp"

#include <cmath>

namespace mulcom {

void ParameterSet::add(std::string name, Tensor tensor) {
  if (find(name)) throw UsageError("duplicate parameter name " + name);
  entries_.emplace_back(std::move(name), std::move(tensor));
}

Tensor* ParameterSet::find(const std::string& name) {
  for (auto& [n, t] : entries_)
    if (n == name) return &t;
  return nullptr;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : entries_) n += t.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& [name, t] : entries_) t.zero_grad();
}

Tensor init_weight(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> values(fan_in * fan_out);
  for (double& v : values) v = rng.uniform(-bound, bound);
  return Tensor::from({fan_in, fan_out}, std::move(values), true);
}

Linear::Linear(std::size_t in, std::size_t out, Rng& rng)
    : weight(init_weight(in, out, rng)), bias(Tensor::zeros({out}, true)) {}

Linear Linear::projection(std::size_t in, std::size_t out, Rng& rng) {
  Linear l;
  l.weight = init_weight(in, out, rng);
  return l;
}

Linear Linear::identity(std::size_t n, bool with_bias) {
  Linear l;
  l.weight = Tensor::identity(n, true);
  if (with_bias) l.bias = Tensor::zeros({n}, true);
  return l;
}

Linear Linear::zero(std::size_t in, std::size_t out) {
  Linear l;
  l.weight = Tensor::zeros({in, out}, true);
  l.bias = Tensor::zeros({out}, true);
  return l;
}

void Linear::collect(ParameterSet& params, const std::string& prefix) const {
  params.add(prefix + ".weight", weight);
  if (has_bias()) params.add(prefix + ".bias", bias);
}

Mlp::Mlp(std::size_t in, std::size_t width, std::size_t out, Rng& rng)
    : hidden(in, width, rng), output(width, out, rng) {}

Mlp Mlp::zero(std::size_t in, std::size_t width, std::size_t out) {
  Mlp m;
  m.hidden = Linear::zero(in, width);
  m.output = Linear::zero(width, out);
  return m;
}

Tensor Mlp::operator()(Tape& tape, const Tensor& x) const {
  return output(tape, relu(tape, hidden(tape, x)));
}

void Mlp::collect(ParameterSet& params, const std::string& prefix) const {
  hidden.collect(params, prefix + ".hidden");
  output.collect(params, prefix + ".output");
}

LstmCell::LstmCell(std::size_t input, std::size_t hidden, Rng& rng)
    : weight(init_weight(hidden + input, 4 * hidden, rng)),
      bias(Tensor::zeros({4 * hidden}, true)) {}

LstmCell LstmCell::zero(std::size_t input, std::size_t hidden) {
  LstmCell cell;
  cell.weight = Tensor::zeros({hidden + input, 4 * hidden}, true);
  cell.bias = Tensor::zeros({4 * hidden}, true);
  return cell;
}

LstmState LstmCell::operator()(Tape& tape, const LstmState& state, const Tensor& input) const {
  const std::size_t d = hidden_dim();
  if (state.hidden.cols() != d || state.cell.shape() != state.hidden.shape() ||
      input.cols() != input_dim() || input.rows() != state.hidden.rows())
    throw DimensionError("lstm_cell: hidden " + shape_string(state.hidden.shape()) + ", cell " +
                         shape_string(state.cell.shape()) + ", input " +
                         shape_string(input.shape()) + " vs weight " +
                         shape_string(weight.shape()));
  const Tensor z = affine(tape, concat(tape, {state.hidden, input}, state.hidden.rank() - 1),
                          weight, bias);
  const Tensor in_gate = sigmoid(tape, slice_cols(tape, z, 0, d));
  const Tensor forget_gate = sigmoid(tape, slice_cols(tape, z, d, 2 * d));
  const Tensor candidate = tanh(tape, slice_cols(tape, z, 2 * d, 3 * d));
  const Tensor out_gate = sigmoid(tape, slice_cols(tape, z, 3 * d, 4 * d));
  LstmState next;
  next.cell = add(tape, mul(tape, forget_gate, state.cell), mul(tape, in_gate, candidate));
  next.hidden = mul(tape, out_gate, tanh(tape, next.cell));
  return next;
}

void LstmCell::collect(ParameterSet& params, const std::string& prefix) const {
  params.add(prefix + ".weight", weight);
  params.add(prefix + ".bias", bias);
}

MultiHeadAttention::MultiHeadAttention(std::size_t model_dim, std::size_t heads_, Rng& rng)
    : query(Linear::projection(model_dim, model_dim, rng)),
      key(Linear::projection(model_dim, model_dim, rng)),
      value(Linear::projection(model_dim, model_dim, rng)),
      output(model_dim, model_dim, rng),
      heads(heads_) {
  if (heads == 0 || model_dim % heads)
    throw ConfigError("multi-head attention: model dim " + std::to_string(model_dim) +
                      " not divisible by " + std::to_string(heads) + " heads");
}

MultiHeadAttention MultiHeadAttention::identity(std::size_t model_dim, std::size_t heads) {
  if (heads == 0 || model_dim % heads)
    throw ConfigError("multi-head attention: model dim " + std::to_string(model_dim) +
                      " not divisible by " + std::to_string(heads) + " heads");
  MultiHeadAttention mha;
  mha.query = Linear::identity(model_dim, false);
  mha.key = Linear::identity(model_dim, false);
  mha.value = Linear::identity(model_dim, false);
  mha.output = Linear::identity(model_dim);
  mha.heads = heads;
  return mha;
}

Tensor MultiHeadAttention::operator()(Tape& tape, const Tensor& q, const Tensor& k,
                                      const Tensor& v, std::size_t groups) const {
  const Tensor heads_out = scaled_dot_attention(tape, query(tape, q), key(tape, k),
                                                value(tape, v), groups, heads);
  return output(tape, heads_out);
}

void MultiHeadAttention::collect(ParameterSet& params, const std::string& prefix) const {
  query.collect(params, prefix + ".query");
  key.collect(params, prefix + ".key");
  value.collect(params, prefix + ".value");
  output.collect(params, prefix + ".output");
}

}  // namespace mulcom
