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

// Straight-line reimplementations on nested vectors, sharing no code with the
// tape ops. Used as independent oracles.

#include <cmath>
#include <vector>

#include "mulcom/nn.hpp"
#include "support.hpp"

namespace mulcom::testing {

using Row = std::vector<double>;

inline Row row_of(const Tensor& t, std::size_t r) {
  Row out(t.cols());
  for (std::size_t c = 0; c < t.cols(); ++c) out[c] = t.at(r, c);
  return out;
}

inline Row cat(const Row& a, const Row& b) {
  Row out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline Row plus(const Row& a, const Row& b) {
  Row out = a;
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

inline Row linear(const Linear& l, const Row& x) {
  Row out(l.out_dim(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (l.has_bias()) out[j] = l.bias[j];
    for (std::size_t i = 0; i < x.size(); ++i) out[j] += x[i] * l.weight.at(i, j);
  }
  return out;
}

inline Row mlp(const Mlp& m, const Row& x) {
  Row h = linear(m.hidden, x);
  for (double& v : h) v = v > 0.0 ? v : 0.0;
  return linear(m.output, h);
}

inline std::pair<Row, Row> lstm(const LstmCell& cell, const Row& h, const Row& c, const Row& x) {
  const std::size_t d = h.size();
  const Row hx = cat(h, x);
  Row z(4 * d);
  for (std::size_t col = 0; col < 4 * d; ++col) {
    z[col] = cell.bias[col];
    for (std::size_t r = 0; r < hx.size(); ++r) z[col] += hx[r] * cell.weight.at(r, col);
  }
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  Row h2(d), c2(d);
  for (std::size_t j = 0; j < d; ++j) {
    c2[j] = sig(z[d + j]) * c[j] + sig(z[j]) * std::tanh(z[2 * d + j]);
    h2[j] = sig(z[3 * d + j]) * std::tanh(c2[j]);
  }
  return {h2, c2};
}

// Scaled dot-product attention of one query row over key/value rows.
inline Row attend_one(const Row& q, const std::vector<Row>& keys, const std::vector<Row>& values,
                      Row* weights = nullptr) {
  std::vector<double> s(keys.size());
  double top = -INFINITY;
  for (std::size_t j = 0; j < keys.size(); ++j) {
    s[j] = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) s[j] += q[k] * keys[j][k];
    s[j] /= std::sqrt(static_cast<double>(q.size()));
    top = std::max(top, s[j]);
  }
  double z = 0.0;
  for (double& v : s) z += (v = std::exp(v - top));
  Row out(values[0].size(), 0.0);
  for (std::size_t j = 0; j < keys.size(); ++j) {
    s[j] /= z;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += s[j] * values[j][k];
  }
  if (weights) *weights = s;
  return out;
}

// Self-attention over one sequence with per-head slicing.
inline std::vector<Row> mha(const MultiHeadAttention& m, const std::vector<Row>& xs) {
  std::vector<Row> q, k, v;
  for (const Row& x : xs) {
    q.push_back(linear(m.query, x));
    k.push_back(linear(m.key, x));
    v.push_back(linear(m.value, x));
  }
  const std::size_t d = q[0].size(), dh = d / m.heads;
  std::vector<Row> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Row joined;
    for (std::size_t h = 0; h < m.heads; ++h) {
      auto slice = [&](const Row& r) { return Row(r.begin() + h * dh, r.begin() + (h + 1) * dh); };
      std::vector<Row> ks, vs;
      for (std::size_t j = 0; j < xs.size(); ++j) {
        ks.push_back(slice(k[j]));
        vs.push_back(slice(v[j]));
      }
      const Row part = attend_one(slice(q[i]), ks, vs);
      joined.insert(joined.end(), part.begin(), part.end());
    }
    out.push_back(linear(m.output, joined));
  }
  return out;
}

}  // namespace mulcom::testing
