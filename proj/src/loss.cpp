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

#include "mulcom/loss.hpp"

#include <cmath>

#include "mulcom/document.hpp"

namespace mulcom {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

Tensor bce_loss(Tape& tape, const Tensor& logits, const Tensor& labels, double pos_weight) {
  if (logits.shape() != labels.shape())
    throw DimensionError("bce_loss: logits " + shape_string(logits.shape()) + " vs labels " +
                         shape_string(labels.shape()));
  if (!(pos_weight > 0.0)) throw ValidationError("bce_loss: pos_weight must be positive");
  for (double y : labels.values())
    if (y != 0.0 && y != 1.0) throw ValidationError("bce_loss: labels must be 0 or 1");
  const std::size_t n = logits.size();
  if (n == 0) throw DimensionError("bce_loss: empty batch");

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = logits[i], y = labels[i];
    // -log(sigmoid(x)) = softplus(-x); -log(1 - sigmoid(x)) = softplus(x)
    total += pos_weight * y * softplus(-x) + (1.0 - y) * softplus(x);
  }
  const double inv = 1.0 / static_cast<double>(n);
  Tensor out = Tensor::scalar(total * inv);
  if (tape.prepare(out, {&logits})) {
    tape.record([logits, labels, out, pos_weight, inv]() mutable {
      const double g = out.grad()[0] * inv;
      auto gx = logits.grad();
      for (std::size_t i = 0; i < gx.size(); ++i) {
        const double x = logits[i], y = labels[i];
        const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
        gx[i] += g * (pos_weight * y * (s - 1.0) + (1.0 - y) * s);
      }
    });
  }
  return out;
}

}  // namespace mulcom
