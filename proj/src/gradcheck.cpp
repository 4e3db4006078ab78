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

#include "mulcom/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace mulcom {

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(kRelativeErrorFloor, std::abs(analytic) + std::abs(numeric));
}

GradCheckResult grad_check(const ScalarObjective& objective, ParameterSet& params,
                           const GradCheckOptions& options) {
  params.zero_grad();
  {
    Tape tape;
    Tensor loss = objective(tape);
    tape.backward(loss);
  }

  GradCheckResult result;
  Rng rng(options.seed);
  for (auto& [name, tensor] : params.entries()) {
    std::vector<std::size_t> coords(tensor.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.max_coords_per_tensor && coords.size() > options.max_coords_per_tensor) {
      rng.shuffle(coords);
      coords.resize(options.max_coords_per_tensor);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t i : coords) {
      const double original = tensor[i];
      tensor[i] = original + options.epsilon;
      Tape plus_tape = Tape::inference();
      const double plus = objective(plus_tape).item();
      tensor[i] = original - options.epsilon;
      Tape minus_tape = Tape::inference();
      const double minus = objective(minus_tape).item();
      tensor[i] = original;

      if (plus_tape.relu_pattern() != minus_tape.relu_pattern()) {
        ++result.skipped_kinks;
        continue;
      }
      const double numeric = (plus - minus) / (2.0 * options.epsilon);
      const double err = relative_error(tensor.grad()[i], numeric);
      ++result.checked;
      if (err > result.max_relative_error || !std::isfinite(err)) {
        result.max_relative_error = std::isfinite(err) ? err : INFINITY;
        result.worst_parameter = name + "[" + std::to_string(i) + "]";
        result.worst_analytic = tensor.grad()[i];
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace mulcom
