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
#include <cstdint>
#include <functional>
#include <string>

#include "mulcom/nn.hpp"

namespace mulcom {

// Deterministic scalar objective over the tensors in a ParameterSet; it must
// build everything it needs on the tape it is given.
using ScalarObjective = std::function<Tensor(Tape&)>;

struct GradCheckOptions {
  double epsilon = 1e-5;
  // 0 checks every coordinate, otherwise at most this many per tensor.
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 0x5eed;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  // Coordinates whose perturbation flips a relu, where the derivative is
  // undefined.
  std::size_t skipped_kinks = 0;
  std::string worst_parameter;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// |analytic - numeric| / max(kRelativeErrorFloor, |analytic| + |numeric|)
inline constexpr double kRelativeErrorFloor = 1e-8;

double relative_error(double analytic, double numeric);

// Compares backward() against central differences for every sampled
// coordinate of `params`. Parameter values are restored afterwards; their
// gradient buffers hold the analytic gradient.
GradCheckResult grad_check(const ScalarObjective& objective, ParameterSet& params,
                           const GradCheckOptions& options = {});

}  // namespace mulcom
