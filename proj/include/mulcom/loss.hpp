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

#include "mulcom/tensor.hpp"

namespace mulcom {

// Positively weighted binary cross entropy on logits, averaged over the
// batch and the tropes:
//   L = 1/(B*|T|) * sum -[p*y*log(sigmoid(x)) + (1-y)*log(1-sigmoid(x))]
// evaluated through softplus so large |x| never overflows. `labels` must be
// 0/1 and share the logits' shape; it is never differentiated.
Tensor bce_loss(Tape& tape, const Tensor& logits, const Tensor& labels, double pos_weight);

// log(1 + exp(z)) without overflow.
double softplus(double z);

}  // namespace mulcom
