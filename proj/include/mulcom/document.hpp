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
#include <stdexcept>
#include <string>
#include <vector>

#include "mulcom/tensor.hpp"

namespace mulcom {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plain row-major feature matrix; immutable input data, no gradients.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * cols, cols);
  }
  Tensor to_tensor() const { return Tensor::from({rows, cols}, values); }
  Tensor head_rows(std::size_t n) const;

  bool operator==(const Matrix&) const = default;
};

struct EntityMentions {
  std::string id;
  std::vector<std::size_t> sentences;  // sentence ordinals mentioning the entity

  bool operator==(const EntityMentions&) const = default;
};

// One synopsis as precomputed encoder outputs plus gold trope indices.
struct FeatureDoc {
  std::string doc_id;
  Matrix word_feats;  // one row per token
  Matrix sent_feats;  // one row per sentence
  std::vector<EntityMentions> entities;
  std::vector<std::size_t> labels;

  bool operator==(const FeatureDoc&) const = default;
};

// Throws ValidationError naming the doc_id on a broken invariant: mention
// ordinals past the last sentence, labels outside [0, trope_count), no
// sentences, or feature rows of inconsistent width.
void validate(const FeatureDoc& doc, std::size_t trope_count);

}  // namespace mulcom
