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
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mulcom {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);
std::size_t shape_size(const Shape& shape);

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Handle to a dense row-major float64 buffer. Copies share storage, which is
// how parameters stay identical between the model and every tape that reads
// them; use clone() for an independent value.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool tracked = false);
  static Tensor full(Shape shape, double value, bool tracked = false);
  static Tensor from(Shape shape, std::vector<double> values, bool tracked = false);
  static Tensor scalar(double value, bool tracked = false);
  static Tensor identity(std::size_t n, bool tracked = false);

  bool defined() const { return storage_ != nullptr; }
  const Shape& shape() const { return storage_->shape; }
  std::size_t rank() const { return storage_->shape.size(); }
  std::size_t size() const { return storage_->values.size(); }
  std::size_t dim(std::size_t axis) const { return storage_->shape.at(axis); }
  // Row/column view of rank-1 and rank-2 tensors; a vector is one row.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<double> values() { return storage_->values; }
  std::span<const double> values() const { return storage_->values; }
  double operator[](std::size_t i) const { return storage_->values[i]; }
  double& operator[](std::size_t i) { return storage_->values[i]; }
  double at(std::size_t r, std::size_t c) const { return storage_->values[r * cols() + c]; }
  double item() const;

  bool tracked() const { return storage_->tracked; }
  void set_tracked(bool tracked) { storage_->tracked = tracked; }

  bool has_grad() const { return !storage_->grad.empty() || storage_->values.empty(); }
  void ensure_grad();
  void zero_grad();
  // Handles share storage, so gradients stay writable through const handles.
  std::span<double> grad() const { return storage_->grad; }

  Tensor clone() const;
  bool same_storage(const Tensor& other) const { return storage_ == other.storage_; }

 private:
  struct Storage {
    Shape shape;
    std::vector<double> values;
    std::vector<double> grad;
    bool tracked = false;
  };
  std::shared_ptr<Storage> storage_;
};

// Records the backward closures of differentiable operations in execution
// order. A disabled tape (inference mode) records nothing and no operation
// allocates gradients through it.
class Tape {
 public:
  Tape() = default;
  static Tape inference();

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  bool recording() const { return recording_; }
  std::size_t size() const { return ops_.size(); }

  // Output is tracked iff recording and any input is tracked. Tracked inputs
  // and the output get gradient buffers.
  bool prepare(Tensor& out, std::initializer_list<const Tensor*> inputs);
  bool prepare(Tensor& out, std::span<const Tensor> inputs);
  void record(std::function<void()> backward) { ops_.push_back(std::move(backward)); }

  // Seeds d(loss)/d(loss) = 1 and runs recorded closures newest first.
  void backward(Tensor& loss);

  // Sign pattern of every relu input seen so far. Gradient checking compares
  // the patterns of the two perturbed evaluations to detect kinks.
  void note_relu_inputs(std::span<const double> inputs);
  const std::vector<std::uint8_t>& relu_pattern() const { return relu_pattern_; }
  bool relu_at_zero() const { return relu_at_zero_; }

 private:
  bool recording_ = true;
  std::vector<std::function<void()>> ops_;
  std::vector<std::uint8_t> relu_pattern_;
  bool relu_at_zero_ = false;
};

}  // namespace mulcom
