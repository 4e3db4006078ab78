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

#include "mulcom/tensor.hpp"

#include <sstream>

namespace mulcom {

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) out << (i ? "x" : "") << shape[i];
  out << ']';
  return out.str();
}

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

Tensor Tensor::zeros(Shape shape, bool tracked) { return full(std::move(shape), 0.0, tracked); }

Tensor Tensor::full(Shape shape, double value, bool tracked) {
  const std::size_t n = shape_size(shape);
  return from(std::move(shape), std::vector<double>(n, value), tracked);
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool tracked) {
  if (shape_size(shape) != values.size())
    throw DimensionError("tensor shape " + shape_string(shape) + " does not hold " +
                         std::to_string(values.size()) + " values");
  Tensor t;
  t.storage_ = std::make_shared<Storage>();
  t.storage_->shape = std::move(shape);
  t.storage_->values = std::move(values);
  t.storage_->tracked = tracked;
  return t;
}

Tensor Tensor::scalar(double value, bool tracked) { return from({}, {value}, tracked); }

Tensor Tensor::identity(std::size_t n, bool tracked) {
  Tensor t = zeros({n, n}, tracked);
  for (std::size_t i = 0; i < n; ++i) t[i * n + i] = 1.0;
  return t;
}

std::size_t Tensor::rows() const {
  switch (rank()) {
    case 0:
    case 1:
      return 1;
    case 2:
      return dim(0);
    default:
      throw DimensionError("rows() needs rank <= 2, got " + shape_string(shape()));
  }
}

std::size_t Tensor::cols() const {
  switch (rank()) {
    case 0:
      return 1;
    case 1:
      return dim(0);
    case 2:
      return dim(1);
    default:
      throw DimensionError("cols() needs rank <= 2, got " + shape_string(shape()));
  }
}

double Tensor::item() const {
  if (size() != 1) throw UsageError("item() on tensor of shape " + shape_string(shape()));
  return storage_->values[0];
}

void Tensor::ensure_grad() {
  if (storage_->grad.size() != storage_->values.size())
    storage_->grad.assign(storage_->values.size(), 0.0);
}

void Tensor::zero_grad() { storage_->grad.assign(storage_->values.size(), 0.0); }

Tensor Tensor::clone() const {
  Tensor t = from(shape(), storage_->values, tracked());
  t.storage_->grad = storage_->grad;
  return t;
}

Tape Tape::inference() {
  Tape tape;
  tape.recording_ = false;
  return tape;
}

bool Tape::prepare(Tensor& out, std::initializer_list<const Tensor*> inputs) {
  if (!recording_) return false;
  bool any = false;
  for (const Tensor* in : inputs) any = any || in->tracked();
  if (!any) return false;
  for (const Tensor* in : inputs)
    if (in->tracked()) const_cast<Tensor*>(in)->ensure_grad();
  out.set_tracked(true);
  out.ensure_grad();
  return true;
}

bool Tape::prepare(Tensor& out, std::span<const Tensor> inputs) {
  if (!recording_) return false;
  bool any = false;
  for (const Tensor& in : inputs) any = any || in.tracked();
  if (!any) return false;
  for (const Tensor& in : inputs)
    if (in.tracked()) const_cast<Tensor&>(in).ensure_grad();
  out.set_tracked(true);
  out.ensure_grad();
  return true;
}

void Tape::backward(Tensor& loss) {
  if (loss.size() != 1)
    throw UsageError("backward() needs a scalar loss, got shape " + shape_string(loss.shape()));
  if (!loss.tracked()) throw UsageError("backward() on a loss that is not tracked");
  loss.ensure_grad();
  loss.grad()[0] = 1.0;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
}

void Tape::note_relu_inputs(std::span<const double> inputs) {
  for (double x : inputs) {
    relu_pattern_.push_back(x > 0.0 ? 1 : 0);
    if (x == 0.0) relu_at_zero_ = true;
  }
}

}  // namespace mulcom
