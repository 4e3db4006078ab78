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
#include <stdexcept>
#include <vector>

#include "mulcom/model.hpp"

namespace mulcom {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  // <= 0 selects negatives/positives of the training split, clamped to [1, 20].
  double pos_weight = 0.0;
  double learning_rate = 1e-3;
  std::size_t epochs = 10;
  std::size_t batch_size = 16;
  std::uint64_t seed = 1;
  double threshold = 0.5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;
};

// A document together with its precomputed graph.
struct PreparedDoc {
  const FeatureDoc* doc = nullptr;
  SynopsisGraph graph;
};

std::vector<PreparedDoc> prepare_docs(const std::vector<FeatureDoc>& docs);

double default_pos_weight(const std::vector<FeatureDoc>& docs, std::size_t trope_count);

// Dense 0/1 label row for one document.
Tensor label_row(const FeatureDoc& doc, std::size_t trope_count);

class Adam {
 public:
  Adam(ParameterSet params, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-8);
  // Applies one update from the accumulated gradients.
  void step();
  std::size_t steps() const { return steps_; }

 private:
  ParameterSet params_;
  double lr_, beta1_, beta2_, eps_;
  std::size_t steps_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean per-document loss in each epoch
  double pos_weight = 1.0;
  std::size_t optimizer_steps = 0;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

// Mini-batch Adam on the weighted BCE loss. Batches are drawn from a seeded
// shuffle each epoch; processing is sequential so a seed fixes the result.
TrainResult train(const std::vector<FeatureDoc>& docs, MulComModel& model,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

// Sigmoid scores [docs][tropes]. Documents are scored in parallel with
// read-only parameters.
std::vector<std::vector<double>> predict_scores(const MulComModel& model,
                                                const std::vector<FeatureDoc>& docs);

}  // namespace mulcom
