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

#include "mulcom/train.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>

#include "mulcom/loss.hpp"

namespace mulcom {

void TrainConfig::validate() const {
  if (learning_rate < 0.0) throw ConfigError("learning_rate must be >= 0");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("Adam betas must lie in [0, 1)");
}

std::vector<PreparedDoc> prepare_docs(const std::vector<FeatureDoc>& docs) {
  std::vector<PreparedDoc> prepared(docs.size());
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) prepared[i] = {&docs[i], build_graph(docs[i])};
  return prepared;
}

double default_pos_weight(const std::vector<FeatureDoc>& docs, std::size_t trope_count) {
  std::size_t positives = 0;
  for (const FeatureDoc& d : docs) positives += d.labels.size();
  const std::size_t total = docs.size() * trope_count;
  if (positives == 0) return 20.0;
  const double ratio = static_cast<double>(total - positives) / static_cast<double>(positives);
  return std::clamp(ratio, 1.0, 20.0);
}

Tensor label_row(const FeatureDoc& doc, std::size_t trope_count) {
  Tensor y = Tensor::zeros({1, trope_count});
  for (std::size_t t : doc.labels) y[t] = 1.0;
  return y;
}

Adam::Adam(ParameterSet params, double learning_rate, double beta1, double beta2, double epsilon)
    : params_(std::move(params)), lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  for (auto& [name, t] : params_.entries()) {
    m_.emplace_back(t.size(), 0.0);
    v_.emplace_back(t.size(), 0.0);
  }
}

void Adam::step() {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  auto& entries = params_.entries();
  for (std::size_t p = 0; p < entries.size(); ++p) {
    Tensor& t = entries[p].second;
    if (!t.has_grad()) continue;
    auto g = t.grad();
    auto w = t.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m_[p][i] = beta1_ * m_[p][i] + (1.0 - beta1_) * g[i];
      v_[p][i] = beta2_ * v_[p][i] + (1.0 - beta2_) * g[i] * g[i];
      w[i] -= lr_ * (m_[p][i] / c1) / (std::sqrt(v_[p][i] / c2) + eps_);
    }
  }
}

TrainResult train(const std::vector<FeatureDoc>& docs, MulComModel& model,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (docs.empty()) throw TrainingError("training split is empty");
  const std::size_t trope_count = model.config().trope_count;

  TrainResult result;
  result.pos_weight =
      config.pos_weight > 0.0 ? config.pos_weight : default_pos_weight(docs, trope_count);

  const std::vector<PreparedDoc> prepared = prepare_docs(docs);
  std::vector<Tensor> labels;
  labels.reserve(docs.size());
  for (const FeatureDoc& d : docs) labels.push_back(label_row(d, trope_count));

  ParameterSet params = model.parameters();
  Adam optimizer(params, config.learning_rate, config.beta1, config.beta2, config.adam_epsilon);
  Rng order_rng(config.seed);
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    order_rng.shuffle(order);
    double epoch_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      params.zero_grad();
      for (std::size_t k = start; k < end; ++k) {
        const PreparedDoc& item = prepared[order[k]];
        Tape tape;
        const Tensor logits = forward_logits(tape, model, *item.doc, item.graph);
        const Tensor row = reshape(tape, logits, {1, trope_count});
        Tensor loss = scale(tape, bce_loss(tape, row, labels[order[k]], result.pos_weight),
                            inv_batch);
        const double value = loss.item() / inv_batch;
        if (!std::isfinite(value)) {
          std::ostringstream msg;
          msg << "non-finite loss " << value << " at epoch " << epoch << ", doc "
              << item.doc->doc_id << ", optimizer step " << optimizer.steps();
          throw TrainingError(msg.str());
        }
        epoch_total += value;
        tape.backward(loss);
      }
      optimizer.step();
    }
    const double mean = epoch_total / static_cast<double>(docs.size());
    result.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  result.optimizer_steps = optimizer.steps();
  return result;
}

std::vector<std::vector<double>> predict_scores(const MulComModel& model,
                                                const std::vector<FeatureDoc>& docs) {
  std::vector<std::vector<double>> scores(docs.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      scores[i] = forward(model, docs[i]);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return scores;
}

}  // namespace mulcom
