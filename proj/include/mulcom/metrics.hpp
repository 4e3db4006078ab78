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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace mulcom {

// Row per document, column per trope.
using BinaryMatrix = std::vector<std::vector<std::uint8_t>>;
using ScoreMatrix = std::vector<std::vector<double>>;

enum class F1Mode { kMicro, kMacro };

// Percentage. Micro pools every (document, trope) decision; macro averages
// per-trope F1 over tropes with at least one gold positive. Zero when there is
// nothing to average or no true positive.
double f1_score(const BinaryMatrix& preds, const BinaryMatrix& labels, F1Mode mode);

// Fraction in [0, 1]. Documents ranked by descending score, ties kept in input
// order. nullopt when there are no positives.
std::optional<double> average_precision(std::span<const double> scores,
                                        std::span<const std::uint8_t> labels);

// Percentage: mean AP over tropes with at least one positive.
double map_score(const ScoreMatrix& scores, const BinaryMatrix& labels);

BinaryMatrix binarize(const ScoreMatrix& scores, double threshold);

struct TropeMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> ap;
  std::size_t support = 0;
};

struct EvalReport {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double map = 0.0;
  double threshold = 0.5;
  std::size_t docs = 0;
  std::vector<TropeMetrics> per_trope;  // percentages, like the aggregates
  std::vector<std::string> notes;
};

EvalReport evaluate(const ScoreMatrix& scores, const BinaryMatrix& labels, double threshold);

// Micro-F1 restricted to a subset of trope columns.
double micro_f1_subset(const BinaryMatrix& preds, const BinaryMatrix& labels,
                       const std::vector<std::size_t>& tropes);

nlohmann::json to_json(const EvalReport& report, const std::vector<std::string>& trope_names);

struct RandomBaseline {
  std::size_t trials = 0;
  double micro_f1 = 0.0;
  double micro_f1_ci = 0.0;  // 95% half-width of the mean
  double map = 0.0;
  double map_ci = 0.0;
};

// Bernoulli(0.5) predictions for F1 and uniform random scores for mAP,
// averaged over `trials` seeded draws.
RandomBaseline random_baseline(const BinaryMatrix& labels, std::uint64_t seed, std::size_t trials);

}  // namespace mulcom
