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

#include "mulcom/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mulcom/rng.hpp"

namespace mulcom {
namespace {

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
  double f1() const {
    const std::size_t denom = 2 * tp + fp + fn;
    return denom ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
  }
};

std::size_t trope_count(const BinaryMatrix& m) { return m.empty() ? 0 : m.front().size(); }

void check_shapes(const BinaryMatrix& preds, const BinaryMatrix& labels) {
  if (preds.size() != labels.size())
    throw std::invalid_argument("prediction and label row counts differ");
  for (std::size_t d = 0; d < preds.size(); ++d)
    if (preds[d].size() != labels[d].size() || labels[d].size() != trope_count(labels))
      throw std::invalid_argument("prediction and label widths differ at row " + std::to_string(d));
}

Counts count(const BinaryMatrix& preds, const BinaryMatrix& labels, std::size_t t) {
  Counts c;
  for (std::size_t d = 0; d < labels.size(); ++d) {
    const bool p = preds[d][t], y = labels[d][t];
    c.tp += p && y;
    c.fp += p && !y;
    c.fn += !p && y;
  }
  return c;
}

std::vector<double> column(const ScoreMatrix& m, std::size_t t) {
  std::vector<double> c(m.size());
  for (std::size_t d = 0; d < m.size(); ++d) c[d] = m[d][t];
  return c;
}

std::vector<std::uint8_t> column(const BinaryMatrix& m, std::size_t t) {
  std::vector<std::uint8_t> c(m.size());
  for (std::size_t d = 0; d < m.size(); ++d) c[d] = m[d][t];
  return c;
}

}  // namespace

double f1_score(const BinaryMatrix& preds, const BinaryMatrix& labels, F1Mode mode) {
  check_shapes(preds, labels);
  const std::size_t tropes = trope_count(labels);
  if (mode == F1Mode::kMicro) {
    Counts total;
    for (std::size_t t = 0; t < tropes; ++t) {
      const Counts c = count(preds, labels, t);
      total.tp += c.tp;
      total.fp += c.fp;
      total.fn += c.fn;
    }
    return 100.0 * total.f1();
  }
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t t = 0; t < tropes; ++t) {
    const Counts c = count(preds, labels, t);
    if (c.tp + c.fn == 0) continue;
    sum += c.f1();
    ++used;
  }
  return used ? 100.0 * sum / static_cast<double>(used) : 0.0;
}

double micro_f1_subset(const BinaryMatrix& preds, const BinaryMatrix& labels,
                       const std::vector<std::size_t>& tropes) {
  check_shapes(preds, labels);
  Counts total;
  for (std::size_t t : tropes) {
    const Counts c = count(preds, labels, t);
    total.tp += c.tp;
    total.fp += c.fp;
    total.fn += c.fn;
  }
  return 100.0 * total.f1();
}

std::optional<double> average_precision(std::span<const double> scores,
                                        std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("average_precision: score and label counts differ");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (!labels[order[k]]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  if (hits == 0) return std::nullopt;
  return sum / static_cast<double>(hits);
}

double map_score(const ScoreMatrix& scores, const BinaryMatrix& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("map_score: score and label row counts differ");
  const std::size_t tropes = trope_count(labels);
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t t = 0; t < tropes; ++t) {
    const auto s = column(scores, t);
    const auto y = column(labels, t);
    if (auto ap = average_precision(s, y)) {
      sum += *ap;
      ++used;
    }
  }
  return used ? 100.0 * sum / static_cast<double>(used) : 0.0;
}

BinaryMatrix binarize(const ScoreMatrix& scores, double threshold) {
  BinaryMatrix out(scores.size());
  for (std::size_t d = 0; d < scores.size(); ++d) {
    out[d].resize(scores[d].size());
    for (std::size_t t = 0; t < scores[d].size(); ++t) out[d][t] = scores[d][t] >= threshold;
  }
  return out;
}

EvalReport evaluate(const ScoreMatrix& scores, const BinaryMatrix& labels, double threshold) {
  const BinaryMatrix preds = binarize(scores, threshold);
  EvalReport report;
  report.threshold = threshold;
  report.docs = labels.size();
  report.micro_f1 = f1_score(preds, labels, F1Mode::kMicro);
  report.macro_f1 = f1_score(preds, labels, F1Mode::kMacro);
  report.map = map_score(scores, labels);
  for (std::size_t t = 0; t < trope_count(labels); ++t) {
    const Counts c = count(preds, labels, t);
    TropeMetrics m;
    m.support = c.tp + c.fn;
    m.precision = c.tp + c.fp ? 100.0 * c.tp / static_cast<double>(c.tp + c.fp) : 0.0;
    m.recall = m.support ? 100.0 * c.tp / static_cast<double>(m.support) : 0.0;
    m.f1 = 100.0 * c.f1();
    const auto s = column(scores, t);
    const auto y = column(labels, t);
    if (auto ap = average_precision(s, y))
      m.ap = 100.0 * *ap;
    else
      report.notes.push_back("trope " + std::to_string(t) +
                             " has no gold positives; excluded from mAP and macro-F1");
    report.per_trope.push_back(m);
  }
  return report;
}

nlohmann::json to_json(const EvalReport& report, const std::vector<std::string>& trope_names) {
  nlohmann::json per_trope = nlohmann::json::array();
  for (std::size_t t = 0; t < report.per_trope.size(); ++t) {
    const TropeMetrics& m = report.per_trope[t];
    per_trope.push_back({{"trope", t < trope_names.size() ? trope_names[t] : std::to_string(t)},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"ap", m.ap ? nlohmann::json(*m.ap) : nlohmann::json(nullptr)},
                         {"support", m.support}});
  }
  return {{"micro_f1", report.micro_f1}, {"macro_f1", report.macro_f1},
          {"mAP", report.map},           {"threshold", report.threshold},
          {"docs", report.docs},         {"per_trope", per_trope},
          {"notes", report.notes}};
}

RandomBaseline random_baseline(const BinaryMatrix& labels, std::uint64_t seed, std::size_t trials) {
  if (labels.empty()) throw std::invalid_argument("random_baseline: no documents");
  if (trials == 0) throw std::invalid_argument("random_baseline: zero trials");
  Rng rng(seed);
  std::vector<double> f1s, maps;
  BinaryMatrix preds(labels.size());
  ScoreMatrix scores(labels.size());
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (std::size_t d = 0; d < labels.size(); ++d) {
      preds[d].resize(labels[d].size());
      scores[d].resize(labels[d].size());
      for (auto& p : preds[d]) p = rng.bernoulli(0.5);
      for (auto& s : scores[d]) s = rng.uniform();
    }
    f1s.push_back(f1_score(preds, labels, F1Mode::kMicro));
    maps.push_back(map_score(scores, labels));
  }
  auto mean_ci = [](const std::vector<double>& v, double& mean, double& ci) {
    mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double sq = 0.0;
    for (double x : v) sq += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(sq / static_cast<double>(v.size() - 1)) : 0.0;
    ci = 1.96 * sd / std::sqrt(static_cast<double>(v.size()));
  };
  RandomBaseline out;
  out.trials = trials;
  mean_ci(f1s, out.micro_f1, out.micro_f1_ci);
  mean_ci(maps, out.map, out.map_ci);
  return out;
}

}  // namespace mulcom
