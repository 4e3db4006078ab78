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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "mulcom/metrics.hpp"
#include "mulcom/rng.hpp"

namespace mulcom {
namespace {

BinaryMatrix random_binary(Rng& rng, std::size_t n, std::size_t t, double p = 0.4) {
  BinaryMatrix m(n, std::vector<std::uint8_t>(t));
  for (auto& row : m)
    for (auto& v : row) v = rng.bernoulli(p);
  return m;
}

// Scores drawn from a small grid so ties are common.
ScoreMatrix random_scores(Rng& rng, std::size_t n, std::size_t t) {
  ScoreMatrix m(n, std::vector<double>(t));
  for (auto& row : m)
    for (auto& v : row) v = static_cast<double>(rng.below(4)) / 4.0;
  return m;
}

// Set-based F1: 2|P & Y| / (|P| + |Y|) over (doc, trope) cells.
using Cells = std::set<std::pair<std::size_t, std::size_t>>;

double oracle_f1_fraction(const Cells& p, const Cells& y) {
  std::size_t both = 0;
  for (const auto& cell : p) both += y.count(cell);
  const std::size_t denom = p.size() + y.size();
  return denom ? 2.0 * static_cast<double>(both) / static_cast<double>(denom) : 0.0;
}

double oracle_f1(const Cells& p, const Cells& y) { return 100.0 * oracle_f1_fraction(p, y); }

Cells cells(const BinaryMatrix& m, std::size_t only = SIZE_MAX) {
  Cells out;
  for (std::size_t d = 0; d < m.size(); ++d)
    for (std::size_t t = 0; t < m[d].size(); ++t)
      if (m[d][t] && (only == SIZE_MAX || only == t)) out.insert({d, t});
  return out;
}

double oracle_macro(const BinaryMatrix& p, const BinaryMatrix& y) {
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t t = 0; t < y[0].size(); ++t) {
    if (cells(y, t).empty()) continue;
    sum += oracle_f1_fraction(cells(p, t), cells(y, t));
    ++used;
  }
  return used ? 100.0 * sum / static_cast<double>(used) : 0.0;
}

// Prefix enumeration: an item's rank counts every item with a higher score or
// an equal score earlier in input order.
std::optional<double> oracle_ap(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  const std::size_t n = s.size();
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    rank[i] = 1;
    for (std::size_t j = 0; j < n; ++j)
      if (s[j] > s[i] || (s[j] == s[i] && j < i)) ++rank[i];
  }
  double total = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!y[i]) continue;
    ++positives;
    std::size_t hits = 0;
    for (std::size_t j = 0; j < n; ++j) hits += y[j] && rank[j] <= rank[i];
    total += static_cast<double>(hits) / static_cast<double>(rank[i]);
  }
  if (!positives) return std::nullopt;
  return total / static_cast<double>(positives);
}

TEST(F1, PerfectAndAllNegative) {
  Rng rng(131);
  BinaryMatrix y = random_binary(rng, 6, 3);
  y[0] = {1, 1, 1};
  EXPECT_EQ(f1_score(y, y, F1Mode::kMicro), 100.0);
  EXPECT_EQ(f1_score(y, y, F1Mode::kMacro), 100.0);
  const BinaryMatrix none(6, std::vector<std::uint8_t>(3, 0));
  EXPECT_EQ(f1_score(none, y, F1Mode::kMicro), 0.0);
  EXPECT_EQ(f1_score(none, y, F1Mode::kMacro), 0.0);
  EXPECT_EQ(f1_score(none, none, F1Mode::kMicro), 0.0);
}

TEST(F1, FourDocThreeTropeConfusionCounts) {
  const BinaryMatrix y{{1, 0, 1}, {0, 1, 0}, {1, 1, 0}, {0, 0, 1}};
  const BinaryMatrix p{{1, 1, 0}, {0, 1, 0}, {0, 1, 0}, {1, 0, 1}};
  // tp/fp/fn per trope: (1,1,1) (2,1,0) (1,0,1); pooled (4,2,2)
  EXPECT_NEAR(f1_score(p, y, F1Mode::kMicro), 100.0 * 8.0 / 12.0, 1e-12);
  EXPECT_NEAR(f1_score(p, y, F1Mode::kMacro), 100.0 * 59.0 / 90.0, 1e-12);
}

TEST(F1, MacroSkipsTropesWithoutGoldPositives) {
  const BinaryMatrix y{{1, 0}, {0, 0}};
  const BinaryMatrix p{{1, 1}, {0, 1}};
  EXPECT_EQ(f1_score(p, y, F1Mode::kMacro), 100.0);
  EXPECT_NEAR(f1_score(p, y, F1Mode::kMicro), 100.0 * 2.0 / 4.0, 1e-12);
}

TEST(F1, MatchesSetOracleExactly) {
  Rng rng(132);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(8), t = 1 + rng.below(3);
    const BinaryMatrix y = random_binary(rng, n, t), p = random_binary(rng, n, t);
    EXPECT_EQ(f1_score(p, y, F1Mode::kMicro), oracle_f1(cells(p), cells(y)));
    EXPECT_EQ(f1_score(p, y, F1Mode::kMacro), oracle_macro(p, y));
  }
}

TEST(F1, InvariantUnderDocAndTropePermutation) {
  Rng rng(133);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(10), t = 1 + rng.below(5);
    BinaryMatrix y = random_binary(rng, n, t), p = random_binary(rng, n, t);
    const double micro = f1_score(p, y, F1Mode::kMicro);
    std::vector<std::size_t> docs(n), tropes(t);
    std::iota(docs.begin(), docs.end(), 0);
    std::iota(tropes.begin(), tropes.end(), 0);
    rng.shuffle(docs);
    rng.shuffle(tropes);
    BinaryMatrix yp(n, std::vector<std::uint8_t>(t)), pp = yp;
    for (std::size_t d = 0; d < n; ++d)
      for (std::size_t k = 0; k < t; ++k) {
        yp[d][k] = y[docs[d]][tropes[k]];
        pp[d][k] = p[docs[d]][tropes[k]];
      }
    EXPECT_EQ(f1_score(pp, yp, F1Mode::kMicro), micro);
  }
}

TEST(F1, SubsetSelectsColumns) {
  const BinaryMatrix y{{1, 0, 1}, {0, 1, 1}};
  const BinaryMatrix p{{1, 1, 0}, {0, 1, 1}};
  EXPECT_EQ(micro_f1_subset(p, y, {1}), f1_score({{1}, {1}}, {{0}, {1}}, F1Mode::kMicro));
  EXPECT_EQ(micro_f1_subset(p, y, {0, 1, 2}), f1_score(p, y, F1Mode::kMicro));
  EXPECT_THROW(f1_score({{1}}, {{1, 0}}, F1Mode::kMicro), std::invalid_argument);
}

TEST(AveragePrecision, SinglePositiveFirstOrLast) {
  const std::vector<double> s{0.9, 0.5, 0.3, 0.1};
  EXPECT_EQ(average_precision(s, std::vector<std::uint8_t>{1, 0, 0, 0}), 1.0);
  EXPECT_EQ(average_precision(s, std::vector<std::uint8_t>{0, 0, 0, 1}), 0.25);
  EXPECT_FALSE(average_precision(s, std::vector<std::uint8_t>{0, 0, 0, 0}).has_value());
}

TEST(AveragePrecision, SixItemRankings) {
  // positives at ranks 1, 3, 6
  EXPECT_NEAR(*average_precision(std::vector<double>{0.9, 0.8, 0.7, 0.6, 0.5, 0.4},
                                 std::vector<std::uint8_t>{1, 0, 1, 0, 0, 1}),
              13.0 / 18.0, 1e-12);
  // ties in input order: ranking 1,4,0,2,5,3 puts positives at ranks 2, 3, 6
  EXPECT_NEAR(*average_precision(std::vector<double>{0.5, 0.9, 0.5, 0.1, 0.9, 0.5},
                                 std::vector<std::uint8_t>{1, 0, 0, 1, 1, 0}),
              5.0 / 9.0, 1e-12);
}

TEST(AveragePrecision, MatchesPrefixOracle) {
  Rng rng(134);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(4));
      y[i] = rng.bernoulli(0.5);
    }
    const auto got = average_precision(s, y), want = oracle_ap(s, y);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (got) EXPECT_NEAR(*got, *want, 1e-12);
  }
}

TEST(AveragePrecision, BoundedAndMonotoneUnderPromotion) {
  Rng rng(135);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(10);
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = rng.uniform();
      y[i] = rng.bernoulli(0.4);
    }
    y[rng.below(n)] = 1;
    const double ap = *average_precision(s, y);
    const double positives = std::count(y.begin(), y.end(), 1);
    EXPECT_LE(ap, 1.0);
    // worst case: every positive ranked last
    double floor = 0.0;
    for (double k = 1; k <= positives; ++k) floor += k / (n - positives + k);
    EXPECT_GE(ap, floor / positives - 1e-15);
    // swap a positive with a higher-ranked negative by exchanging scores
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n; ++i) (y[i] ? pos : neg).push_back(i);
    if (neg.empty()) continue;
    const std::size_t a = pos[rng.below(pos.size())], b = neg[rng.below(neg.size())];
    if (s[b] <= s[a]) continue;
    std::swap(s[a], s[b]);
    EXPECT_GE(*average_precision(s, y), ap - 1e-15);
  }
}

TEST(Map, PerfectRankingAndTwoTropeMean) {
  const BinaryMatrix y{{1, 0}, {0, 1}, {1, 1}};
  const ScoreMatrix perfect{{0.9, 0.1}, {0.2, 0.8}, {0.7, 0.6}};
  EXPECT_EQ(map_score(perfect, y), 100.0);
  const ScoreMatrix mixed{{0.1, 0.1}, {0.9, 0.8}, {0.5, 0.9}};
  const double ap0 = *average_precision(std::vector<double>{0.1, 0.9, 0.5}, std::vector<std::uint8_t>{1, 0, 1});
  const double ap1 = *average_precision(std::vector<double>{0.1, 0.8, 0.9}, std::vector<std::uint8_t>{0, 1, 1});
  EXPECT_NEAR(map_score(mixed, y), 100.0 * (ap0 + ap1) / 2.0, 1e-12);
}

TEST(Map, IdenticalScoresFollowInputOrder) {
  Rng rng(136);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(8), t = 1 + rng.below(3);
    const BinaryMatrix y = random_binary(rng, n, t);
    const ScoreMatrix flat(n, std::vector<double>(t, 0.5));
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < t; ++k) {
      std::vector<std::uint8_t> col;
      for (const auto& row : y) col.push_back(row[k]);
      if (auto ap = oracle_ap(std::vector<double>(n, 0.5), col)) {
        sum += *ap;
        ++used;
      }
    }
    EXPECT_NEAR(map_score(flat, y), used ? 100.0 * sum / static_cast<double>(used) : 0.0, 1e-12);
  }
  // a single positive in last place: AP equals prevalence
  const BinaryMatrix last{{0}, {0}, {0}, {1}};
  EXPECT_EQ(map_score(ScoreMatrix(4, {0.5}), last), 25.0);
}

TEST(Evaluate, AggregatesAgreeWithPerTropeRows) {
  Rng rng(137);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(8), t = 1 + rng.below(3);
    const BinaryMatrix y = random_binary(rng, n, t);
    const ScoreMatrix s = random_scores(rng, n, t);
    const EvalReport r = evaluate(s, y, 0.5);
    const BinaryMatrix p = binarize(s, 0.5);
    EXPECT_EQ(r.micro_f1, oracle_f1(cells(p), cells(y)));
    EXPECT_EQ(r.macro_f1, oracle_macro(p, y));
    double f1_sum = 0.0, ap_sum = 0.0;
    std::size_t supported = 0;
    for (const TropeMetrics& m : r.per_trope) {
      EXPECT_GE(m.f1, 0.0);
      EXPECT_LE(m.f1, 100.0);
      if (!m.support) continue;
      ++supported;
      f1_sum += m.f1;
      ap_sum += *m.ap;
    }
    if (supported) {
      EXPECT_NEAR(r.macro_f1, f1_sum / static_cast<double>(supported), 1e-12);
      EXPECT_NEAR(r.map, ap_sum / static_cast<double>(supported), 1e-12);
    }
    EXPECT_EQ(r.notes.size(), t - supported);
  }
}

TEST(Evaluate, ThresholdIsInclusive) {
  EXPECT_EQ(binarize({{0.5, 0.49}}, 0.5), (BinaryMatrix{{1, 0}}));
}

TEST(Evaluate, JsonHasFixedKeys) {
  const EvalReport r = evaluate({{0.9, 0.1}}, {{1, 0}}, 0.5);
  const nlohmann::json j = to_json(r, {"a", "b"});
  for (const char* k : {"micro_f1", "macro_f1", "mAP", "threshold", "docs", "per_trope", "notes"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["per_trope"][0]["trope"], "a");
  EXPECT_TRUE(j["per_trope"][1]["ap"].is_null());
  EXPECT_EQ(j["notes"].size(), 1u);
}

TEST(RandomBaseline, AllPositiveLabelsGiveTwoThirdsF1) {
  // precision 1 and recall near 1/2 give F1 near 2/3
  const BinaryMatrix y(200, std::vector<std::uint8_t>(3, 1));
  const RandomBaseline b = random_baseline(y, 7, 50);
  EXPECT_EQ(b.trials, 50u);
  EXPECT_GT(b.micro_f1_ci, 0.0);
  EXPECT_NEAR(b.micro_f1, 200.0 / 3.0, 3.0 * b.micro_f1_ci + 0.1);
  EXPECT_EQ(b.map, 100.0);
}

TEST(RandomBaseline, AllNegativeLabelsGiveZero) {
  const BinaryMatrix y(20, std::vector<std::uint8_t>(3, 0));
  const RandomBaseline b = random_baseline(y, 7, 10);
  EXPECT_EQ(b.micro_f1, 0.0);
  EXPECT_EQ(b.map, 0.0);
}

TEST(RandomBaseline, SeededAndValidated) {
  Rng rng(138);
  const BinaryMatrix y = random_binary(rng, 30, 4, 0.1);
  const RandomBaseline a = random_baseline(y, 3, 5), b = random_baseline(y, 3, 5);
  EXPECT_EQ(a.micro_f1, b.micro_f1);
  EXPECT_EQ(a.map, b.map);
  EXPECT_THROW(random_baseline({}, 1, 5), std::invalid_argument);
  EXPECT_THROW(random_baseline(y, 1, 0), std::invalid_argument);
}

}  // namespace
}  // namespace mulcom
