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

#include "mulcom/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mulcom {

using nlohmann::json;

Summary summarize(std::vector<double> values) {
  Summary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  s.min = values.front();
  s.max = values.back();
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  double total = 0.0;
  for (double v : values) total += v;
  s.average = total / static_cast<double>(n);
  double sq = 0.0;
  for (double v : values) sq += (v - s.average) * (v - s.average);
  s.stddev = std::sqrt(sq / static_cast<double>(n));
  return s;
}

CorpusStats corpus_stats(const std::vector<FeatureDoc>& docs) {
  std::vector<double> tropes, words, sentences, roles, corefs;
  for (const FeatureDoc& d : docs) {
    tropes.push_back(static_cast<double>(std::set<std::size_t>(d.labels.begin(), d.labels.end()).size()));
    words.push_back(static_cast<double>(d.word_feats.rows));
    sentences.push_back(static_cast<double>(d.sent_feats.rows));
    roles.push_back(static_cast<double>(d.entities.size()));
    std::size_t mentions = 0;
    for (const EntityMentions& e : d.entities) mentions += e.sentences.size();
    corefs.push_back(static_cast<double>(mentions));
  }
  return {docs.size(),          summarize(tropes), summarize(words), summarize(sentences),
          summarize(roles), summarize(corefs)};
}

namespace {

std::vector<std::vector<bool>> occurrence(const std::vector<FeatureDoc>& docs,
                                          std::size_t trope_count) {
  std::vector<std::vector<bool>> occurs(trope_count, std::vector<bool>(docs.size(), false));
  for (std::size_t d = 0; d < docs.size(); ++d)
    for (std::size_t t : docs[d].labels) occurs.at(t)[d] = true;
  return occurs;
}

}  // namespace

std::vector<double> trope_prevalence(const std::vector<FeatureDoc>& docs, std::size_t trope_count) {
  std::vector<double> pct(trope_count, 0.0);
  if (docs.empty()) return pct;
  const auto occurs = occurrence(docs, trope_count);
  for (std::size_t t = 0; t < trope_count; ++t)
    pct[t] = 100.0 * static_cast<double>(std::count(occurs[t].begin(), occurs[t].end(), true)) /
             static_cast<double>(docs.size());
  return pct;
}

std::vector<TropePair> cooccurrence_iou(const std::vector<FeatureDoc>& docs,
                                        std::size_t trope_count) {
  const auto occurs = occurrence(docs, trope_count);
  std::vector<TropePair> pairs;
  for (std::size_t a = 0; a < trope_count; ++a)
    for (std::size_t b = a + 1; b < trope_count; ++b) {
      TropePair p{a, b, 0, 0, 0.0};
      for (std::size_t d = 0; d < docs.size(); ++d) {
        p.both += occurs[a][d] && occurs[b][d];
        p.either += occurs[a][d] || occurs[b][d];
      }
      p.iou = p.either ? static_cast<double>(p.both) / static_cast<double>(p.either) : 0.0;
      pairs.push_back(p);
    }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const TropePair& x, const TropePair& y) { return x.iou > y.iou; });
  return pairs;
}

json to_json(const Summary& s) {
  return {{"median", s.median}, {"average", s.average}, {"min", s.min}, {"max", s.max},
          {"std", s.stddev}};
}

json to_json(const CorpusStats& s) {
  return {{"docs", s.docs},
          {"tropes", to_json(s.tropes)},
          {"words", to_json(s.words)},
          {"sentences", to_json(s.sentences)},
          {"roles", to_json(s.roles)},
          {"corefs", to_json(s.corefs)}};
}

json stats_report(const Dataset& dataset) {
  json splits = json::object();
  for (const auto& [name, docs] : dataset.splits) {
    const auto prevalence = trope_prevalence(docs, dataset.trope_count());
    json per_trope = json::object();
    for (std::size_t t = 0; t < dataset.trope_count(); ++t)
      per_trope[dataset.manifest.trope_names[t]] = prevalence[t];
    splits[name] = {{"corpus", to_json(corpus_stats(docs))},
                    {"prevalence_pct", to_json(summarize(prevalence))},
                    {"prevalence_by_trope", per_trope}};
  }
  const std::size_t total = dataset.doc_count();
  json split_share = json::object();
  for (const auto& [name, docs] : dataset.splits)
    split_share[name] = {{"docs", docs.size()},
                         {"pct", total ? 100.0 * static_cast<double>(docs.size()) /
                                             static_cast<double>(total)
                                       : 0.0}};
  return {{"trope_count", dataset.trope_count()}, {"split_sizes", split_share}, {"splits", splits}};
}

json cooccurrence_report(const Dataset& dataset, const std::string& split, std::size_t top) {
  const auto pairs = cooccurrence_iou(dataset.split(split), dataset.trope_count());
  json rows = json::array();
  for (std::size_t i = 0; i < std::min(top, pairs.size()); ++i) {
    const TropePair& p = pairs[i];
    rows.push_back({{"rank", i + 1},
                    {"first", dataset.manifest.trope_names[p.first]},
                    {"second", dataset.manifest.trope_names[p.second]},
                    {"both", p.both},
                    {"either", p.either},
                    {"iou", p.iou}});
  }
  return {{"split", split}, {"pairs", rows}};
}

}  // namespace mulcom
