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
#include <string>
#include <vector>

#include "json.hpp"
#include "mulcom/dataset.hpp"

namespace mulcom {

struct Summary {
  double median = 0.0;  // mean of the two middle values for even counts
  double average = 0.0;
  double min = 0.0;
  double max = 0.0;
  double stddev = 0.0;  // population
};

Summary summarize(std::vector<double> values);

struct CorpusStats {
  std::size_t docs = 0;
  Summary tropes;
  Summary words;
  Summary sentences;
  Summary roles;   // distinct entities per document
  Summary corefs;  // entity mentions per document
};

CorpusStats corpus_stats(const std::vector<FeatureDoc>& docs);

// Percentage of documents carrying each trope.
std::vector<double> trope_prevalence(const std::vector<FeatureDoc>& docs, std::size_t trope_count);

struct TropePair {
  std::size_t first = 0;
  std::size_t second = 0;
  std::size_t both = 0;
  std::size_t either = 0;
  double iou = 0.0;  // both / either, 0 when neither occurs
};

// Jaccard overlap of the document sets of every unordered trope pair,
// sorted by IoU descending, then by (first, second).
std::vector<TropePair> cooccurrence_iou(const std::vector<FeatureDoc>& docs,
                                        std::size_t trope_count);

nlohmann::json to_json(const Summary& s);
nlohmann::json to_json(const CorpusStats& s);
// Per-split corpus summaries, split sizes and trope prevalence.
nlohmann::json stats_report(const Dataset& dataset);
nlohmann::json cooccurrence_report(const Dataset& dataset, const std::string& split,
                                   std::size_t top);

}  // namespace mulcom
