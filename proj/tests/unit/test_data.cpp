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
#include <filesystem>
#include <fstream>
#include <set>

#include "mulcom/checkpoint.hpp"
#include "mulcom/corpus.hpp"
#include "mulcom/nn.hpp"
#include "mulcom/synth.hpp"
#include "support.hpp"

namespace mulcom {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("mulcom_data_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

FeatureDoc small_doc(const std::string& id, std::vector<std::size_t> labels, std::size_t tokens = 2,
                     std::size_t sentences = 1) {
  FeatureDoc d;
  d.doc_id = id;
  d.word_feats = Matrix{tokens, 2, std::vector<double>(tokens * 2, 0.25)};
  d.sent_feats = Matrix{sentences, 2, std::vector<double>(sentences * 2, -0.5)};
  d.entities = {{"a", {0}}};
  d.labels = std::move(labels);
  return d;
}

std::string manifest_text(std::size_t tropes, const std::string& train_file) {
  nlohmann::json names = nlohmann::json::array();
  for (std::size_t t = 0; t < tropes; ++t) names.push_back("t" + std::to_string(t));
  return nlohmann::json{{"tropes", names}, {"splits", {{"train", {train_file}}}}}.dump();
}

TEST(LoadDataset, EmptyManifestIsValid) {
  TempDir dir("empty");
  write(dir.path() / "manifest.json", R"({"tropes": [], "splits": {}})");
  const Dataset ds = load_dataset(dir.path() / "manifest.json");
  EXPECT_EQ(ds.doc_count(), 0u);
  EXPECT_EQ(ds.trope_count(), 0u);
  EXPECT_TRUE(ds.split("train").empty());
}

TEST(LoadDataset, MalformedRecordNamesItsLine) {
  TempDir dir("malformed");
  write(dir.path() / "manifest.json", manifest_text(2, "train.jsonl"));
  write(dir.path() / "train.jsonl",
        to_json(small_doc("ok", {0})).dump() + "\n\n{\"doc_id\": \"broken\",\n");
  try {
    load_dataset(dir.path() / "manifest.json");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("train.jsonl:3"), std::string::npos) << e.what();
  }
}

TEST(LoadDataset, LabelOutOfRangeIsValidationError) {
  TempDir dir("label");
  write(dir.path() / "manifest.json", manifest_text(2, "train.jsonl"));
  write(dir.path() / "train.jsonl", to_json(small_doc("bad-doc", {2})).dump() + "\n");
  try {
    load_dataset(dir.path() / "manifest.json");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("bad-doc"), std::string::npos) << e.what();
  }
}

TEST(LoadDataset, DuplicateDocIdsAcrossSplitsRejected) {
  TempDir dir("dup");
  nlohmann::json m{{"tropes", {"x"}},
                   {"splits", {{"train", {"a.jsonl"}}, {"test", {"b.jsonl"}}}}};
  write(dir.path() / "manifest.json", m.dump());
  write(dir.path() / "a.jsonl", to_json(small_doc("same", {})).dump() + "\n");
  write(dir.path() / "b.jsonl", to_json(small_doc("same", {0})).dump() + "\n");
  EXPECT_THROW(load_dataset(dir.path() / "manifest.json"), ValidationError);
}

TEST(LoadDataset, WrongTypesAndBadMentionsRejected) {
  nlohmann::json j = to_json(small_doc("d", {}));
  j["labels"] = "zero";
  EXPECT_THROW(doc_from_json(j), ParseError);
  j = to_json(small_doc("d", {}));
  j["word_feats"] = {{1.0, 2.0}, {3.0}};
  EXPECT_THROW(doc_from_json(j), ParseError);
  FeatureDoc d = small_doc("d", {});
  d.entities[0].sentences = {1};
  EXPECT_THROW(validate(d, 1), ValidationError);
  d = small_doc("d", {}, 2, 0);
  d.entities.clear();
  EXPECT_THROW(validate(d, 1), ValidationError);
}

TEST(LoadDataset, ManifestCategoriesChecked) {
  nlohmann::json m{{"tropes", {"Hero"}},
                   {"categories", {{"Hero", "Storyline"}}},
                   {"splits", nlohmann::json::object()}};
  EXPECT_EQ(manifest_from_json(m).trope_categories.at("Hero"), "Storyline");
  m["categories"] = {{"Hero", "Vibes"}};
  EXPECT_THROW(manifest_from_json(m), ParseError);
  m["categories"] = {{"Villain", "Situation"}};
  EXPECT_THROW(manifest_from_json(m), ParseError);
  m.erase("categories");
  m.erase("tropes");
  EXPECT_THROW(manifest_from_json(m), ParseError);
  for (const char* c : {"CharacterTrait", "RoleInteraction", "Situation", "Storyline"})
    EXPECT_TRUE(is_trope_category(c));
}

TEST(SaveDataset, LoadSaveLoadRoundTrips) {
  TempDir dir("roundtrip");
  SynthSpec spec = SynthSpec::standard(40, 4);
  spec.val_fraction = 0.1;
  const Dataset original = synth_generate(3, spec);
  const fs::path manifest = save_dataset(dir.path() / "a", original);
  const Dataset loaded = load_dataset(manifest);
  EXPECT_EQ(loaded.splits, original.splits);
  EXPECT_EQ(loaded.manifest.trope_names, original.manifest.trope_names);
  const Dataset again = load_dataset(save_dataset(dir.path() / "b", loaded));
  EXPECT_EQ(again, loaded);
}

TEST(SaveDataset, DoublesSurviveTextExactly) {
  FeatureDoc d = small_doc("precise", {});
  d.word_feats.values = {0.1, 1.0 / 3.0, -2.5e-310, 1.7976931348623157e308};
  const FeatureDoc back = doc_from_json(nlohmann::json::parse(to_json(d).dump()));
  EXPECT_TRUE(testing::bit_equal(back.word_feats.values, d.word_feats.values));
}

// Naive statistics: selection by repeated minimum removal.
Summary naive_summary(std::vector<double> v) {
  Summary s;
  std::vector<double> sorted;
  while (!v.empty()) {
    auto it = std::min_element(v.begin(), v.end());
    sorted.push_back(*it);
    v.erase(it);
  }
  const std::size_t n = sorted.size();
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = n % 2 == 1 ? sorted[(n - 1) / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  for (double x : sorted) s.average += x / static_cast<double>(n);
  for (double x : sorted) s.stddev += (x - s.average) * (x - s.average) / static_cast<double>(n);
  s.stddev = std::sqrt(s.stddev);
  return s;
}

void expect_summary(const Summary& got, const Summary& want) {
  EXPECT_EQ(got.min, want.min);
  EXPECT_EQ(got.max, want.max);
  EXPECT_EQ(got.median, want.median);
  EXPECT_NEAR(got.average, want.average, 1e-12);
  EXPECT_NEAR(got.stddev, want.stddev, 1e-12);
  EXPECT_LE(got.min, got.median);
  EXPECT_LE(got.median, got.max);
}

TEST(CorpusStats, SingleDocDegenerates) {
  const CorpusStats s = corpus_stats({small_doc("d", {0, 2}, 5, 3)});
  EXPECT_EQ(s.docs, 1u);
  EXPECT_EQ(s.words.median, 5.0);
  EXPECT_EQ(s.words.average, 5.0);
  EXPECT_EQ(s.words.min, 5.0);
  EXPECT_EQ(s.words.max, 5.0);
  EXPECT_EQ(s.words.stddev, 0.0);
  EXPECT_EQ(s.tropes.median, 2.0);
}

TEST(CorpusStats, MedianOfOddTropeCounts) {
  std::vector<std::size_t> many(68);
  std::iota(many.begin(), many.end(), 0);
  std::vector<std::size_t> eight(8);
  std::iota(eight.begin(), eight.end(), 0);
  const CorpusStats s =
      corpus_stats({small_doc("a", {0}), small_doc("b", eight), small_doc("c", many)});
  EXPECT_EQ(s.tropes.median, 8.0);
  EXPECT_EQ(s.tropes.min, 1.0);
  EXPECT_EQ(s.tropes.max, 68.0);
}

TEST(CorpusStats, MatchesNaiveOracleOnRandomCorpora) {
  Rng rng(121);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<FeatureDoc> docs;
    const std::size_t n = 1 + rng.below(10);
    for (std::size_t i = 0; i < n; ++i) {
      RandomDocShape shape;
      shape.tokens = 1 + rng.below(30);
      shape.sentences = 1 + rng.below(12);
      shape.entities = rng.below(6);
      shape.trope_count = 1 + rng.below(6);
      docs.push_back(random_doc(rng, shape, "d" + std::to_string(i)));
    }
    std::vector<double> tropes, words, sentences, roles, corefs;
    for (const FeatureDoc& d : docs) {
      tropes.push_back(static_cast<double>(d.labels.size()));
      words.push_back(static_cast<double>(d.word_feats.rows));
      sentences.push_back(static_cast<double>(d.sent_feats.rows));
      roles.push_back(static_cast<double>(d.entities.size()));
      double m = 0.0;
      for (const auto& e : d.entities) m += static_cast<double>(e.sentences.size());
      corefs.push_back(m);
    }
    const CorpusStats s = corpus_stats(docs);
    EXPECT_EQ(s.docs, n);
    expect_summary(s.tropes, naive_summary(tropes));
    expect_summary(s.words, naive_summary(words));
    expect_summary(s.sentences, naive_summary(sentences));
    expect_summary(s.roles, naive_summary(roles));
    expect_summary(s.corefs, naive_summary(corefs));
  }
}

TEST(Prevalence, AlwaysAndNever) {
  const std::vector<FeatureDoc> docs{small_doc("a", {0}), small_doc("b", {0, 1}), small_doc("c", {0})};
  const std::vector<double> p = trope_prevalence(docs, 3);
  EXPECT_EQ(p[0], 100.0);
  EXPECT_NEAR(p[1], 100.0 / 3.0, 1e-12);
  EXPECT_EQ(p[2], 0.0);
}

TEST(Cooccurrence, IdenticalAndDisjointSets) {
  const std::vector<FeatureDoc> docs{small_doc("a", {0, 1}), small_doc("b", {0, 1, 2}),
                                     small_doc("c", {3})};
  const std::vector<TropePair> pairs = cooccurrence_iou(docs, 4);
  ASSERT_EQ(pairs.size(), 6u);
  EXPECT_EQ(pairs[0].first, 0u);
  EXPECT_EQ(pairs[0].second, 1u);
  EXPECT_EQ(pairs[0].iou, 1.0);
  for (const TropePair& p : pairs)
    if (p.first == 2 && p.second == 3) EXPECT_EQ(p.iou, 0.0);
}

TEST(Cooccurrence, MatchesSetOracleAndIsSortedAndSymmetric) {
  Rng rng(122);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(8), t = 2 + rng.below(4);
    std::vector<FeatureDoc> docs;
    std::vector<std::set<std::size_t>> holders(t);
    for (std::size_t d = 0; d < n; ++d) {
      std::vector<std::size_t> labels;
      for (std::size_t k = 0; k < t; ++k)
        if (rng.bernoulli(0.4)) {
          labels.push_back(k);
          holders[k].insert(d);
        }
      docs.push_back(small_doc("d" + std::to_string(d), labels));
    }
    const std::vector<TropePair> pairs = cooccurrence_iou(docs, t);
    ASSERT_EQ(pairs.size(), t * (t - 1) / 2);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const TropePair& p = pairs[k];
      std::set<std::size_t> both, either = holders[p.first];
      std::set_intersection(holders[p.first].begin(), holders[p.first].end(),
                            holders[p.second].begin(), holders[p.second].end(),
                            std::inserter(both, both.begin()));
      either.insert(holders[p.second].begin(), holders[p.second].end());
      const double iou = either.empty() ? 0.0
                                        : static_cast<double>(both.size()) /
                                              static_cast<double>(either.size());
      EXPECT_EQ(p.iou, iou);
      EXPECT_EQ(p.both, both.size());
      EXPECT_EQ(p.either, either.size());
      if (k > 0) EXPECT_GE(pairs[k - 1].iou, p.iou);
      // swapping the roles of the two tropes yields the same value
      std::vector<FeatureDoc> swapped = docs;
      for (FeatureDoc& d : swapped)
        for (std::size_t& l : d.labels)
          l = l == p.first ? p.second : l == p.second ? p.first : l;
      for (const TropePair& q : cooccurrence_iou(swapped, t))
        if (q.first == p.first && q.second == p.second) EXPECT_EQ(q.iou, p.iou);
    }
  }
}

TEST(Reports, StatsAndCooccurrenceKeys) {
  const Dataset ds = synth_generate(5, SynthSpec::standard(30, 4));
  const nlohmann::json stats = stats_report(ds);
  ASSERT_TRUE(stats.contains("splits"));
  EXPECT_EQ(stats["trope_count"], 4);
  EXPECT_EQ(stats["split_sizes"]["train"]["docs"], 24);
  const nlohmann::json& train = stats["splits"]["train"];
  for (const char* k : {"corpus", "prevalence_pct", "prevalence_by_trope"})
    EXPECT_TRUE(train.contains(k)) << k;
  for (const char* k : {"docs", "tropes", "words", "sentences", "roles", "corefs"})
    EXPECT_TRUE(train["corpus"].contains(k)) << k;
  for (const char* k : {"median", "average", "min", "max", "std"})
    EXPECT_TRUE(train["corpus"]["words"].contains(k)) << k;
  const nlohmann::json co = cooccurrence_report(ds, "train", 3);
  EXPECT_EQ(co["pairs"].size(), 3u);
  for (const char* k : {"rank", "first", "second", "iou", "both", "either"})
    EXPECT_TRUE(co["pairs"][0].contains(k)) << k;
}

// Planted generator.

SynthSpec token_rule_spec(std::size_t docs) {
  SynthSpec spec = SynthSpec::standard(docs, 2);
  spec.rules = {{0, PlantedRule::Kind::kToken, 17, 0, 0, 0.3},
                {1, PlantedRule::Kind::kMotif, 0, 2, 5, 0.3}};
  return spec;
}

std::vector<FeatureDoc> all_docs(const Dataset& ds) {
  std::vector<FeatureDoc> out;
  for (const auto& [name, docs] : ds.splits) out.insert(out.end(), docs.begin(), docs.end());
  return out;
}

std::size_t role_of(const EntityMentions& e) {
  return std::stoul(e.id.substr(e.id.find("_role") + 5));
}

TEST(Synth, TokenRuleLabelsMatchTriggerPresence) {
  const std::vector<FeatureDoc> docs = all_docs(synth_generate(8, token_rule_spec(300)));
  auto rows = [](const FeatureDoc& d) {
    std::set<std::vector<double>> out;
    for (std::size_t r = 0; r < d.word_feats.rows; ++r)
      out.emplace(d.word_feats.row(r).begin(), d.word_feats.row(r).end());
    return out;
  };
  // The trigger embedding is the word row shared by every positive doc.
  std::set<std::vector<double>> common;
  bool first = true;
  for (const FeatureDoc& d : docs) {
    if (std::find(d.labels.begin(), d.labels.end(), 0u) == d.labels.end()) continue;
    const auto r = rows(d);
    if (first) {
      common = r;
      first = false;
      continue;
    }
    std::set<std::vector<double>> keep;
    std::set_intersection(common.begin(), common.end(), r.begin(), r.end(),
                          std::inserter(keep, keep.begin()));
    common = keep;
  }
  ASSERT_EQ(common.size(), 1u);
  const std::vector<double> trigger = *common.begin();
  for (const FeatureDoc& d : docs) {
    const bool labeled = std::find(d.labels.begin(), d.labels.end(), 0u) != d.labels.end();
    EXPECT_EQ(rows(d).count(trigger) == 1, labeled) << d.doc_id;
  }
}

TEST(Synth, MotifRuleLabelsMatchCoMention) {
  for (const FeatureDoc& d : all_docs(synth_generate(9, token_rule_spec(300)))) {
    bool co_mentioned = false;
    for (std::size_t s = 0; s < d.sent_feats.rows; ++s) {
      std::set<std::size_t> roles;
      for (const auto& e : d.entities)
        if (std::count(e.sentences.begin(), e.sentences.end(), s)) roles.insert(role_of(e));
      co_mentioned |= roles.count(2) && roles.count(5);
    }
    const bool labeled = std::find(d.labels.begin(), d.labels.end(), 1u) != d.labels.end();
    EXPECT_EQ(co_mentioned, labeled) << d.doc_id;
  }
}

TEST(Synth, GeneratedDocsAreValidAndEveryEntityIsMentioned) {
  const Dataset ds = synth_generate(10, SynthSpec::standard(200, 8));
  for (const FeatureDoc& d : all_docs(ds)) {
    EXPECT_NO_THROW(validate(d, 8));
    for (const auto& e : d.entities) EXPECT_FALSE(e.sentences.empty()) << d.doc_id << " " << e.id;
  }
}

TEST(Synth, SameSeedIsBitIdenticalAndSeedsDiffer) {
  const SynthSpec spec = SynthSpec::standard(50, 4);
  EXPECT_EQ(synth_generate(4, spec), synth_generate(4, spec));
  EXPECT_NE(synth_generate(4, spec), synth_generate(5, spec));
}

TEST(Synth, PrevalenceWithinBinomialBound) {
  // 2000 docs at p = 0.3: sd is about 1.02 points; 3 points is ~2.9 sd.
  const Dataset ds = synth_generate(11, SynthSpec::standard(2000, 8, 0.3));
  const std::vector<FeatureDoc> docs = all_docs(ds);
  ASSERT_EQ(docs.size(), 2000u);
  for (double p : trope_prevalence(docs, 8)) EXPECT_NEAR(p, 30.0, 3.0);
}

TEST(Synth, SplitFractionsAndDisjointIds) {
  SynthSpec spec = SynthSpec::standard(100, 4);
  spec.val_fraction = 0.1;
  const Dataset ds = synth_generate(12, spec);
  EXPECT_EQ(ds.split("train").size(), 80u);
  EXPECT_EQ(ds.split("val").size(), 10u);
  EXPECT_EQ(ds.split("test").size(), 10u);
  std::set<std::string> ids;
  for (const FeatureDoc& d : all_docs(ds)) EXPECT_TRUE(ids.insert(d.doc_id).second);
}

TEST(Synth, InconsistentSpecIsConfigError) {
  SynthSpec spec = SynthSpec::standard(10, 2);
  spec.rules[0].trope = 5;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = SynthSpec::standard(10, 2);
  spec.rules[1].role_b = spec.rules[1].role_a;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = SynthSpec::standard(10, 2);
  spec.rules[0].token = spec.vocab;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = SynthSpec::standard(10, 2);
  spec.train_fraction = 0.9;
  spec.val_fraction = 0.2;
  EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(Synth, SpecJsonRoundTrip) {
  const SynthSpec spec = token_rule_spec(77);
  const SynthSpec back = synth_spec_from_json(to_json(spec));
  EXPECT_EQ(to_json(back), to_json(spec));
  EXPECT_EQ(synth_generate(1, back), synth_generate(1, spec));
}

}  // namespace
}  // namespace mulcom
