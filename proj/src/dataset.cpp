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

#include "mulcom/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mulcom/checkpoint.hpp"

namespace mulcom {

using nlohmann::json;

Tensor Matrix::head_rows(std::size_t n) const {
  n = std::min(n, rows);
  return Tensor::from({n, cols}, std::vector<double>(values.begin(), values.begin() + n * cols));
}

void validate(const FeatureDoc& doc, std::size_t trope_count) {
  const std::string where = "doc " + doc.doc_id + ": ";
  if (doc.sent_feats.rows == 0) throw ValidationError(where + "no sentences");
  if (doc.word_feats.values.size() != doc.word_feats.rows * doc.word_feats.cols ||
      doc.sent_feats.values.size() != doc.sent_feats.rows * doc.sent_feats.cols)
    throw ValidationError(where + "feature matrix size mismatch");
  for (const EntityMentions& e : doc.entities)
    for (std::size_t s : e.sentences)
      if (s >= doc.sent_feats.rows)
        throw ValidationError(where + "entity " + e.id + " mentions sentence " +
                              std::to_string(s) + " of " + std::to_string(doc.sent_feats.rows));
  for (std::size_t t : doc.labels)
    if (t >= trope_count)
      throw ValidationError(where + "label " + std::to_string(t) + " outside [0, " +
                            std::to_string(trope_count) + ")");
}

bool is_trope_category(const std::string& name) {
  return name == "CharacterTrait" || name == "RoleInteraction" || name == "Situation" ||
         name == "Storyline";
}

const std::vector<FeatureDoc>& Dataset::split(const std::string& name) const {
  static const std::vector<FeatureDoc> kEmpty;
  auto it = splits.find(name);
  return it == splits.end() ? kEmpty : it->second;
}

std::size_t Dataset::doc_count() const {
  std::size_t n = 0;
  for (const auto& [name, docs] : splits) n += docs.size();
  return n;
}

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const char* field) {
  if (!j.is_array()) throw ParseError(std::string(field) + " must be an array of rows");
  Matrix m;
  m.rows = j.size();
  for (const json& row : j) {
    if (!row.is_array()) throw ParseError(std::string(field) + " rows must be arrays");
    if (m.values.empty() && m.cols == 0) m.cols = row.size();
    if (row.size() != m.cols)
      throw ParseError(std::string(field) + " has rows of width " + std::to_string(m.cols) +
                       " and " + std::to_string(row.size()));
    for (const json& v : row) {
      if (!v.is_number()) throw ParseError(std::string(field) + " holds a non-number");
      m.values.push_back(v.get<double>());
    }
  }
  return m;
}

}  // namespace

json to_json(const FeatureDoc& doc) {
  json entities = json::array();
  for (const EntityMentions& e : doc.entities)
    entities.push_back({{"id", e.id}, {"sents", e.sentences}});
  return {{"doc_id", doc.doc_id},
          {"word_feats", matrix_to_json(doc.word_feats)},
          {"sent_feats", matrix_to_json(doc.sent_feats)},
          {"entities", entities},
          {"labels", doc.labels}};
}

FeatureDoc doc_from_json(const json& j) {
  try {
    FeatureDoc doc;
    doc.doc_id = j.at("doc_id").get<std::string>();
    doc.word_feats = matrix_from_json(j.at("word_feats"), "word_feats");
    doc.sent_feats = matrix_from_json(j.at("sent_feats"), "sent_feats");
    for (const json& e : j.at("entities"))
      doc.entities.push_back(
          {e.at("id").get<std::string>(), e.at("sents").get<std::vector<std::size_t>>()});
    doc.labels = j.at("labels").get<std::vector<std::size_t>>();
    return doc;
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

json to_json(const DatasetManifest& m) {
  json j = {{"tropes", m.trope_names}, {"splits", m.splits}};
  if (!m.trope_categories.empty()) j["categories"] = m.trope_categories;
  return j;
}

DatasetManifest manifest_from_json(const json& j) {
  try {
    DatasetManifest m;
    m.trope_names = j.at("tropes").get<std::vector<std::string>>();
    m.trope_categories = j.value("categories", std::map<std::string, std::string>{});
    m.splits = j.value("splits", std::map<std::string, std::vector<std::string>>{});
    const std::set<std::string> names(m.trope_names.begin(), m.trope_names.end());
    if (names.size() != m.trope_names.size()) throw ParseError("duplicate trope names");
    for (const auto& [trope, category] : m.trope_categories) {
      if (!names.count(trope)) throw ParseError("category for unknown trope " + trope);
      if (!is_trope_category(category)) throw ParseError("unknown trope category " + category);
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

std::vector<FeatureDoc> read_records(const std::filesystem::path& path, std::size_t trope_count) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<FeatureDoc> docs;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(number) + ": ";
    try {
      FeatureDoc doc = doc_from_json(json::parse(line));
      validate(doc, trope_count);
      docs.push_back(std::move(doc));
    } catch (const json::parse_error& e) {
      throw ParseError(where + e.what());
    } catch (const ParseError& e) {
      throw ParseError(where + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
  return docs;
}

std::string format_records(const std::vector<FeatureDoc>& docs) {
  std::string out;
  for (const FeatureDoc& d : docs) out += to_json(d).dump() + "\n";
  return out;
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw ParseError("cannot open manifest " + manifest_path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  Dataset ds;
  ds.manifest = manifest_from_json(j);
  const auto base = manifest_path.parent_path();
  std::set<std::string> seen;
  for (const auto& [split, files] : ds.manifest.splits) {
    auto& docs = ds.splits[split];
    for (const std::string& file : files) {
      for (FeatureDoc& d : read_records(base / file, ds.trope_count())) {
        if (!seen.insert(d.doc_id).second)
          throw ValidationError("doc_id " + d.doc_id + " appears more than once (split " + split +
                                ")");
        docs.push_back(std::move(d));
      }
    }
  }
  return ds;
}

std::filesystem::path save_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir);
  DatasetManifest manifest = dataset.manifest;
  manifest.splits.clear();
  for (const auto& [split, docs] : dataset.splits) {
    const std::string file = split + ".jsonl";
    write_file_atomic(dir / file, format_records(docs));
    manifest.splits[split] = {file};
  }
  const auto path = dir / "manifest.json";
  write_file_atomic(path, to_json(manifest).dump(2) + "\n");
  return path;
}

}  // namespace mulcom
