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

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mulcom/document.hpp"

namespace mulcom {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kSplitNames[] = {"train", "val", "test"};

// Trope categories used when a manifest assigns them.
bool is_trope_category(const std::string& name);

struct DatasetManifest {
  std::vector<std::string> trope_names;
  std::map<std::string, std::string> trope_categories;  // trope name -> category
  // split name -> record files, relative to the manifest's directory
  std::map<std::string, std::vector<std::string>> splits;

  bool operator==(const DatasetManifest&) const = default;
};

struct Dataset {
  DatasetManifest manifest;
  std::map<std::string, std::vector<FeatureDoc>> splits;

  std::size_t trope_count() const { return manifest.trope_names.size(); }
  // Empty when the split is absent.
  const std::vector<FeatureDoc>& split(const std::string& name) const;
  std::size_t doc_count() const;
  bool operator==(const Dataset&) const = default;
};

nlohmann::json to_json(const FeatureDoc& doc);
// Throws ParseError on missing fields or wrong types.
FeatureDoc doc_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);

// One JSON record per line; blank lines are skipped. Errors carry the file
// name and 1-based line number.
std::vector<FeatureDoc> read_records(const std::filesystem::path& path, std::size_t trope_count);
std::string format_records(const std::vector<FeatureDoc>& docs);

// Loads every split, validating documents and split disjointness.
Dataset load_dataset(const std::filesystem::path& manifest_path);

// Writes manifest.json plus one <split>.jsonl per split into `dir`; the saved
// manifest's split lists are rewritten to point at those files.
std::filesystem::path save_dataset(const std::filesystem::path& dir, const Dataset& dataset);

}  // namespace mulcom
