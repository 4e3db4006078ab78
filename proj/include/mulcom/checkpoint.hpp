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
#include <string>

#include "json.hpp"
#include "mulcom/model.hpp"

namespace mulcom {

nlohmann::json to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);

// Binary container, little-endian:
//   "MULCOMCK" | u32 version | u64 header bytes | header JSON
//   | u64 tensor count | per tensor: u32 name bytes, name, u32 rank,
//     u64 extents[rank], f64 values[prod(extents)]
// The header holds {"model": ModelConfig, "meta": caller data}. Values are
// stored as raw IEEE doubles, so a load reproduces them bit for bit.
void save_checkpoint(const std::filesystem::path& path, const MulComModel& model,
                     const nlohmann::json& meta = nlohmann::json::object());

struct LoadedCheckpoint {
  MulComModel model;
  nlohmann::json meta;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace mulcom
