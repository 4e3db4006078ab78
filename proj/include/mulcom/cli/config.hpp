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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "mulcom/model.hpp"
#include "mulcom/synth.hpp"
#include "mulcom/train.hpp"

namespace mulcom::cli {

// Everything a command needs. Precedence: built-in defaults, then the
// --config file, then command-line flags.
struct RunConfig {
  std::uint64_t seed = 1;
  int threads = 1;
  std::filesystem::path out = "out";
  std::filesystem::path manifest;

  ModelConfig model;  // trope/word/sentence dims are filled from the data
  TrainConfig train;
  SynthSpec synth = SynthSpec::standard(2000, 8);

  std::filesystem::path checkpoint;  // eval; defaults to <out>/checkpoint.bin
  std::string eval_split = "test";
  std::size_t random_trials = 0;  // eval: add a random baseline when > 0

  std::string stats_split = "train";
  std::size_t top_pairs = 15;

  double gradcheck_epsilon = 1e-5;
  double gradcheck_tolerance = 1e-4;
};

// Applies the keys present in `j` on top of `config`; unknown keys are
// rejected.
void apply_json(RunConfig& config, const nlohmann::json& j);
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

nlohmann::json to_json(const RunConfig& config);

}  // namespace mulcom::cli
