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
#include <vector>

#include "json.hpp"
#include "mulcom/dataset.hpp"
#include "mulcom/rng.hpp"

namespace mulcom {

// A trope whose label is a deterministic function of a planted trigger.
struct PlantedRule {
  enum class Kind { kToken, kMotif };

  std::size_t trope = 0;
  Kind kind = Kind::kToken;
  std::size_t token = 0;   // kToken: vocabulary id that must appear
  std::size_t role_a = 0;  // kMotif: two entity roles that must share a sentence
  std::size_t role_b = 0;
  double probability = 0.3;
};

// Planted-pattern corpus recipe. Word features are fixed random embeddings
// per vocabulary id; each entity carries a role, and a sentence's feature is
// the sum of its mentioned roles' embeddings plus per-sentence noise. Token
// triggers are visible only to the word stream; motif triggers only through
// sentence co-mention, i.e. graph edges.
struct SynthSpec {
  std::size_t docs = 2000;
  std::size_t tropes = 8;
  std::size_t vocab = 200;
  std::size_t roles = 8;
  std::size_t word_dim = 16;
  std::size_t sentence_dim = 16;
  std::size_t min_tokens = 20, max_tokens = 40;
  std::size_t min_sentences = 6, max_sentences = 10;
  std::size_t min_entities = 3, max_entities = 5;
  double pair_sentence_rate = 0.5;  // chance a sentence mentions two entities
  double noise = 0.3;
  double train_fraction = 0.8;
  double val_fraction = 0.0;  // the rest is test
  std::vector<PlantedRule> rules;

  // First half of the tropes token-triggered, second half motif-triggered,
  // each with probability `probability`.
  static SynthSpec standard(std::size_t docs, std::size_t tropes, double probability = 0.3,
                            std::size_t roles = 8);

  // Throws ConfigError on out-of-range or conflicting rules.
  void validate() const;
  std::vector<std::size_t> tropes_of(PlantedRule::Kind kind) const;
};

nlohmann::json to_json(const SynthSpec& spec);
// Missing keys fall back to SynthSpec::standard(docs, tropes) defaults.
SynthSpec synth_spec_from_json(const nlohmann::json& j);

// Label t is on iff the trigger of trope t was planted. Deterministic in
// (seed, spec).
Dataset synth_generate(std::uint64_t seed, const SynthSpec& spec);

// Unstructured random document for tests and gradient checks: uniform
// features, each sentence mentioning one to three random entities, random
// labels.
struct RandomDocShape {
  std::size_t tokens = 5;
  std::size_t sentences = 4;
  std::size_t entities = 3;
  std::size_t word_dim = 4;
  std::size_t sentence_dim = 4;
  std::size_t trope_count = 3;
};

FeatureDoc random_doc(Rng& rng, const RandomDocShape& shape, std::string doc_id = "random");

}  // namespace mulcom
