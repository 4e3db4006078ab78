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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mulcom/graph.hpp"
#include "mulcom/msrrn.hpp"
#include "mulcom/streams.hpp"

namespace mulcom {

struct ModelConfig {
  std::size_t trope_count = 0;
  std::size_t word_dim = 0;
  std::size_t sentence_dim = 0;
  std::size_t trope_dim = 64;      // d_f
  std::size_t attention_dim = 64;  // d_a
  std::size_t hidden_dim = 64;     // reasoner d_h
  std::size_t steps = 3;
  std::size_t heads = 4;
  // Enabled streams, kept in canonical order word, sentence, relation.
  std::vector<StreamKind> streams{StreamKind::kWord, StreamKind::kSentence, StreamKind::kRelation};
  ReasonerKind reasoner = ReasonerKind::kMultiStep;
  std::size_t max_tokens = 4096;

  bool uses(StreamKind kind) const;
  void validate() const;
};

// Ablation label for a stream set, e.g. "MSRRN+Word+Sent".
std::string ablation_name(const ModelConfig& config);
// Accepts ablation labels ("Word+Sent", "MSRRN+Word") or comma lists
// ("word,relation"); returns canonical order.
std::vector<StreamKind> parse_streams(std::string_view text);

class MulComModel {
 public:
  MulComModel(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  std::size_t stream_count() const { return config_.streams.size(); }

  // Every trainable tensor, in a fixed order with stable names.
  ParameterSet parameters() const;

  Tensor tropes;  // trope embedding E, [|T| x d_f]
  std::array<std::optional<StreamParams>, 3> streams;
  std::optional<ReasonerParams> reasoner;
  Mlp stream_projector;  // d_f -> |S|
  Mlp predictor;         // 2*d_f -> 1

  const StreamParams& stream(StreamKind kind) const;

 private:
  ModelConfig config_;
};

// A = row-wise softmax(projector(E)), [|T| x |S|].
Tensor stream_attention(Tape& tape, const Tensor& tropes, const Mlp& projector);

// r_t = sum_s A[t, s] * R_s[t]; R holds one [|T| x d_f] matrix per column of A.
Tensor organize(Tape& tape, const std::vector<Tensor>& stream_outputs, const Tensor& attention);

// x_t = predictor(concat(r_t, e_t)), raw logits, [|T|].
Tensor predict_logits(Tape& tape, const Tensor& organized, const Tensor& tropes,
                      const Mlp& predictor);

// Per-stream outputs in the order of config().streams.
std::vector<Tensor> stream_outputs(Tape& tape, const MulComModel& model, const FeatureDoc& doc,
                                   const SynopsisGraph& graph);

// Full pipeline up to logits, [|T|].
Tensor forward_logits(Tape& tape, const MulComModel& model, const FeatureDoc& doc,
                      const SynopsisGraph& graph);

// Sigmoid scores in (0, 1), one per trope. Builds the graph itself.
std::vector<double> forward(const MulComModel& model, const FeatureDoc& doc);

}  // namespace mulcom
