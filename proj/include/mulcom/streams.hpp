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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mulcom/document.hpp"
#include "mulcom/msrrn.hpp"
#include "mulcom/nn.hpp"

namespace mulcom {

class EmptyDocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StreamKind { kWord = 0, kSentence = 1, kRelation = 2 };

std::string_view stream_name(StreamKind kind);
StreamKind parse_stream(std::string_view name);

enum class ReasonerKind { kMultiStep, kLastStep };

// Trope-query attention pooling for one comprehension stream. Tropes are
// projected into the attention space by `query`, document features by `key`
// and `value`; the pooled vector goes back to trope space through `out`.
struct StreamParams {
  Linear query;                     // trope dim -> attention dim
  Linear key;                       // feature dim -> attention dim
  Linear value;                     // feature dim -> attention dim
  Linear out;                       // attention dim -> trope dim
  std::optional<LstmCell> encoder;  // sentence stream: sentence dim -> attention dim

  StreamParams() = default;
  StreamParams(std::size_t trope_dim, std::size_t feature_dim, std::size_t attention_dim, Rng& rng);
  static StreamParams recurrent(std::size_t trope_dim, std::size_t sentence_dim,
                                std::size_t attention_dim, Rng& rng);

  std::size_t attention_dim() const { return query.out_dim(); }
  void collect(ParameterSet& params, const std::string& prefix) const;
};

// r_t = out(softmax(q_t K^T / sqrt(d_a)) V) for every trope row of `tropes`.
// [tropes x trope dim]
Tensor attend(Tape& tape, const Tensor& tropes, const Tensor& feats, const StreamParams& params);

// Softmax weights attend() uses, [tropes x L].
Tensor trope_attention_weights(const Tensor& tropes, const Tensor& feats,
                               const StreamParams& params);

// Attention over raw word features, truncated to the first max_tokens rows.
Tensor word_stream(Tape& tape, const FeatureDoc& doc, const Tensor& tropes,
                   const StreamParams& params, std::size_t max_tokens = 4096);

// Forward LSTM over sentence features; one contextual state per sentence.
Tensor encode_sentences(Tape& tape, const Matrix& sentences, const LstmCell& encoder);

Tensor sentence_stream(Tape& tape, const FeatureDoc& doc, const Tensor& tropes,
                       const StreamParams& params);

struct RelationOutput {
  Tensor output;  // [tropes x trope dim]
  bool present = false;  // false when the graph has no nodes; output is zero
};

RelationOutput relation_stream(Tape& tape, const SynopsisGraph& graph, const Tensor& tropes,
                               const ReasonerParams& reasoner, const StreamParams& params,
                               ReasonerKind kind = ReasonerKind::kMultiStep);

}  // namespace mulcom
