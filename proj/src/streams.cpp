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

#include "mulcom/streams.hpp"

#include <algorithm>
#include <cmath>

namespace mulcom {

std::string_view stream_name(StreamKind kind) {
  switch (kind) {
    case StreamKind::kWord:
      return "word";
    case StreamKind::kSentence:
      return "sentence";
    case StreamKind::kRelation:
      return "relation";
  }
  return "?";
}

StreamKind parse_stream(std::string_view name) {
  if (name == "word") return StreamKind::kWord;
  if (name == "sentence" || name == "sent") return StreamKind::kSentence;
  if (name == "relation" || name == "msrrn") return StreamKind::kRelation;
  throw ConfigError("unknown stream '" + std::string(name) + "'");
}

StreamParams::StreamParams(std::size_t trope_dim, std::size_t feature_dim,
                           std::size_t attention_dim, Rng& rng)
    : query(Linear::projection(trope_dim, attention_dim, rng)),
      key(Linear::projection(feature_dim, attention_dim, rng)),
      value(Linear::projection(feature_dim, attention_dim, rng)),
      out(attention_dim, trope_dim, rng) {}

StreamParams StreamParams::recurrent(std::size_t trope_dim, std::size_t sentence_dim,
                                     std::size_t attention_dim, Rng& rng) {
  StreamParams p(trope_dim, attention_dim, attention_dim, rng);
  p.encoder = LstmCell(sentence_dim, attention_dim, rng);
  return p;
}

void StreamParams::collect(ParameterSet& params, const std::string& prefix) const {
  query.collect(params, prefix + ".query");
  key.collect(params, prefix + ".key");
  value.collect(params, prefix + ".value");
  out.collect(params, prefix + ".out");
  if (encoder) encoder->collect(params, prefix + ".encoder");
}

Tensor attend(Tape& tape, const Tensor& tropes, const Tensor& feats, const StreamParams& params) {
  if (feats.rows() == 0 || feats.size() == 0)
    throw EmptyDocumentError("attention over an empty feature sequence");
  const Tensor pooled = scaled_dot_attention(tape, params.query(tape, tropes),
                                             params.key(tape, feats), params.value(tape, feats),
                                             1, 1);
  return params.out(tape, pooled);
}

Tensor trope_attention_weights(const Tensor& tropes, const Tensor& feats,
                               const StreamParams& params) {
  Tape tape = Tape::inference();
  return attention_weights(params.query(tape, tropes), params.key(tape, feats), 1, 1);
}

Tensor word_stream(Tape& tape, const FeatureDoc& doc, const Tensor& tropes,
                   const StreamParams& params, std::size_t max_tokens) {
  if (doc.word_feats.rows == 0)
    throw EmptyDocumentError("doc " + doc.doc_id + " has no tokens");
  return attend(tape, tropes, doc.word_feats.head_rows(std::min(max_tokens, doc.word_feats.rows)),
                params);
}

Tensor encode_sentences(Tape& tape, const Matrix& sentences, const LstmCell& encoder) {
  const std::size_t d = encoder.hidden_dim();
  const Tensor inputs = sentences.to_tensor();
  LstmState state{Tensor::zeros({1, d}), Tensor::zeros({1, d})};
  std::vector<Tensor> states;
  states.reserve(sentences.rows);
  for (std::size_t s = 0; s < sentences.rows; ++s) {
    state = encoder(tape, state, slice_rows(tape, inputs, s, s + 1));
    states.push_back(state.hidden);
  }
  return concat(tape, states, 0);
}

Tensor sentence_stream(Tape& tape, const FeatureDoc& doc, const Tensor& tropes,
                       const StreamParams& params) {
  if (doc.sent_feats.rows == 0)
    throw EmptyDocumentError("doc " + doc.doc_id + " has no sentences");
  if (!params.encoder) throw ConfigError("sentence stream parameters lack an encoder");
  return attend(tape, tropes, encode_sentences(tape, doc.sent_feats, *params.encoder), params);
}

RelationOutput relation_stream(Tape& tape, const SynopsisGraph& graph, const Tensor& tropes,
                               const ReasonerParams& reasoner, const StreamParams& params,
                               ReasonerKind kind) {
  RelationOutput result;
  if (graph.node_count() == 0) {
    result.output = Tensor::zeros({tropes.rows(), params.out.out_dim()});
    return result;
  }
  const Tensor nodes = kind == ReasonerKind::kMultiStep ? run_msrrn(tape, graph, reasoner)
                                                        : run_rrn(tape, graph, reasoner);
  result.output = attend(tape, tropes, nodes, params);
  result.present = true;
  return result;
}

}  // namespace mulcom
