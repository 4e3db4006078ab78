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

#include "mulcom/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mulcom {

bool ModelConfig::uses(StreamKind kind) const {
  return std::find(streams.begin(), streams.end(), kind) != streams.end();
}

void ModelConfig::validate() const {
  if (trope_count == 0) throw ConfigError("model needs at least one trope");
  if (streams.empty()) throw ConfigError("model needs at least one enabled stream");
  if (!std::is_sorted(streams.begin(), streams.end()) ||
      std::adjacent_find(streams.begin(), streams.end()) != streams.end())
    throw ConfigError("streams must be unique and in canonical order");
  if (trope_dim == 0 || attention_dim == 0) throw ConfigError("zero model dimension");
  if (uses(StreamKind::kWord) && word_dim == 0) throw ConfigError("word stream needs word_dim");
  if ((uses(StreamKind::kSentence) || uses(StreamKind::kRelation)) && sentence_dim == 0)
    throw ConfigError("sentence and relation streams need sentence_dim");
  if (uses(StreamKind::kRelation)) {
    if (steps == 0) throw ConfigError("reasoner needs at least one step");
    if (heads == 0 || hidden_dim % heads)
      throw ConfigError("hidden_dim " + std::to_string(hidden_dim) + " not divisible by " +
                        std::to_string(heads) + " heads");
  }
  if (max_tokens == 0) throw ConfigError("max_tokens must be positive");
}

std::string ablation_name(const ModelConfig& config) {
  std::vector<std::string> parts;
  if (config.uses(StreamKind::kRelation))
    parts.push_back(config.reasoner == ReasonerKind::kMultiStep ? "MSRRN" : "RRN");
  if (config.uses(StreamKind::kWord)) parts.push_back("Word");
  if (config.uses(StreamKind::kSentence)) parts.push_back("Sent");
  std::string name;
  for (std::size_t i = 0; i < parts.size(); ++i) name += (i ? "+" : "") + parts[i];
  return name;
}

std::vector<StreamKind> parse_streams(std::string_view text) {
  std::vector<StreamKind> kinds;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::string lower;
    for (char c : token) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "rrn") lower = "relation";
    kinds.push_back(parse_stream(lower));
    token.clear();
  };
  for (char c : text) {
    if (c == '+' || c == ',' || c == ' ')
      flush();
    else
      token += c;
  }
  flush();
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
  if (kinds.empty()) throw ConfigError("empty stream list");
  return kinds;
}

MulComModel::MulComModel(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  Rng rng(seed);
  const std::size_t df = config_.trope_dim, da = config_.attention_dim;
  // Trope embedding uses the weight scheme with fan-in d_f.
  tropes = Tensor::zeros({config_.trope_count, df}, true);
  const double bound = 1.0 / std::sqrt(static_cast<double>(df));
  for (double& v : tropes.values()) v = rng.uniform(-bound, bound);
  if (config_.uses(StreamKind::kWord))
    streams[0].emplace(df, config_.word_dim, da, rng);
  if (config_.uses(StreamKind::kSentence))
    streams[1] = StreamParams::recurrent(df, config_.sentence_dim, da, rng);
  if (config_.uses(StreamKind::kRelation)) {
    streams[2].emplace(df, config_.hidden_dim, da, rng);
    reasoner.emplace(ReasonerConfig{config_.sentence_dim, config_.hidden_dim, config_.steps,
                                    config_.heads},
                     rng);
  }
  stream_projector = Mlp(df, df, config_.streams.size(), rng);
  predictor = Mlp(2 * df, df, 1, rng);
}

const StreamParams& MulComModel::stream(StreamKind kind) const {
  const auto& s = streams[static_cast<std::size_t>(kind)];
  if (!s) throw UsageError("stream " + std::string(stream_name(kind)) + " is not enabled");
  return *s;
}

ParameterSet MulComModel::parameters() const {
  ParameterSet params;
  params.add("trope_embedding", tropes);
  for (StreamKind kind : config_.streams)
    stream(kind).collect(params, "stream." + std::string(stream_name(kind)));
  if (reasoner) reasoner->collect(params, "reasoner");
  stream_projector.collect(params, "stream_attention");
  predictor.collect(params, "predictor");
  return params;
}

Tensor stream_attention(Tape& tape, const Tensor& tropes, const Mlp& projector) {
  return softmax(tape, projector(tape, tropes), 1);
}

Tensor organize(Tape& tape, const std::vector<Tensor>& stream_outputs, const Tensor& attention) {
  if (attention.rank() != 2 || attention.dim(1) != stream_outputs.size())
    throw UsageError("organize: attention " + shape_string(attention.shape()) + " for " +
                     std::to_string(stream_outputs.size()) + " stream outputs");
  Tensor total;
  for (std::size_t s = 0; s < stream_outputs.size(); ++s) {
    const Tensor term =
        scale_rows(tape, stream_outputs[s], slice_cols(tape, attention, s, s + 1));
    total = total.defined() ? add(tape, total, term) : term;
  }
  return total;
}

Tensor predict_logits(Tape& tape, const Tensor& organized, const Tensor& tropes,
                      const Mlp& predictor) {
  const Tensor logits = predictor(tape, concat(tape, {organized, tropes}, 1));
  return reshape(tape, logits, {logits.dim(0)});
}

std::vector<Tensor> stream_outputs(Tape& tape, const MulComModel& model, const FeatureDoc& doc,
                                   const SynopsisGraph& graph) {
  const ModelConfig& config = model.config();
  std::vector<Tensor> outputs;
  for (StreamKind kind : config.streams) {
    const StreamParams& params = model.stream(kind);
    switch (kind) {
      case StreamKind::kWord:
        outputs.push_back(word_stream(tape, doc, model.tropes, params, config.max_tokens));
        break;
      case StreamKind::kSentence:
        outputs.push_back(sentence_stream(tape, doc, model.tropes, params));
        break;
      case StreamKind::kRelation:
        outputs.push_back(
            relation_stream(tape, graph, model.tropes, *model.reasoner, params, config.reasoner)
                .output);
        break;
    }
  }
  return outputs;
}

Tensor forward_logits(Tape& tape, const MulComModel& model, const FeatureDoc& doc,
                      const SynopsisGraph& graph) {
  const std::vector<Tensor> outputs = stream_outputs(tape, model, doc, graph);
  const Tensor attention = stream_attention(tape, model.tropes, model.stream_projector);
  return predict_logits(tape, organize(tape, outputs, attention), model.tropes, model.predictor);
}

std::vector<double> forward(const MulComModel& model, const FeatureDoc& doc) {
  Tape tape = Tape::inference();
  const Tensor scores = sigmoid(tape, forward_logits(tape, model, doc, build_graph(doc)));
  return {scores.values().begin(), scores.values().end()};
}

}  // namespace mulcom
