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

#include "mulcom/msrrn.hpp"

namespace mulcom {

ReasonerParams::ReasonerParams(const ReasonerConfig& config, Rng& rng)
    : node_in(config.feature_dim, config.hidden_dim, rng),
      edge_in(config.feature_dim, config.hidden_dim, rng),
      message(3 * config.hidden_dim, config.hidden_dim, config.hidden_dim, rng),
      update(2 * config.hidden_dim, config.hidden_dim, rng),
      step_attention(config.hidden_dim, config.heads, rng),
      steps(config.steps) {
  if (config.steps == 0) throw ConfigError("reasoner needs at least one step");
}

void ReasonerParams::collect(ParameterSet& params, const std::string& prefix) const {
  node_in.collect(params, prefix + ".node_in");
  edge_in.collect(params, prefix + ".edge_in");
  message.collect(params, prefix + ".message");
  update.collect(params, prefix + ".update");
  step_attention.collect(params, prefix + ".step_attention");
}

GraphInputs prepare_graph(Tape& tape, const SynopsisGraph& graph, const ReasonerParams& params) {
  GraphInputs in;
  in.nodes = graph.node_count();
  in.node_proj = params.node_in(tape, graph.node_features().to_tensor());
  if (!graph.edges.empty()) in.edge_proj = params.edge_in(tape, graph.edge_features().to_tensor());
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const GraphEdge& edge = graph.edges[e];
    in.receiver.push_back(edge.i);
    in.sender.push_back(edge.j);
    in.edge_of.push_back(e);
    if (edge.i != edge.j) {
      in.receiver.push_back(edge.j);
      in.sender.push_back(edge.i);
      in.edge_of.push_back(e);
    }
  }
  return in;
}

Tensor message_pass(Tape& tape, const GraphInputs& graph, const Tensor& hidden,
                    const ReasonerParams& params) {
  if (hidden.rank() != 2 || hidden.dim(0) != graph.nodes)
    throw DimensionError("message_pass: hidden " + shape_string(hidden.shape()) + " for " +
                         std::to_string(graph.nodes) + " nodes");
  if (graph.receiver.empty()) return Tensor::zeros({graph.nodes, hidden.dim(1)});
  const Tensor slot_input = concat(tape,
                                   {gather_rows(tape, graph.edge_proj, graph.edge_of),
                                    gather_rows(tape, hidden, graph.receiver),
                                    gather_rows(tape, hidden, graph.sender)},
                                   1);
  return scatter_add_rows(tape, params.message(tape, slot_input), graph.receiver, graph.nodes);
}

LstmState reason_step(Tape& tape, const GraphInputs& graph, const LstmState& state,
                      const ReasonerParams& params) {
  const Tensor messages = message_pass(tape, graph, state.hidden, params);
  return params.update(tape, state, concat(tape, {graph.node_proj, messages}, 1));
}

std::vector<Tensor> run_steps(Tape& tape, const GraphInputs& graph, const ReasonerParams& params) {
  const std::size_t d = params.hidden_dim();
  LstmState state{Tensor::zeros({graph.nodes, d}), Tensor::zeros({graph.nodes, d})};
  std::vector<Tensor> trace;
  trace.reserve(params.steps);
  for (std::size_t t = 0; t < params.steps; ++t) {
    state = reason_step(tape, graph, state, params);
    trace.push_back(state.hidden);
  }
  return trace;
}

Tensor run_msrrn(Tape& tape, const SynopsisGraph& graph, const ReasonerParams& params) {
  const std::size_t n = graph.node_count(), steps = params.steps;
  if (n == 0) return Tensor::zeros({0, params.hidden_dim()});
  const std::vector<Tensor> trace = run_steps(tape, prepare_graph(tape, graph, params), params);

  // Stack step-major, then reorder so node i owns rows [i*T, (i+1)*T).
  std::vector<std::size_t> node_major(n * steps), owner(n * steps);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < steps; ++t) {
      node_major[i * steps + t] = t * n + i;
      owner[i * steps + t] = i;
    }
  const Tensor omega = gather_rows(tape, concat(tape, trace, 0), node_major);
  const Tensor attended = params.step_attention(tape, omega, omega, omega, n);
  return scatter_add_rows(tape, attended, owner, n);
}

Tensor run_rrn(Tape& tape, const SynopsisGraph& graph, const ReasonerParams& params) {
  if (graph.node_count() == 0) return Tensor::zeros({0, params.hidden_dim()});
  return run_steps(tape, prepare_graph(tape, graph, params), params).back();
}

}  // namespace mulcom
