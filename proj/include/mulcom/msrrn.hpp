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
#include <vector>

#include "mulcom/graph.hpp"
#include "mulcom/nn.hpp"

namespace mulcom {

struct ReasonerConfig {
  std::size_t feature_dim = 0;  // encoder dim of node and edge features
  std::size_t hidden_dim = 64;
  std::size_t steps = 3;
  std::size_t heads = 4;
};

// Parameters shared by every reasoning step.
struct ReasonerParams {
  Linear node_in;                   // x_i -> hidden
  Linear edge_in;                   // e_ij -> hidden
  Mlp message;                      // concat(e_ij, h_i, h_j) -> hidden
  LstmCell update;                  // input concat(x_i, m_i)
  MultiHeadAttention step_attention;  // over each node's step trajectory
  std::size_t steps = 1;

  ReasonerParams() = default;
  ReasonerParams(const ReasonerConfig& config, Rng& rng);
  std::size_t hidden_dim() const { return update.hidden_dim(); }
  void collect(ParameterSet& params, const std::string& prefix) const;
};

// Graph tensors for one forward pass. Directed message slots: every
// undirected edge (i, j), i != j, yields j -> i and i -> j; a self-loop yields
// one slot.
struct GraphInputs {
  std::size_t nodes = 0;
  Tensor node_proj;  // [n x hidden]
  Tensor edge_proj;  // [edges x hidden], undefined without edges
  std::vector<std::size_t> receiver;
  std::vector<std::size_t> sender;
  std::vector<std::size_t> edge_of;
};

GraphInputs prepare_graph(Tape& tape, const SynopsisGraph& graph, const ReasonerParams& params);

// M[i] = sum over neighbors j of MLP(concat(e_ij, h_i, h_j)); isolated nodes
// receive zero rows.
Tensor message_pass(Tape& tape, const GraphInputs& graph, const Tensor& hidden,
                    const ReasonerParams& params);

// One reasoning step: messages, then an LSTM update per node with input
// concat(x_i, m_i).
LstmState reason_step(Tape& tape, const GraphInputs& graph, const LstmState& state,
                      const ReasonerParams& params);

// Hidden states after each of the `steps` reasoning steps, H^1 .. H^T,
// starting from zero hidden and cell state.
std::vector<Tensor> run_steps(Tape& tape, const GraphInputs& graph, const ReasonerParams& params);

// Multi-step reasoner: self-attention over each node's trajectory
// (H^1_i .. H^T_i), then the attended sequence summed over steps. [n x hidden]
Tensor run_msrrn(Tape& tape, const SynopsisGraph& graph, const ReasonerParams& params);

// Last-step baseline: H^T. [n x hidden]
Tensor run_rrn(Tape& tape, const SynopsisGraph& graph, const ReasonerParams& params);

}  // namespace mulcom
