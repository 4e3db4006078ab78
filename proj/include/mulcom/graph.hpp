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
#include <string>
#include <vector>

#include "mulcom/document.hpp"

namespace mulcom {

struct GraphNode {
  std::string entity_id;
  std::vector<double> feature;  // sum of the sentences mentioning the entity
};

// Undirected edge, i <= j; i == j is a self-loop.
struct GraphEdge {
  std::size_t i = 0;
  std::size_t j = 0;
  std::vector<double> feature;  // sum of the sentences that induced the edge
};

struct SynopsisGraph {
  std::size_t feature_dim = 0;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;  // sorted by (i, j), unique
  // Neighbor list per node, ascending, including i itself iff it has a
  // self-loop.
  std::vector<std::vector<std::size_t>> neighbors;

  std::size_t node_count() const { return nodes.size(); }
  Matrix node_features() const;
  Matrix edge_features() const;
};

// Entity-relation graph of a synopsis. Sentence features are summed in
// ascending sentence order. A pair of entities is connected iff some sentence
// mentions both; an entity gets a self-loop iff some sentence mentions it and
// no other entity.
SynopsisGraph build_graph(const FeatureDoc& doc);

struct GraphStats {
  std::size_t node_count = 0;
  // Non-self-loop edges over n(n-1)/2; 0 when n < 2.
  double density = 0.0;
};

GraphStats graph_stats(const SynopsisGraph& graph);

}  // namespace mulcom
