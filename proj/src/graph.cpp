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

#include "mulcom/graph.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "mulcom/log.hpp"

namespace mulcom {

Matrix SynopsisGraph::node_features() const {
  Matrix m{nodes.size(), feature_dim, {}};
  m.values.reserve(nodes.size() * feature_dim);
  for (const GraphNode& n : nodes) m.values.insert(m.values.end(), n.feature.begin(), n.feature.end());
  return m;
}

Matrix SynopsisGraph::edge_features() const {
  Matrix m{edges.size(), feature_dim, {}};
  m.values.reserve(edges.size() * feature_dim);
  for (const GraphEdge& e : edges) m.values.insert(m.values.end(), e.feature.begin(), e.feature.end());
  return m;
}

SynopsisGraph build_graph(const FeatureDoc& doc) {
  const Matrix& sents = doc.sent_feats;
  SynopsisGraph graph;
  graph.feature_dim = sents.cols;

  // Distinct entities per sentence, ascending entity index.
  std::vector<std::vector<std::size_t>> mentioned(sents.rows);
  for (std::size_t e = 0; e < doc.entities.size(); ++e) {
    GraphNode node{doc.entities[e].id, std::vector<double>(sents.cols, 0.0)};
    std::vector<std::size_t> ordinals = doc.entities[e].sentences;
    std::sort(ordinals.begin(), ordinals.end());
    ordinals.erase(std::unique(ordinals.begin(), ordinals.end()), ordinals.end());
    if (ordinals.empty()) log_warning("doc " + doc.doc_id + ": entity " + node.entity_id +
                                      " has no mentions; kept as an isolated node");
    for (std::size_t s : ordinals) {
      auto row = sents.row(s);
      for (std::size_t d = 0; d < sents.cols; ++d) node.feature[d] += row[d];
      mentioned[s].push_back(e);
    }
    graph.nodes.push_back(std::move(node));
  }

  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> edges;
  auto accumulate = [&](std::size_t i, std::size_t j, std::size_t s) {
    auto [it, inserted] = edges.try_emplace({i, j}, sents.cols, 0.0);
    auto row = sents.row(s);
    for (std::size_t d = 0; d < sents.cols; ++d) it->second[d] += row[d];
  };
  for (std::size_t s = 0; s < sents.rows; ++s) {
    const auto& ents = mentioned[s];
    if (ents.size() == 1) {
      accumulate(ents[0], ents[0], s);
      continue;
    }
    for (std::size_t a = 0; a < ents.size(); ++a)
      for (std::size_t b = a + 1; b < ents.size(); ++b) accumulate(ents[a], ents[b], s);
  }

  graph.neighbors.assign(graph.nodes.size(), {});
  for (auto& [key, feature] : edges) {
    graph.edges.push_back({key.first, key.second, std::move(feature)});
    graph.neighbors[key.first].push_back(key.second);
    if (key.first != key.second) graph.neighbors[key.second].push_back(key.first);
  }
  for (auto& list : graph.neighbors) std::sort(list.begin(), list.end());
  return graph;
}

GraphStats graph_stats(const SynopsisGraph& graph) {
  GraphStats stats;
  stats.node_count = graph.nodes.size();
  if (stats.node_count < 2) return stats;
  const auto links = std::count_if(graph.edges.begin(), graph.edges.end(),
                                   [](const GraphEdge& e) { return e.i != e.j; });
  const double pairs = 0.5 * static_cast<double>(stats.node_count * (stats.node_count - 1));
  stats.density = static_cast<double>(links) / pairs;
  return stats;
}

}  // namespace mulcom
