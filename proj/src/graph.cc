// Copyright 2026 The rdf2vec-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rdf2vec/graph.h"

#include <algorithm>
#include <cstdint>
#include <deque>

#include <fmt/format.h>

namespace rdf2vec {

namespace {

void CheckVertex(const Graph& g, Token v) {
  if (v < 0 || static_cast<std::size_t>(v) >= g.vertex_count()) {
    throw DataError(fmt::format("vertex {} out of range [0, {})", v,
                                g.vertex_count()));
  }
}

}  // namespace

std::span<const Token> Graph::OutTargets(Token v) const {
  CheckVertex(*this, v);
  return std::span<const Token>(targets_).subspan(begin(v), OutDegree(v));
}

std::span<const Token> Graph::OutPredicates(Token v) const {
  CheckVertex(*this, v);
  return std::span<const Token>(predicates_).subspan(begin(v), OutDegree(v));
}

std::size_t Graph::OutDegree(Token v) const {
  CheckVertex(*this, v);
  return end(v) - begin(v);
}

bool Graph::HasEdge(Token v, Token p, Token w) const {
  if (v < 0 || static_cast<std::size_t>(v) >= vertex_count()) return false;
  for (std::size_t e = begin(v); e < end(v); ++e) {
    if (targets_[e] == w && predicates_[e] == p) return true;
  }
  return false;
}

Graph BuildGraph(std::span<const EncodedEdge> edges, std::size_t vertex_count,
                 std::optional<std::size_t> token_bound) {
  auto in_range = [&](Token t) {
    return t >= 0 && static_cast<std::size_t>(t) < vertex_count;
  };
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const EncodedEdge& e = edges[i];
    bool pred_ok = e.predicate >= 0 &&
                   (!token_bound || static_cast<std::size_t>(e.predicate) <
                                        *token_bound);
    if (!in_range(e.source) || !in_range(e.target) || !pred_ok) {
      throw DataError(fmt::format("edge {} ({}, {}, {}) has a token out of "
                                  "range",
                                  i, e.source, e.predicate, e.target));
    }
  }

  Graph g;
  g.row_offsets_.assign(vertex_count + 1, 0);
  for (const EncodedEdge& e : edges) ++g.row_offsets_[e.source + 1];
  for (std::size_t v = 0; v < vertex_count; ++v) {
    g.row_offsets_[v + 1] += g.row_offsets_[v];
  }
  g.targets_.resize(edges.size());
  g.predicates_.resize(edges.size());
  std::vector<std::size_t> cursor(g.row_offsets_.begin(),
                                  g.row_offsets_.end() - 1);
  for (const EncodedEdge& e : edges) {
    std::size_t slot = cursor[e.source]++;
    g.targets_[slot] = e.target;
    g.predicates_[slot] = e.predicate;
  }
  return g;
}

std::vector<Neighbor> OutNeighbors(const Graph& graph, Token v) {
  auto targets = graph.OutTargets(v);
  auto preds = graph.OutPredicates(v);
  std::vector<Neighbor> out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    out[i] = {preds[i], targets[i]};
  }
  return out;
}

std::vector<double> UndirectedBetweenness(const Graph& graph) {
  const std::size_t n = graph.vertex_count();
  std::vector<std::vector<Token>> adj(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t e = graph.begin(v); e < graph.end(v); ++e) {
      Token w = graph.target(e);
      if (static_cast<std::size_t>(w) == v) continue;
      adj[v].push_back(w);
      adj[w].push_back(static_cast<Token>(v));
    }
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  std::vector<double> centrality(n, 0.0);
  std::vector<std::vector<Token>> preds(n);
  std::vector<double> sigma(n);
  std::vector<std::int64_t> dist(n);
  std::vector<double> delta(n);
  std::vector<Token> order;
  order.reserve(n);
  std::deque<Token> queue;

  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t v = 0; v < n; ++v) {
      preds[v].clear();
      sigma[v] = 0.0;
      dist[v] = -1;
      delta[v] = 0.0;
    }
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    queue.push_back(static_cast<Token>(s));
    while (!queue.empty()) {
      Token v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (Token w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Token w = *it;
      for (Token v : preds[w]) {
        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
      if (static_cast<std::size_t>(w) != s) centrality[w] += delta[w];
    }
  }
  // Every unordered pair was visited from both endpoints.
  for (double& c : centrality) c /= 2.0;
  return centrality;
}

GraphStats ComputeStats(const Graph& graph, bool with_betweenness,
                        const VertexMask* counted) {
  if (counted != nullptr && counted->size() != graph.vertex_count()) {
    throw DataError("vertex mask does not match graph size");
  }
  GraphStats stats;
  stats.vertices =
      counted == nullptr
          ? graph.vertex_count()
          : static_cast<std::size_t>(
                std::count_if(counted->begin(), counted->end(),
                              [](std::uint8_t m) { return m != 0; }));
  stats.edges = graph.edge_count();
  const double v = static_cast<double>(stats.vertices);
  const double e = static_cast<double>(stats.edges);
  stats.avg_degree = stats.vertices == 0 ? 0.0 : 2.0 * e / v;
  stats.density = stats.vertices < 2 ? 0.0 : e / (v * (v - 1.0));

  if (with_betweenness) {
    if (graph.vertex_count() > kBetweennessVertexGuard) {
      throw ResourceError(fmt::format(
          "betweenness guard exceeded: {} vertices > {}", graph.vertex_count(),
          kBetweennessVertexGuard));
    }
    std::vector<double> bc = UndirectedBetweenness(graph);
    double total = 0.0;
    for (std::size_t i = 0; i < bc.size(); ++i) {
      if (counted == nullptr || (*counted)[i]) total += bc[i];
    }
    stats.avg_betweenness = stats.vertices == 0 ? 0.0 : total / v;
  }
  return stats;
}

}  // namespace rdf2vec
