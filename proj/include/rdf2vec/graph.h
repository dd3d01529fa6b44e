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

#ifndef RDF2VEC_GRAPH_H_
#define RDF2VEC_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rdf2vec/common.h"
#include "rdf2vec/ingest.h"

namespace rdf2vec {

// Directed labeled multigraph in compressed sparse row layout. Out-edges of
// vertex v occupy [row_offsets[v], row_offsets[v + 1]) in both column
// arrays. Immutable once built, so concurrent readers need no locking.
class Graph {
 public:
  Graph() : row_offsets_{0} {}

  std::size_t vertex_count() const { return row_offsets_.size() - 1; }
  std::size_t edge_count() const { return targets_.size(); }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const Token> col_targets() const { return targets_; }
  std::span<const Token> col_predicates() const { return predicates_; }

  // Checked accessors; throw DataError for v out of range.
  std::span<const Token> OutTargets(Token v) const;
  std::span<const Token> OutPredicates(Token v) const;
  std::size_t OutDegree(Token v) const;

  // Unchecked accessors for the walk kernels.
  std::size_t begin(Token v) const { return row_offsets_[v]; }
  std::size_t end(Token v) const { return row_offsets_[v + 1]; }
  Token target(std::size_t e) const { return targets_[e]; }
  Token predicate(std::size_t e) const { return predicates_[e]; }

  // True if some edge v --p--> w exists.
  bool HasEdge(Token v, Token p, Token w) const;

 private:
  friend Graph BuildGraph(std::span<const EncodedEdge>, std::size_t,
                          std::optional<std::size_t>);

  std::vector<std::size_t> row_offsets_;
  std::vector<Token> targets_;
  std::vector<Token> predicates_;
};

// Adjacency sorted by source, then input order (a stable counting sort).
// Source and target tokens must be < vertex_count; predicate tokens must be
// non-negative and, if given, < token_bound. Throws DataError otherwise.
Graph BuildGraph(std::span<const EncodedEdge> edges, std::size_t vertex_count,
                 std::optional<std::size_t> token_bound = std::nullopt);

struct Neighbor {
  Token predicate;
  Token target;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

std::vector<Neighbor> OutNeighbors(const Graph& graph, Token v);

struct GraphStats {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  // 2E / V.
  double avg_degree = 0.0;
  // E / (V (V - 1)); may exceed 1 for multigraphs.
  double density = 0.0;
  std::optional<double> avg_betweenness;
};

inline constexpr std::size_t kBetweennessVertexGuard = 10'000;

// Optional subset of vertices counted as graph vertices, e.g. to exclude
// predicate-only tokens from the vertex count. Edge counts are unaffected.
using VertexMask = std::vector<std::uint8_t>;

// Throws ResourceError("betweenness guard exceeded") when betweenness is
// requested on more than kBetweennessVertexGuard vertices.
GraphStats ComputeStats(const Graph& graph, bool with_betweenness,
                        const VertexMask* counted = nullptr);

// Unnormalized betweenness centrality (Brandes) over the undirected simple
// projection of `graph`: edge direction dropped, parallel edges and
// self-loops collapsed. Each unordered pair {s, t} is counted once.
std::vector<double> UndirectedBetweenness(const Graph& graph);

}  // namespace rdf2vec

#endif  // RDF2VEC_GRAPH_H_
