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

// Walk extraction over a Graph.
//
// A full walk interleaves entity and predicate tokens, starting and ending
// with an entity: [v0, p1, v1, p2, v2, ...]. Depth counts hops, so a walk of
// depth h holds at most 2h + 1 tokens.

#ifndef RDF2VEC_WALKS_H_
#define RDF2VEC_WALKS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "rdf2vec/common.h"
#include "rdf2vec/graph.h"
#include "rdf2vec/ingest.h"

namespace rdf2vec {

enum class WalkStrategy { kRandom, kBfs };
enum class Projection { kFull, kEntity, kProperty };

WalkStrategy ParseWalkStrategy(std::string_view name);
std::string_view WalkStrategyName(WalkStrategy s);
Projection ParseProjection(std::string_view name);
std::string_view ProjectionName(Projection p);

struct Walk {
  std::uint64_t walk_id = 0;
  std::vector<Token> tokens;

  friend bool operator==(const Walk&, const Walk&) = default;
};

// Flat storage for many walks: tokens of walk i live in
// tokens()[offsets()[i] .. offsets()[i + 1]).
class WalkCorpus {
 public:
  WalkCorpus() : offsets_{0} {}

  void Append(std::uint64_t walk_id, std::span<const Token> tokens);
  void Reserve(std::size_t walks, std::size_t tokens);

  std::size_t size() const { return walk_ids_.size(); }
  bool empty() const { return walk_ids_.empty(); }
  std::size_t total_tokens() const { return tokens_.size(); }

  std::span<const Token> walk(std::size_t i) const {
    return std::span<const Token>(tokens_).subspan(
        offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  std::uint64_t walk_id(std::size_t i) const { return walk_ids_[i]; }
  Walk GetWalk(std::size_t i) const;

  std::span<const Token> tokens() const { return tokens_; }
  std::span<const std::size_t> offsets() const { return offsets_; }

  WalkStrategy strategy = WalkStrategy::kRandom;
  Projection projection = Projection::kFull;

  friend bool operator==(const WalkCorpus& a, const WalkCorpus& b) {
    return a.tokens_ == b.tokens_ && a.offsets_ == b.offsets_ &&
           a.walk_ids_ == b.walk_ids_;
  }

 private:
  std::vector<Token> tokens_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint64_t> walk_ids_;
};

// One edge of a materialized BFS leaf-to-root path.
struct PathRow {
  Token source;
  Token target;
  std::uint64_t walk_id;

  friend bool operator==(const PathRow&, const PathRow&) = default;
};

// Rows grouped by walk_id (ascending), leaf-to-root within a walk.
using PathTable = std::vector<PathRow>;

struct RandomWalkOptions {
  int depth = 5;
  int walks_per_vertex = 100;
  std::uint64_t seed = 42;
  bool duplicate_free = false;
  int workers = 1;
  // Replicated start entries per RNG stream. Fixed independently of
  // `workers`, which keeps the corpus identical across worker counts.
  std::size_t shard_size = 4096;
};

// Replicates each root walks_per_vertex times (root-major) and walks every
// entry independently, choosing among out-edges uniformly at each hop. A
// vertex without out-edges ends the walk early. With duplicate_free,
// repeated token sequences from the same root keep only their first
// occurrence. Walk ids are assigned sequentially in output order.
WalkCorpus RandomWalks(const Graph& graph, std::span<const Token> roots,
                       const RandomWalkOptions& options);

struct BfsWalkResult {
  WalkCorpus corpus;
  PathTable paths;
};

// Depth-bounded BFS from every root. Each discovered vertex keeps the first
// edge that reached it (frontier in discovery order, out-edges in adjacency
// order). Every leaf of the resulting tree yields one root-to-leaf walk;
// leaves are emitted in discovery order and walk ids run across roots.
BfsWalkResult BfsWalks(const Graph& graph, std::span<const Token> roots,
                       int depth, int workers = 1);

// Entity projection: predicates removed.
Walk ProjectEntity(const Walk& walk);
// Property projection: start entity followed by every predicate.
Walk ProjectProperty(const Walk& walk);
WalkCorpus Project(const WalkCorpus& corpus, Projection projection);

// Binary corpus: per walk a u32 little-endian length followed by that many
// u32 little-endian tokens. Walk ids are implicit (0, 1, ...).
void WriteCorpusBinary(std::ostream& out, const WalkCorpus& corpus);
WalkCorpus ReadCorpusBinary(std::istream& in);

// One walk per line, tokens rendered as lexical keys separated by spaces.
void WriteCorpusText(std::ostream& out, const WalkCorpus& corpus,
                     const Vocabulary& vocabulary);

}  // namespace rdf2vec

#endif  // RDF2VEC_WALKS_H_
