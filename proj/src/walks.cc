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

#include "rdf2vec/walks.h"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <random>
#include <unordered_set>

#include <fmt/format.h>

#include "rdf2vec/parallel.h"

namespace rdf2vec {

WalkStrategy ParseWalkStrategy(std::string_view name) {
  if (name == "random") return WalkStrategy::kRandom;
  if (name == "bfs") return WalkStrategy::kBfs;
  throw ConfigError(fmt::format("walk_strategy: unknown strategy '{}'", name));
}

std::string_view WalkStrategyName(WalkStrategy s) {
  return s == WalkStrategy::kRandom ? "random" : "bfs";
}

Projection ParseProjection(std::string_view name) {
  if (name == "full") return Projection::kFull;
  if (name == "entity") return Projection::kEntity;
  if (name == "property") return Projection::kProperty;
  throw ConfigError(fmt::format("projection: unknown projection '{}'", name));
}

std::string_view ProjectionName(Projection p) {
  switch (p) {
    case Projection::kFull: return "full";
    case Projection::kEntity: return "entity";
    case Projection::kProperty: return "property";
  }
  return "?";
}

void WalkCorpus::Append(std::uint64_t walk_id, std::span<const Token> tokens) {
  tokens_.insert(tokens_.end(), tokens.begin(), tokens.end());
  offsets_.push_back(tokens_.size());
  walk_ids_.push_back(walk_id);
}

void WalkCorpus::Reserve(std::size_t walks, std::size_t tokens) {
  walk_ids_.reserve(walks);
  offsets_.reserve(walks + 1);
  tokens_.reserve(tokens);
}

Walk WalkCorpus::GetWalk(std::size_t i) const {
  auto t = walk(i);
  return Walk{walk_ids_[i], std::vector<Token>(t.begin(), t.end())};
}

namespace {

void CheckRoots(const Graph& graph, std::span<const Token> roots) {
  for (Token r : roots) {
    if (r < 0 || static_cast<std::size_t>(r) >= graph.vertex_count()) {
      throw DataError(fmt::format("walk root {} is not a graph vertex", r));
    }
  }
}

struct SpanHash {
  std::size_t operator()(const std::vector<Token>& v) const {
    // FNV-1a over the token bytes.
    std::uint64_t h = 1469598103934665603ull;
    for (Token t : v) {
      h ^= static_cast<std::uint32_t>(t);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Fills `buffer` (length 2 * depth + 1, PAD-initialized) with one walk.
void FillRandomWalk(const Graph& graph, Token root, int depth,
                    std::mt19937_64& rng, std::span<Token> buffer) {
  std::fill(buffer.begin(), buffer.end(), kPad);
  Token current = root;
  buffer[0] = current;
  for (int hop = 0; hop < depth; ++hop) {
    const std::size_t lo = graph.begin(current);
    const std::size_t hi = graph.end(current);
    if (lo == hi) break;
    std::uniform_int_distribution<std::size_t> pick(0, hi - lo - 1);
    const std::size_t e = lo + pick(rng);
    buffer[2 * hop + 1] = graph.predicate(e);
    current = graph.target(e);
    buffer[2 * hop + 2] = current;
  }
}

}  // namespace

WalkCorpus RandomWalks(const Graph& graph, std::span<const Token> roots,
                       const RandomWalkOptions& options) {
  if (options.depth < 1) throw ConfigError("walk_depth must be >= 1");
  if (options.walks_per_vertex < 1) {
    throw ConfigError("walk_number must be >= 1");
  }
  if (roots.empty()) throw ConfigError("no walk roots");
  if (options.shard_size == 0) throw ConfigError("shard_size must be >= 1");
  CheckRoots(graph, roots);

  const std::size_t per_root = static_cast<std::size_t>(options.walks_per_vertex);
  const std::size_t total = roots.size() * per_root;
  const std::size_t shard_count =
      (total + options.shard_size - 1) / options.shard_size;
  const std::size_t width = 2 * static_cast<std::size_t>(options.depth) + 1;

  struct Shard {
    std::vector<Token> tokens;
    std::vector<std::uint32_t> lengths;
  };
  std::vector<Shard> shards(shard_count);

  ParallelFor(shard_count, options.workers, [&](std::size_t s) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                      static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(s),
                      static_cast<std::uint32_t>(s >> 32)};
    std::mt19937_64 rng(seq);
    const std::size_t begin = s * options.shard_size;
    const std::size_t end = std::min(total, begin + options.shard_size);
    Shard& out = shards[s];
    out.tokens.reserve((end - begin) * width);
    out.lengths.reserve(end - begin);
    std::vector<Token> buffer(width);
    for (std::size_t item = begin; item < end; ++item) {
      FillRandomWalk(graph, roots[item / per_root], options.depth, rng,
                     buffer);
      // Strip the padding of early-terminated walks.
      std::uint32_t len = 0;
      for (Token t : buffer) {
        if (t == kPad) continue;
        out.tokens.push_back(t);
        ++len;
      }
      out.lengths.push_back(len);
    }
  });

  WalkCorpus corpus;
  corpus.strategy = WalkStrategy::kRandom;
  std::size_t token_total = 0;
  for (const Shard& s : shards) token_total += s.tokens.size();
  corpus.Reserve(total, token_total);

  // A sequence starts with its root, so a global set is a per-root set.
  std::unordered_set<std::vector<Token>, SpanHash> seen;
  std::uint64_t next_id = 0;
  for (const Shard& s : shards) {
    std::size_t pos = 0;
    for (std::uint32_t len : s.lengths) {
      std::span<const Token> w(s.tokens.data() + pos, len);
      pos += len;
      if (options.duplicate_free &&
          !seen.emplace(w.begin(), w.end()).second) {
        continue;
      }
      corpus.Append(next_id++, w);
    }
  }
  return corpus;
}

namespace {

struct BfsScratch {
  explicit BfsScratch(std::size_t n) : pred_edge(n, kUnseen), parent(n, kPad),
                                       has_child(n, 0) {}

  static constexpr std::int64_t kUnseen = -2;
  static constexpr std::int64_t kRoot = -1;

  std::vector<std::int64_t> pred_edge;
  std::vector<Token> parent;
  std::vector<std::uint8_t> has_child;
  std::vector<Token> discovered;

  void Reset() {
    for (Token v : discovered) {
      pred_edge[v] = kUnseen;
      parent[v] = kPad;
      has_child[v] = 0;
    }
    discovered.clear();
  }
};

struct RootPaths {
  std::vector<std::vector<Token>> walks;
  std::vector<std::vector<std::pair<Token, Token>>> rows;
};

RootPaths BfsFromRoot(const Graph& graph, Token root, int depth,
                      BfsScratch& s) {
  s.Reset();
  s.pred_edge[root] = BfsScratch::kRoot;
  s.discovered.push_back(root);
  std::vector<Token> frontier{root};
  std::vector<Token> next;
  for (int level = 0; level < depth && !frontier.empty(); ++level) {
    next.clear();
    for (Token v : frontier) {
      for (std::size_t e = graph.begin(v); e < graph.end(v); ++e) {
        Token w = graph.target(e);
        if (s.pred_edge[w] != BfsScratch::kUnseen) continue;
        s.pred_edge[w] = static_cast<std::int64_t>(e);
        s.parent[w] = v;
        s.has_child[v] = 1;
        s.discovered.push_back(w);
        next.push_back(w);
      }
    }
    frontier.swap(next);
  }

  // Seed one path per leaf, then join every open path with the predecessor
  // of its current head until all heads reach the root.
  struct OpenPath {
    std::size_t walk;
    Token head;
  };
  RootPaths out;
  std::vector<OpenPath> open;
  for (Token v : s.discovered) {
    if (s.has_child[v]) continue;
    open.push_back({out.walks.size(), v});
    out.walks.push_back({v});
    out.rows.emplace_back();
  }
  while (!open.empty()) {
    std::size_t kept = 0;
    for (OpenPath& p : open) {
      if (p.head == root) continue;
      const std::size_t e = static_cast<std::size_t>(s.pred_edge[p.head]);
      const Token parent = s.parent[p.head];
      out.rows[p.walk].emplace_back(parent, p.head);
      out.walks[p.walk].push_back(graph.predicate(e));
      out.walks[p.walk].push_back(parent);
      p.head = parent;
      open[kept++] = p;
    }
    open.resize(kept);
  }
  for (auto& w : out.walks) std::reverse(w.begin(), w.end());
  return out;
}

}  // namespace

BfsWalkResult BfsWalks(const Graph& graph, std::span<const Token> roots,
                       int depth, int workers) {
  if (depth < 1) throw ConfigError("walk_depth must be >= 1");
  CheckRoots(graph, roots);

  // Roots are processed in contiguous blocks so each task reuses scratch.
  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (roots.size() + kBlock - 1) / kBlock;
  std::vector<std::vector<RootPaths>> results(blocks);
  ParallelFor(blocks, workers, [&](std::size_t b) {
    BfsScratch scratch(graph.vertex_count());
    const std::size_t end = std::min(roots.size(), (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      results[b].push_back(BfsFromRoot(graph, roots[i], depth, scratch));
    }
  });

  BfsWalkResult out;
  out.corpus.strategy = WalkStrategy::kBfs;
  std::uint64_t walk_id = 0;
  for (const auto& block : results) {
    for (const RootPaths& rp : block) {
      for (std::size_t w = 0; w < rp.walks.size(); ++w, ++walk_id) {
        out.corpus.Append(walk_id, rp.walks[w]);
        for (auto [src, dst] : rp.rows[w]) {
          out.paths.push_back({src, dst, walk_id});
        }
      }
    }
  }
  return out;
}

Walk ProjectEntity(const Walk& walk) {
  Walk out{walk.walk_id, {}};
  out.tokens.reserve(walk.tokens.size() / 2 + 1);
  for (std::size_t i = 0; i < walk.tokens.size(); i += 2) {
    out.tokens.push_back(walk.tokens[i]);
  }
  return out;
}

Walk ProjectProperty(const Walk& walk) {
  Walk out{walk.walk_id, {}};
  if (walk.tokens.empty()) return out;
  out.tokens.reserve(walk.tokens.size() / 2 + 1);
  out.tokens.push_back(walk.tokens[0]);
  for (std::size_t i = 1; i < walk.tokens.size(); i += 2) {
    out.tokens.push_back(walk.tokens[i]);
  }
  return out;
}

WalkCorpus Project(const WalkCorpus& corpus, Projection projection) {
  if (projection == Projection::kFull) return corpus;
  WalkCorpus out;
  out.strategy = corpus.strategy;
  out.projection = projection;
  out.Reserve(corpus.size(), corpus.total_tokens() / 2 + corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Walk w = corpus.GetWalk(i);
    w = projection == Projection::kEntity ? ProjectEntity(w)
                                          : ProjectProperty(w);
    out.Append(w.walk_id, w.tokens);
  }
  return out;
}

namespace {

void PutU32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{static_cast<char>(v & 0xFF),
                        static_cast<char>((v >> 8) & 0xFF),
                        static_cast<char>((v >> 16) & 0xFF),
                        static_cast<char>((v >> 24) & 0xFF)};
  out.write(b.data(), 4);
}

bool GetU32(std::istream& in, std::uint32_t& v) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (in.gcount() == 0) return false;
  if (in.gcount() != 4) throw DataError("truncated corpus file");
  v = static_cast<std::uint32_t>(b[0]) |
      (static_cast<std::uint32_t>(b[1]) << 8) |
      (static_cast<std::uint32_t>(b[2]) << 16) |
      (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

}  // namespace

void WriteCorpusBinary(std::ostream& out, const WalkCorpus& corpus) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto w = corpus.walk(i);
    PutU32(out, static_cast<std::uint32_t>(w.size()));
    for (Token t : w) PutU32(out, static_cast<std::uint32_t>(t));
  }
}

WalkCorpus ReadCorpusBinary(std::istream& in) {
  WalkCorpus corpus;
  std::vector<Token> buffer;
  std::uint32_t len = 0;
  std::uint64_t id = 0;
  while (GetU32(in, len)) {
    buffer.resize(len);
    for (std::uint32_t i = 0; i < len; ++i) {
      std::uint32_t t = 0;
      if (!GetU32(in, t)) throw DataError("truncated corpus file");
      if (t > static_cast<std::uint32_t>(INT32_MAX)) {
        throw DataError("corpus token out of range");
      }
      buffer[i] = static_cast<Token>(t);
    }
    corpus.Append(id++, buffer);
  }
  return corpus;
}

void WriteCorpusText(std::ostream& out, const WalkCorpus& corpus,
                     const Vocabulary& vocabulary) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto w = corpus.walk(i);
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (j > 0) out << ' ';
      out << vocabulary.Lexical(w[j]);
    }
    out << '\n';
  }
}

}  // namespace rdf2vec
