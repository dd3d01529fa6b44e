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

// Synthetic labeled graphs (Barabasi-Albert, Erdos-Renyi, uniform
// attachment) and a sequential wall-clock benchmark harness around
// FitTransform.

#ifndef RDF2VEC_BENCHGEN_H_
#define RDF2VEC_BENCHGEN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rdf2vec/ingest.h"
#include "rdf2vec/pipeline.h"

namespace rdf2vec {

enum class GeneratorModel { kBarabasi, kErdosRenyi, kUniformAttachment };

GeneratorModel ParseGeneratorModel(std::string_view name);
std::string_view GeneratorModelName(GeneratorModel model);

struct GeneratorSpec {
  GeneratorModel model = GeneratorModel::kErdosRenyi;
  std::size_t n = 100;
  // Erdos-Renyi edge probability.
  double p = 0.4;
  // Edges per new vertex; 0 picks the model default (BA 1, UA 10).
  int m = 0;
  // Uniform attachment only: true makes every new vertex cite m distinct
  // older vertices; false (default) adds m edges between uniformly chosen
  // vertices of the grown graph, allowing loops and parallel edges.
  bool citation = false;
  int predicate_set_size = 10;
  std::uint64_t seed = 1;
  std::string name;

  int EffectiveM() const;
  // Throws ConfigError naming the field.
  void Validate() const;
  std::string Label() const;
};

struct GeneratedGraph {
  std::size_t vertex_count = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

// Preferential attachment: vertex i (i >= 1) adds min(m, i) edges i -> j to
// distinct older vertices j drawn with probability proportional to
// in_degree(j) + 1. With m = 1 this is exactly n - 1 edges.
GeneratedGraph GenBarabasi(std::size_t n, int m, std::uint64_t seed);

// Every ordered pair (u, v), u != v, independently with probability p.
GeneratedGraph GenErdosRenyi(std::size_t n, double p, std::uint64_t seed);

// Growing uniform random graph; see GeneratorSpec::citation. Vertices left
// without any edge are dropped and the rest relabeled in id order.
GeneratedGraph GenUniformAttachment(std::size_t n, int m, std::uint64_t seed,
                                    bool citation = false);

GeneratedGraph Generate(const GeneratorSpec& spec);

struct LabeledEdge {
  std::uint32_t source;
  std::uint32_t predicate;
  std::uint32_t target;
};

// Each edge gets an i.i.d. uniform predicate index in [0, predicate_set_size).
std::vector<LabeledEdge> AssignPredicates(
    std::span<const std::pair<std::uint32_t, std::uint32_t>> edges,
    int predicate_set_size, std::uint64_t seed);

// Vertices become "v<i>", predicates "P<j>".
std::vector<Triple> ToTriples(std::span<const LabeledEdge> edges);

// Generate + AssignPredicates + tokenization, ready for FitTransform.
EncodedGraph GenerateKnowledgeGraph(const GeneratorSpec& spec);

struct BenchRun {
  std::uint64_t graph_seed = 0;
  std::uint64_t random_state = 0;
  bool timed_out = false;
  double walks_seconds = 0.0;
  double train_seconds = 0.0;
  double total_seconds = 0.0;
};

struct MeanStd {
  double mean = 0.0;
  // Population standard deviation; 0 for a single run.
  double stddev = 0.0;
};

MeanStd Summarize(std::span<const double> values);

struct BenchCell {
  GeneratorSpec graph;
  PipelineConfig config;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::vector<BenchRun> runs;
  // Any repeat exceeded the timeout.
  bool timed_out = false;
  // Over completed runs only.
  MeanStd walks;
  MeanStd train;
  MeanStd total;
};

struct BenchReport {
  int repeats = 1;
  double timeout_seconds = 0.0;
  std::vector<BenchCell> cells;
};

// Called after every completed run with its result.
using BenchObserver = std::function<void(const BenchCell& cell,
                                         std::size_t repeat,
                                         const FitResult& fit)>;

// Runs every (graph, config) cell `repeats` times, strictly sequentially.
// Repeat r uses graph seed spec.seed + r and random_state
// config.random_state + r. A run that passes timeout_seconds is recorded as
// timed out instead of raising.
BenchReport RunBenchmark(std::span<const GeneratorSpec> graphs,
                         std::span<const PipelineConfig> configs, int repeats,
                         double timeout_seconds,
                         const BenchObserver& observer = nullptr);

void WriteBenchCsv(std::ostream& out, const BenchReport& report);
void WriteBenchTable(std::ostream& out, const BenchReport& report);

// Key-value suite file:
//
//   # comment
//   [graph er100]
//   model = erdos_renyi
//   n = 100
//   p = 0.4
//
//   [config default]
//   walk_depth = 8
//   walk_number = 500
//
//   [run]
//   repeats = 10
//   timeout_s = 14400
//
// Graph keys mirror GeneratorSpec, config keys mirror PipelineConfig.
struct BenchSuite {
  std::vector<GeneratorSpec> graphs;
  std::vector<PipelineConfig> configs;
  std::vector<std::string> config_names;
  int repeats = 1;
  double timeout_seconds = 4.0 * 3600.0;
};

BenchSuite ParseBenchSuite(std::istream& in);
BenchSuite ReadBenchSuite(const std::filesystem::path& path);

}  // namespace rdf2vec

#endif  // RDF2VEC_BENCHGEN_H_
