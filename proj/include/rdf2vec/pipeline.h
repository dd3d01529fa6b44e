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

// End-to-end RDF2vec runs: load edges, extract walks, train, and write
// artifacts.
//
//   rdf2vec::PipelineConfig config;            // library defaults
//   auto data = rdf2vec::LoadData({{"kg.nt"}});
//   auto fit = rdf2vec::FitTransform(data.graph, std::nullopt, config);
//   rdf2vec::SaveArtifacts(fit, data.graph.vocabulary, config, "out/");

#ifndef RDF2VEC_PIPELINE_H_
#define RDF2VEC_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdf2vec/common.h"
#include "rdf2vec/graph.h"
#include "rdf2vec/ingest.h"
#include "rdf2vec/w2v.h"
#include "rdf2vec/walks.h"

namespace rdf2vec {

// Environment variable overriding the training memory budget, in bytes
// with an optional K/M/G suffix (powers of 1024).
inline constexpr const char* kMemoryBudgetEnv = "RDF2VEC_MEMORY_BUDGET";

struct PipelineConfig {
  WalkStrategy walk_strategy = WalkStrategy::kRandom;
  int walk_depth = 5;
  int walk_number = 100;
  ModelKind embedding_model = ModelKind::kSkipGram;
  int epochs = 5;
  std::optional<std::size_t> batch_size;
  int vector_size = 100;
  int window_size = 5;
  int min_count = 10;
  double learning_rate = 0.01;
  int negative_samples = 5;
  std::uint64_t random_state = 42;
  bool reproducible = false;
  int workers = 1;
  bool generate_artifact = false;
  Projection projection = Projection::kFull;
  bool duplicate_free = false;

  bool use_sparse = true;
  int sync_interval_ms = 500;
  // 0 selects the environment override or physical memory.
  std::uint64_t memory_budget_bytes = 0;
  double memory_cap_fraction = 0.9;

  // Throws ConfigError naming the first invalid field.
  void Validate() const;

  TrainConfig ToTrainConfig() const;

  // Seeds derived from random_state for each stochastic stage.
  std::uint64_t walk_seed() const { return random_state; }
  std::uint64_t train_seed() const;

  nlohmann::json ToJson() const;
  // Unknown keys and bad values raise ConfigError naming the field.
  static PipelineConfig FromJson(const nlohmann::json& j);
};

// Parses "1048576", "512M", "4G", ...; throws ConfigError.
std::uint64_t ParseByteSize(std::string_view text);

// memory_budget_bytes if set, else the environment override, else 0.
std::uint64_t ResolveMemoryBudget(const PipelineConfig& config);

struct InputSpec {
  std::filesystem::path path;
  // Guessed from the extension when absent.
  std::optional<InputFormat> format;
  bool has_header = false;
};

struct LoadOptions {
  bool include_literals = false;
  bool strict = false;
  int workers = 1;
};

struct LoadedData {
  EncodedGraph graph;
  std::size_t triples = 0;
  std::vector<ParseError> skipped;
};

// Parses every input (concurrently, one file per task) and tokenizes the
// triples in input-file order. Parquet and ORC are rejected with
// DataError("format unsupported: ...").
LoadedData LoadData(const std::vector<InputSpec>& inputs,
                    const LoadOptions& options = {});

// Resolves lexical keys to tokens; throws DataError for unknown keys.
std::vector<Token> ResolveVertices(const Vocabulary& vocabulary,
                                   const std::vector<std::string>& lexicals);

struct StageTimings {
  double walks_seconds = 0.0;
  double train_seconds = 0.0;
  double total_seconds = 0.0;
};

struct FitResult {
  // Input matrix, one row per vocabulary token.
  Matrix embeddings;
  std::vector<std::uint8_t> trained_mask;
  std::vector<std::string> lexicals;
  std::vector<std::uint64_t> frequency;
  std::vector<double> epoch_loss;
  std::size_t walk_count = 0;
  std::size_t corpus_tokens = 0;
  std::size_t batch_size = 0;
  std::size_t instances = 0;
  StageTimings timings;
  std::vector<std::string> events;
};

// Walk stage on its own: random or BFS walks from `roots`, then projection.
WalkCorpus ExtractWalks(const Graph& graph, std::span<const Token> roots,
                        const PipelineConfig& config,
                        std::vector<std::string>* events = nullptr);

// Training stage on its own.
TrainResult TrainEmbeddings(const WalkCorpus& corpus, std::size_t vocab_size,
                            const PipelineConfig& config,
                            const RunControl* control = nullptr);

// walk_vertices == nullopt roots walks at every entity (subject or object).
// Errors carry the failing stage ("graph", "walks", "train").
FitResult FitTransform(const EncodedGraph& data,
                       const std::optional<std::vector<Token>>& walk_vertices,
                       const PipelineConfig& config,
                       const RunControl* control = nullptr);

struct RunArtifacts {
  std::filesystem::path embeddings;
  std::filesystem::path vocabulary;
  std::filesystem::path loss_trace;
  std::filesystem::path manifest;

  bool empty() const { return manifest.empty(); }
};

// Optional description of where the edges came from, recorded in the
// manifest so the run can be replayed.
struct DataSource {
  std::vector<InputSpec> inputs;
  LoadOptions load;
};

// Writes embeddings.txt (word2vec text), vocab.tsv, loss.csv and
// manifest.json into out_dir. Returns empty artifacts and touches nothing
// when config.generate_artifact is false.
RunArtifacts SaveArtifacts(const FitResult& fit, const Vocabulary& vocabulary,
                           const PipelineConfig& config,
                           const std::filesystem::path& out_dir,
                           const std::optional<DataSource>& source =
                               std::nullopt);

nlohmann::json BuildManifest(const FitResult& fit,
                             const PipelineConfig& config,
                             const std::optional<DataSource>& source);

struct Replay {
  PipelineConfig config;
  DataSource source;
};

// Reads the config and data source back from a manifest.
Replay ReadManifest(const std::filesystem::path& manifest_path);

}  // namespace rdf2vec

#endif  // RDF2VEC_PIPELINE_H_
