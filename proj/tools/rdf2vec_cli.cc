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

// rdf2vec command line: ingest, stats, walks, train, run, bench.
//
// Exit codes: 0 ok, 1 usage or configuration, 2 data, 3 resource.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "rdf2vec/benchgen.h"
#include "rdf2vec/graph.h"
#include "rdf2vec/ingest.h"
#include "rdf2vec/pipeline.h"
#include "rdf2vec/w2v.h"
#include "rdf2vec/walks.h"

namespace {

namespace fs = std::filesystem;
using namespace rdf2vec;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kResource = 3 };

struct InputArgs {
  std::vector<std::string> paths;
  std::string format;
  bool has_header = false;
  bool include_literals = false;
  bool strict = false;
};

void AddInputOptions(CLI::App* app, InputArgs& in) {
  app->add_option("-i,--input", in.paths, "Input file (repeatable)")
      ->required();
  app->add_option("--format", in.format,
                  "nt, csv, tsv or txt (default: from the extension)");
  app->add_flag("--has-header", in.has_header,
                "First row of csv/tsv/txt inputs is a header");
  app->add_flag("--include-literals", in.include_literals,
                "Tokenize literal objects instead of dropping them");
  app->add_flag("--strict", in.strict, "Abort on the first malformed line");
}

// String-typed mirror of PipelineConfig so enum and "auto" values get
// validated by the library, not by the argument parser.
struct ConfigArgs {
  std::string config_file;
  std::string walk_strategy;
  std::optional<int> walk_depth;
  std::optional<int> walk_number;
  std::string embedding_model;
  std::optional<int> epochs;
  std::string batch_size;
  std::optional<int> vector_size;
  std::optional<int> window_size;
  std::optional<int> min_count;
  std::optional<double> learning_rate;
  std::optional<int> negative_samples;
  std::optional<std::uint64_t> random_state;
  bool reproducible = false;
  std::optional<int> workers;
  bool generate_artifact = false;
  std::string projection;
  bool duplicate_free = false;
  bool dense = false;
  std::optional<int> sync_interval_ms;
  std::string memory_budget;
  std::optional<double> memory_cap_fraction;
};

void AddWalkOptions(CLI::App* app, ConfigArgs& c) {
  app->add_option("--walk-strategy,--strategy", c.walk_strategy,
                  "random or bfs");
  app->add_option("--walk-depth,--depth", c.walk_depth, "Hops per walk");
  app->add_option("--walk-number,--walks-per-vertex", c.walk_number,
                  "Random walks per root");
  app->add_flag("--duplicate-free", c.duplicate_free,
                "Drop repeated walks of the same root");
  app->add_option("--projection", c.projection, "full, entity or property");
  app->add_option("--random-state,--seed", c.random_state, "Seed");
  app->add_option("--workers", c.workers, "Worker threads");
  app->add_flag("--reproducible", c.reproducible,
                "Deterministic multi-worker schedule");
}

void AddTrainOptions(CLI::App* app, ConfigArgs& c) {
  app->add_option("--embedding-model,--model", c.embedding_model,
                  "skipgram or cbow");
  app->add_option("--epochs", c.epochs);
  app->add_option("--batch-size", c.batch_size, "Integer or auto");
  app->add_option("--vector-size,--dim", c.vector_size);
  app->add_option("--window-size", c.window_size);
  app->add_option("--min-count", c.min_count);
  app->add_option("--learning-rate,--lr", c.learning_rate);
  app->add_option("--negative-samples", c.negative_samples);
  app->add_flag("--dense", c.dense, "Dense Adam moments instead of sparse");
  app->add_option("--sync-interval-ms", c.sync_interval_ms);
  app->add_option("--memory-budget", c.memory_budget,
                  fmt::format("Bytes with optional K/M/G suffix (env {})",
                              kMemoryBudgetEnv));
  app->add_option("--memory-cap-fraction", c.memory_cap_fraction);
}

void AddConfigFile(CLI::App* app, ConfigArgs& c) {
  app->add_option("--config", c.config_file,
                  "JSON file with PipelineConfig fields; flags override it");
}

PipelineConfig ResolveConfig(const ConfigArgs& a) {
  PipelineConfig c;
  if (!a.config_file.empty()) {
    std::ifstream f(a.config_file);
    if (!f) throw DataError(fmt::format("cannot open '{}'", a.config_file));
    nlohmann::json j;
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("{}: {}", a.config_file, e.what()));
    }
    c = PipelineConfig::FromJson(j);
  }
  if (!a.walk_strategy.empty()) c.walk_strategy = ParseWalkStrategy(a.walk_strategy);
  if (a.walk_depth) c.walk_depth = *a.walk_depth;
  if (a.walk_number) c.walk_number = *a.walk_number;
  if (!a.embedding_model.empty()) {
    c.embedding_model = ParseModelKind(a.embedding_model);
  }
  if (a.epochs) c.epochs = *a.epochs;
  if (a.batch_size == "auto") {
    c.batch_size.reset();
  } else if (!a.batch_size.empty()) {
    try {
      const long long b = std::stoll(a.batch_size);
      if (b < 1) throw ConfigError("batch_size: must be >= 1 or auto");
      c.batch_size = static_cast<std::size_t>(b);
    } catch (const std::logic_error&) {
      throw ConfigError(
          fmt::format("batch_size: expected an integer or auto, got '{}'",
                      a.batch_size));
    }
  }
  if (a.vector_size) c.vector_size = *a.vector_size;
  if (a.window_size) c.window_size = *a.window_size;
  if (a.min_count) c.min_count = *a.min_count;
  if (a.learning_rate) c.learning_rate = *a.learning_rate;
  if (a.negative_samples) c.negative_samples = *a.negative_samples;
  if (a.random_state) c.random_state = *a.random_state;
  if (a.reproducible) c.reproducible = true;
  if (a.workers) c.workers = *a.workers;
  if (a.generate_artifact) c.generate_artifact = true;
  if (!a.projection.empty()) c.projection = ParseProjection(a.projection);
  if (a.duplicate_free) c.duplicate_free = true;
  if (a.dense) c.use_sparse = false;
  if (a.sync_interval_ms) c.sync_interval_ms = *a.sync_interval_ms;
  if (!a.memory_budget.empty()) {
    c.memory_budget_bytes = ParseByteSize(a.memory_budget);
  }
  if (a.memory_cap_fraction) c.memory_cap_fraction = *a.memory_cap_fraction;
  c.Validate();
  return c;
}

DataSource MakeSource(const InputArgs& in, int workers) {
  DataSource src;
  std::optional<InputFormat> format;
  if (!in.format.empty()) format = ParseInputFormat(in.format);
  for (const std::string& p : in.paths) {
    src.inputs.push_back(InputSpec{p, format, in.has_header});
  }
  src.load.include_literals = in.include_literals;
  src.load.strict = in.strict;
  src.load.workers = workers;
  return src;
}

LoadedData Load(const DataSource& src) {
  LoadedData data = LoadData(src.inputs, src.load);
  spdlog::info("loaded {} triples: {} tokens, {} edges, {} literal triples "
               "dropped, {} lines skipped",
               data.triples, data.graph.vocabulary.size(),
               data.graph.edges.size(), data.graph.dropped_literals,
               data.skipped.size());
  return data;
}

std::ofstream OpenOut(const fs::path& path, bool binary = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

std::vector<Token> Roots(const Vocabulary& vocab,
                         const std::vector<std::string>& roots) {
  return roots.empty() ? vocab.EntityTokens() : ResolveVertices(vocab, roots);
}

int CmdIngest(const InputArgs& in, int workers, const std::string& vocab_out,
              const std::string& edges_out) {
  LoadedData data = Load(MakeSource(in, workers));
  const EncodedGraph& g = data.graph;
  fmt::print("triples\t{}\nskipped\t{}\ndropped_literals\t{}\nedges\t{}\n"
             "tokens\t{}\nentities\t{}\npredicates\t{}\n",
             data.triples, data.skipped.size(), g.dropped_literals,
             g.edges.size(), g.vocabulary.size(),
             g.vocabulary.entity_count(), g.vocabulary.predicate_count());
  if (!vocab_out.empty()) {
    auto out = OpenOut(vocab_out);
    g.vocabulary.WriteTsv(out);
  }
  if (!edges_out.empty()) {
    auto out = OpenOut(edges_out);
    for (const EncodedEdge& e : g.edges) {
      out << e.source << '\t' << e.predicate << '\t' << e.target << '\n';
    }
  }
  return kOk;
}

int CmdStats(const InputArgs& in, int workers, bool betweenness) {
  LoadedData data = Load(MakeSource(in, workers));
  const Vocabulary& vocab = data.graph.vocabulary;
  Graph graph = BuildGraph(data.graph.edges, vocab.size());
  VertexMask mask(vocab.size());
  for (std::size_t t = 0; t < vocab.size(); ++t) {
    mask[t] = vocab.IsEntity(static_cast<Token>(t)) ? 1 : 0;
  }
  GraphStats s = ComputeStats(graph, betweenness, &mask);
  fmt::print("{:<16} {:>14}\n", "vertices", s.vertices);
  fmt::print("{:<16} {:>14}\n", "edges", s.edges);
  fmt::print("{:<16} {:>14.4f}\n", "avg_degree", s.avg_degree);
  if (s.avg_betweenness) {
    fmt::print("{:<16} {:>14.4f}\n", "avg_betweenness", *s.avg_betweenness);
  } else {
    fmt::print("{:<16} {:>14}\n", "avg_betweenness", "-");
  }
  fmt::print("{:<16} {:>14.4f}\n", "density", s.density);
  return kOk;
}

int CmdWalks(const InputArgs& in, const ConfigArgs& args,
             const std::vector<std::string>& roots, const std::string& out,
             const std::string& corpus_format, const std::string& vocab_out) {
  PipelineConfig config = ResolveConfig(args);
  LoadedData data = Load(MakeSource(in, config.workers));
  const Vocabulary& vocab = data.graph.vocabulary;
  Graph graph = BuildGraph(data.graph.edges, vocab.size());
  WalkCorpus corpus =
      ExtractWalks(graph, Roots(vocab, roots), config, nullptr);
  spdlog::info("{} walks, {} tokens", corpus.size(), corpus.total_tokens());
  if (corpus_format == "binary") {
    auto f = OpenOut(out, true);
    WriteCorpusBinary(f, corpus);
  } else if (corpus_format == "text") {
    auto f = OpenOut(out);
    WriteCorpusText(f, corpus, vocab);
  } else {
    throw ConfigError(fmt::format(
        "corpus_format: expected binary or text, got '{}'", corpus_format));
  }
  if (!vocab_out.empty()) {
    auto f = OpenOut(vocab_out);
    vocab.WriteTsv(f);
  }
  fmt::print("walks\t{}\ntokens\t{}\n", corpus.size(), corpus.total_tokens());
  return kOk;
}

void WriteEmbeddingOutputs(const fs::path& out_dir, const Matrix& vectors,
                           std::span<const std::string> lexicals,
                           std::span<const double> losses) {
  fs::create_directories(out_dir);
  {
    auto f = OpenOut(out_dir / "embeddings.txt");
    WriteWord2VecText(f, vectors, lexicals);
  }
  {
    auto f = OpenOut(out_dir / "loss.csv");
    WriteLossCsv(f, losses);
  }
}

int CmdTrain(const ConfigArgs& args, const std::string& corpus_path,
             const std::string& vocab_path, const std::string& out_dir) {
  PipelineConfig config = ResolveConfig(args);
  std::ifstream vf(vocab_path);
  if (!vf) throw DataError(fmt::format("cannot open '{}'", vocab_path));
  Vocabulary vocab = Vocabulary::ReadTsv(vf);
  std::ifstream cf(corpus_path, std::ios::binary);
  if (!cf) throw DataError(fmt::format("cannot open '{}'", corpus_path));
  WalkCorpus corpus = ReadCorpusBinary(cf);
  for (Token t : corpus.tokens()) {
    if (t < 0 || static_cast<std::size_t>(t) >= vocab.size()) {
      throw DataError(fmt::format("corpus token {} outside the vocabulary", t));
    }
  }
  TrainResult r = TrainEmbeddings(corpus, vocab.size(), config);
  for (const std::string& e : r.events) spdlog::info("{}", e);
  WriteEmbeddingOutputs(out_dir, r.model.input, vocab.lexicals(), r.epoch_loss);
  for (std::size_t e = 0; e < r.epoch_loss.size(); ++e) {
    fmt::print("epoch {}\tloss {:.6f}\n", e + 1, r.epoch_loss[e]);
  }
  return kOk;
}

int CmdRun(InputArgs in, const ConfigArgs& args,
           const std::vector<std::string>& roots, const std::string& out_dir,
           const std::string& replay) {
  PipelineConfig config;
  DataSource src;
  if (!replay.empty()) {
    Replay r = ReadManifest(replay);
    config = r.config;
    src = r.source;
    if (!in.paths.empty()) src = MakeSource(in, config.workers);
  } else {
    if (in.paths.empty()) throw ConfigError("input: required");
    config = ResolveConfig(args);
    src = MakeSource(in, config.workers);
  }
  if (!out_dir.empty()) config.generate_artifact = true;
  LoadedData data = Load(src);
  const Vocabulary& vocab = data.graph.vocabulary;
  std::optional<std::vector<Token>> walk_vertices;
  if (!roots.empty()) walk_vertices = ResolveVertices(vocab, roots);
  FitResult fit = FitTransform(data.graph, walk_vertices, config);
  for (const std::string& e : fit.events) spdlog::info("{}", e);
  fmt::print("walks\t{}\ncorpus_tokens\t{}\nbatch_size\t{}\ninstances\t{}\n",
             fit.walk_count, fit.corpus_tokens, fit.batch_size, fit.instances);
  for (std::size_t e = 0; e < fit.epoch_loss.size(); ++e) {
    fmt::print("epoch {}\tloss {:.6f}\n", e + 1, fit.epoch_loss[e]);
  }
  fmt::print("walks_s\t{:.3f}\ntrain_s\t{:.3f}\ntotal_s\t{:.3f}\n",
             fit.timings.walks_seconds, fit.timings.train_seconds,
             fit.timings.total_seconds);
  RunArtifacts art = SaveArtifacts(fit, vocab, config,
                                   out_dir.empty() ? "." : out_dir, src);
  if (!art.empty()) spdlog::info("artifacts in {}", out_dir);
  return kOk;
}

int CmdBench(const std::string& suite_path, std::optional<int> repeats,
             std::optional<double> timeout, const std::string& csv_path) {
  BenchSuite suite = ReadBenchSuite(suite_path);
  if (repeats) suite.repeats = *repeats;
  if (timeout) suite.timeout_seconds = *timeout;
  BenchReport report = RunBenchmark(suite.graphs, suite.configs, suite.repeats,
                                    suite.timeout_seconds);
  WriteBenchTable(std::cout, report);
  if (!csv_path.empty()) {
    auto f = OpenOut(csv_path);
    WriteBenchCsv(f, report);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RDF2vec embeddings on the CPU"};
  app.require_subcommand(1);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.add_flag("-q,--quiet", quiet, "Warnings and errors only");

  InputArgs in;
  ConfigArgs cfg;
  std::vector<std::string> roots;
  int load_workers = 1;

  auto* ingest = app.add_subcommand("ingest", "Parse inputs and build the vocabulary");
  AddInputOptions(ingest, in);
  ingest->add_option("--workers", load_workers, "Files parsed concurrently");
  std::string vocab_out, edges_out;
  ingest->add_option("--vocab-out", vocab_out, "Write the vocabulary TSV");
  ingest->add_option("--edges-out", edges_out, "Write token edges as TSV");

  auto* stats = app.add_subcommand("stats", "Graph statistics table");
  AddInputOptions(stats, in);
  stats->add_option("--workers", load_workers, "Files parsed concurrently");
  bool betweenness = false;
  stats->add_flag("--betweenness", betweenness,
                  "Average betweenness (at most 10000 vertices)");

  auto* walks = app.add_subcommand("walks", "Extract a walk corpus");
  AddInputOptions(walks, in);
  AddConfigFile(walks, cfg);
  AddWalkOptions(walks, cfg);
  std::string corpus_out, corpus_format = "binary", walks_vocab_out;
  walks->add_option("--root", roots, "Walk root lexical key (repeatable)");
  walks->add_option("-o,--out", corpus_out, "Corpus file")->required();
  walks->add_option("--corpus-format", corpus_format, "binary or text");
  walks->add_option("--vocab-out", walks_vocab_out,
                    "Vocabulary TSV for a later train step");

  auto* train = app.add_subcommand("train", "Train on an exported corpus");
  AddConfigFile(train, cfg);
  AddTrainOptions(train, cfg);
  train->add_option("--random-state,--seed", cfg.random_state, "Seed");
  train->add_option("--workers", cfg.workers, "Worker threads");
  train->add_flag("--reproducible", cfg.reproducible,
                  "Deterministic multi-worker schedule");
  std::string corpus_in, vocab_in, train_out;
  train->add_option("--corpus", corpus_in, "Binary corpus")->required();
  train->add_option("--vocab", vocab_in, "Vocabulary TSV")->required();
  train->add_option("-o,--out-dir", train_out, "Output directory")->required();

  auto* run = app.add_subcommand("run", "Load, walk, train, save");
  run->add_option("-i,--input", in.paths, "Input file (repeatable)");
  run->add_option("--format", in.format, "nt, csv, tsv or txt");
  run->add_flag("--has-header", in.has_header);
  run->add_flag("--include-literals", in.include_literals);
  run->add_flag("--strict", in.strict);
  AddConfigFile(run, cfg);
  AddWalkOptions(run, cfg);
  AddTrainOptions(run, cfg);
  run->add_flag("--generate-artifact", cfg.generate_artifact,
                "Write artifacts to the current directory");
  run->add_option("--root", roots, "Walk root lexical key (repeatable)");
  std::string run_out, replay;
  run->add_option("-o,--out-dir", run_out,
                  "Artifact directory (implies --generate-artifact)");
  run->add_option("--replay", replay, "Rerun from a manifest.json");

  auto* bench = app.add_subcommand("bench", "Benchmark suite over generated graphs");
  std::string suite_path, bench_csv;
  std::optional<int> bench_repeats;
  std::optional<double> bench_timeout;
  bench->add_option("suite", suite_path, "Suite file")->required();
  bench->add_option("--repeats", bench_repeats, "Override the suite repeats");
  bench->add_option("--timeout-s", bench_timeout, "Override the suite timeout");
  bench->add_option("--csv", bench_csv, "Write the report as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  spdlog::set_default_logger(spdlog::stderr_color_mt("rdf2vec"));
  spdlog::set_level(verbose ? spdlog::level::debug
                    : quiet ? spdlog::level::warn
                            : spdlog::level::info);

  try {
    if (*ingest) return CmdIngest(in, load_workers, vocab_out, edges_out);
    if (*stats) return CmdStats(in, load_workers, betweenness);
    if (*walks) {
      return CmdWalks(in, cfg, roots, corpus_out, corpus_format,
                      walks_vocab_out);
    }
    if (*train) return CmdTrain(cfg, corpus_in, vocab_in, train_out);
    if (*run) return CmdRun(in, cfg, roots, run_out, replay);
    if (*bench) {
      return CmdBench(suite_path, bench_repeats, bench_timeout, bench_csv);
    }
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const ResourceError& e) {
    spdlog::error("{}", e.what());
    return kResource;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kData;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kData;
  }
  return kUsage;
}
