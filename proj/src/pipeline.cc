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

#include "rdf2vec/pipeline.h"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "rdf2vec/parallel.h"

namespace rdf2vec {

namespace {

template <typename Fn>
auto RunStage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  }
}

double SecondsSince(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t)
      .count();
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

void PipelineConfig::Validate() const {
  auto require = [](bool ok, std::string_view field, std::string_view rule) {
    if (!ok) throw ConfigError(fmt::format("{}: must be {}", field, rule));
  };
  require(walk_depth >= 1, "walk_depth", ">= 1");
  require(walk_number >= 1, "walk_number", ">= 1");
  require(workers >= 1, "workers", ">= 1");
  ToTrainConfig().Validate();
}

TrainConfig PipelineConfig::ToTrainConfig() const {
  TrainConfig t;
  t.model = embedding_model;
  t.dim = vector_size;
  t.epochs = epochs;
  t.window_size = window_size;
  t.negative_samples = negative_samples;
  t.learning_rate = learning_rate;
  t.min_count = min_count;
  t.batch_size = batch_size;
  t.workers = workers;
  t.sync_interval_ms = sync_interval_ms;
  t.reproducible = reproducible;
  t.memory_budget_bytes = ResolveMemoryBudget(*this);
  t.memory_cap_fraction = memory_cap_fraction;
  t.use_sparse = use_sparse;
  return t;
}

std::uint64_t PipelineConfig::train_seed() const {
  return SplitMix64(random_state);
}

nlohmann::json PipelineConfig::ToJson() const {
  nlohmann::json j;
  j["walk_strategy"] = WalkStrategyName(walk_strategy);
  j["walk_depth"] = walk_depth;
  j["walk_number"] = walk_number;
  j["embedding_model"] = ModelKindName(embedding_model);
  j["epochs"] = epochs;
  j["batch_size"] = batch_size ? nlohmann::json(*batch_size) : nlohmann::json(nullptr);
  j["vector_size"] = vector_size;
  j["window_size"] = window_size;
  j["min_count"] = min_count;
  j["learning_rate"] = learning_rate;
  j["negative_samples"] = negative_samples;
  j["random_state"] = random_state;
  j["reproducible"] = reproducible;
  j["workers"] = workers;
  j["generate_artifact"] = generate_artifact;
  j["projection"] = ProjectionName(projection);
  j["duplicate_free"] = duplicate_free;
  j["use_sparse"] = use_sparse;
  j["sync_interval_ms"] = sync_interval_ms;
  j["memory_budget_bytes"] = memory_budget_bytes;
  j["memory_cap_fraction"] = memory_cap_fraction;
  return j;
}

PipelineConfig PipelineConfig::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  PipelineConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "walk_strategy") {
        c.walk_strategy = ParseWalkStrategy(value.get<std::string>());
      } else if (key == "walk_depth") {
        c.walk_depth = value.get<int>();
      } else if (key == "walk_number") {
        c.walk_number = value.get<int>();
      } else if (key == "embedding_model") {
        c.embedding_model = ParseModelKind(value.get<std::string>());
      } else if (key == "epochs") {
        c.epochs = value.get<int>();
      } else if (key == "batch_size") {
        if (value.is_null()) {
          c.batch_size.reset();
        } else {
          c.batch_size = value.get<std::size_t>();
        }
      } else if (key == "vector_size") {
        c.vector_size = value.get<int>();
      } else if (key == "window_size") {
        c.window_size = value.get<int>();
      } else if (key == "min_count") {
        c.min_count = value.get<int>();
      } else if (key == "learning_rate") {
        c.learning_rate = value.get<double>();
      } else if (key == "negative_samples") {
        c.negative_samples = value.get<int>();
      } else if (key == "random_state") {
        c.random_state = value.get<std::uint64_t>();
      } else if (key == "reproducible") {
        c.reproducible = value.get<bool>();
      } else if (key == "workers") {
        c.workers = value.get<int>();
      } else if (key == "generate_artifact") {
        c.generate_artifact = value.get<bool>();
      } else if (key == "projection") {
        c.projection = ParseProjection(value.get<std::string>());
      } else if (key == "duplicate_free") {
        c.duplicate_free = value.get<bool>();
      } else if (key == "use_sparse") {
        c.use_sparse = value.get<bool>();
      } else if (key == "sync_interval_ms") {
        c.sync_interval_ms = value.get<int>();
      } else if (key == "memory_budget_bytes") {
        c.memory_budget_bytes = value.get<std::uint64_t>();
      } else if (key == "memory_cap_fraction") {
        c.memory_cap_fraction = value.get<double>();
      } else {
        throw ConfigError(fmt::format("{}: unknown configuration key", key));
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("{}: {}", key, e.what()));
    }
  }
  return c;
}

std::uint64_t ParseByteSize(std::string_view text) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc() || ptr == text.data()) {
    throw ConfigError(fmt::format("bad byte size '{}'", text));
  }
  std::string_view suffix(ptr, text.data() + text.size() - ptr);
  std::uint64_t scale = 1;
  if (suffix.empty() || suffix == "B") {
    scale = 1;
  } else if (suffix == "K" || suffix == "KiB") {
    scale = 1ull << 10;
  } else if (suffix == "M" || suffix == "MiB") {
    scale = 1ull << 20;
  } else if (suffix == "G" || suffix == "GiB") {
    scale = 1ull << 30;
  } else {
    throw ConfigError(fmt::format("bad byte size suffix in '{}'", text));
  }
  return value * scale;
}

std::uint64_t ResolveMemoryBudget(const PipelineConfig& config) {
  if (config.memory_budget_bytes != 0) return config.memory_budget_bytes;
  if (const char* env = std::getenv(kMemoryBudgetEnv);
      env != nullptr && *env != '\0') {
    return ParseByteSize(env);
  }
  return 0;
}

LoadedData LoadData(const std::vector<InputSpec>& inputs,
                    const LoadOptions& options) {
  return RunStage("ingest", [&] {
    if (inputs.empty()) throw ConfigError("no input files");
    std::vector<InputFormat> formats;
    for (const InputSpec& in : inputs) {
      std::optional<InputFormat> f =
          in.format ? in.format : FormatFromExtension(in.path);
      if (!f) {
        throw ConfigError(fmt::format(
            "cannot infer input format of '{}'; pass --format",
            in.path.string()));
      }
      if (*f == InputFormat::kParquet || *f == InputFormat::kOrc) {
        throw DataError(fmt::format("format unsupported: {} ({})",
                                    InputFormatName(*f), in.path.string()));
      }
      formats.push_back(*f);
    }

    struct Parsed {
      std::vector<Triple> triples;
      ParseReport report;
    };
    std::vector<Parsed> parsed(inputs.size());
    ParallelFor(inputs.size(), options.workers, [&](std::size_t i) {
      std::ifstream file(inputs[i].path, std::ios::binary);
      if (!file) {
        throw DataError(
            fmt::format("cannot open '{}'", inputs[i].path.string()));
      }
      if (formats[i] == InputFormat::kNTriples) {
        parsed[i].triples = ParseNTriples(
            file, ParseOptions{.strict = options.strict}, &parsed[i].report);
      } else {
        EdgeTableOptions table{.format = formats[i],
                               .has_header = inputs[i].has_header,
                               .strict = options.strict};
        parsed[i].triples = ParseEdgeTable(file, table, &parsed[i].report);
      }
    });

    VocabularyBuilder builder(options.include_literals);
    LoadedData out;
    for (Parsed& p : parsed) {
      for (const Triple& t : p.triples) builder.Add(t);
      out.triples += p.triples.size();
      for (ParseError& e : p.report.skipped) {
        spdlog::warn("skipped malformed input: {}", e.what());
        out.skipped.push_back(std::move(e));
      }
    }
    out.graph = std::move(builder).Finish();
    return out;
  });
}

std::vector<Token> ResolveVertices(const Vocabulary& vocabulary,
                                   const std::vector<std::string>& lexicals) {
  std::vector<Token> out;
  out.reserve(lexicals.size());
  for (const std::string& lex : lexicals) {
    std::optional<Token> t = vocabulary.Find(lex);
    if (!t) throw DataError(fmt::format("walk vertex '{}' not in graph", lex));
    out.push_back(*t);
  }
  return out;
}

WalkCorpus ExtractWalks(const Graph& graph, std::span<const Token> roots,
                        const PipelineConfig& config,
                        std::vector<std::string>* events) {
  WalkCorpus corpus;
  if (config.walk_strategy == WalkStrategy::kRandom) {
    RandomWalkOptions opts;
    opts.depth = config.walk_depth;
    opts.walks_per_vertex = config.walk_number;
    opts.seed = config.walk_seed();
    opts.duplicate_free = config.duplicate_free;
    opts.workers = config.workers;
    corpus = RandomWalks(graph, roots, opts);
  } else {
    std::string note =
        "walk_number and duplicate_free are ignored by the bfs strategy";
    spdlog::warn("{}", note);
    if (events != nullptr) events->push_back(std::move(note));
    corpus = BfsWalks(graph, roots, config.walk_depth, config.workers).corpus;
  }
  return Project(corpus, config.projection);
}

TrainResult TrainEmbeddings(const WalkCorpus& corpus, std::size_t vocab_size,
                            const PipelineConfig& config,
                            const RunControl* control) {
  return Train(corpus, vocab_size, config.ToTrainConfig(), config.train_seed(),
               control);
}

FitResult FitTransform(const EncodedGraph& data,
                       const std::optional<std::vector<Token>>& walk_vertices,
                       const PipelineConfig& config,
                       const RunControl* control) {
  RunStage("config", [&] { config.Validate(); });
  const auto started = std::chrono::steady_clock::now();
  if (control != nullptr) RunStage("walks", [&] { control->Check(); });

  const Vocabulary& vocab = data.vocabulary;
  Graph graph = RunStage("graph", [&] {
    if (data.edges.empty()) throw DataError("no edges to walk");
    return BuildGraph(data.edges, vocab.size());
  });

  FitResult fit;
  const auto walk_start = std::chrono::steady_clock::now();
  WalkCorpus corpus = RunStage("walks", [&] {
    std::vector<Token> roots =
        walk_vertices ? *walk_vertices : vocab.EntityTokens();
    return ExtractWalks(graph, roots, config, &fit.events);
  });
  fit.timings.walks_seconds = SecondsSince(walk_start);
  fit.walk_count = corpus.size();
  fit.corpus_tokens = corpus.total_tokens();
  if (control != nullptr) RunStage("walks", [&] { control->Check(); });

  const auto train_start = std::chrono::steady_clock::now();
  TrainResult trained = RunStage("train", [&] {
    return TrainEmbeddings(corpus, vocab.size(), config, control);
  });
  fit.timings.train_seconds = SecondsSince(train_start);

  fit.embeddings = std::move(trained.model.input);
  fit.trained_mask = std::move(trained.model.trained_mask);
  fit.lexicals = vocab.lexicals();
  fit.epoch_loss = std::move(trained.epoch_loss);
  fit.batch_size = trained.batch_size;
  fit.instances = trained.instances;
  for (std::string& e : trained.events) fit.events.push_back(std::move(e));
  {
    // Frequencies over the corpus, for the vocabulary export.
    std::vector<std::uint64_t> freq(vocab.size(), 0);
    for (Token t : corpus.tokens()) ++freq[t];
    fit.frequency = std::move(freq);
  }
  if (!config.batch_size) {
    fit.events.push_back(fmt::format(
        "batch_size=auto resolved to {} (min of memory/4 rule and 1/20 of "
        "{} training instances)",
        fit.batch_size, fit.instances));
  }
  fit.timings.total_seconds = SecondsSince(started);
  return fit;
}

nlohmann::json BuildManifest(const FitResult& fit,
                             const PipelineConfig& config,
                             const std::optional<DataSource>& source) {
  nlohmann::json m;
  m["config"] = config.ToJson();
  m["seeds"] = {{"walks", config.walk_seed()},
                {"training", config.train_seed()}};
  m["timings"] = {{"walks_seconds", fit.timings.walks_seconds},
                  {"train_seconds", fit.timings.train_seconds},
                  {"total_seconds", fit.timings.total_seconds}};
  m["corpus"] = {{"walks", fit.walk_count}, {"tokens", fit.corpus_tokens}};
  m["training"] = {{"instances", fit.instances},
                   {"batch_size", fit.batch_size},
                   {"epoch_loss", fit.epoch_loss}};
  m["vocabulary_size"] = fit.lexicals.size();
  m["events"] = fit.events;
  if (source) {
    nlohmann::json inputs = nlohmann::json::array();
    for (const InputSpec& in : source->inputs) {
      nlohmann::json i;
      i["path"] = std::filesystem::absolute(in.path).string();
      i["format"] = in.format ? nlohmann::json(InputFormatName(*in.format))
                              : nlohmann::json(nullptr);
      i["has_header"] = in.has_header;
      inputs.push_back(std::move(i));
    }
    m["data"] = {{"inputs", inputs},
                 {"include_literals", source->load.include_literals},
                 {"strict", source->load.strict}};
  }
  return m;
}

RunArtifacts SaveArtifacts(const FitResult& fit, const Vocabulary& vocabulary,
                           const PipelineConfig& config,
                           const std::filesystem::path& out_dir,
                           const std::optional<DataSource>& source) {
  if (!config.generate_artifact) return {};
  return RunStage("artifacts", [&] {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
      throw ResourceError(fmt::format("cannot create '{}': {}",
                                      out_dir.string(), ec.message()));
    }
    RunArtifacts a;
    a.embeddings = out_dir / "embeddings.txt";
    a.vocabulary = out_dir / "vocab.tsv";
    a.loss_trace = out_dir / "loss.csv";
    a.manifest = out_dir / "manifest.json";

    auto open = [](const std::filesystem::path& p) {
      std::ofstream f(p, std::ios::binary | std::ios::trunc);
      if (!f) throw ResourceError(fmt::format("cannot write '{}'", p.string()));
      return f;
    };
    auto close = [](std::ofstream& f, const std::filesystem::path& p) {
      f.close();
      if (!f) throw ResourceError(fmt::format("write failed: '{}'", p.string()));
    };
    {
      std::ofstream f = open(a.embeddings);
      WriteWord2VecText(f, fit.embeddings, fit.lexicals);
      close(f, a.embeddings);
    }
    {
      Vocabulary v = vocabulary;
      if (fit.frequency.size() == v.size()) v.SetFrequencies(fit.frequency);
      std::ofstream f = open(a.vocabulary);
      v.WriteTsv(f);
      close(f, a.vocabulary);
    }
    {
      std::ofstream f = open(a.loss_trace);
      WriteLossCsv(f, fit.epoch_loss);
      close(f, a.loss_trace);
    }
    {
      std::ofstream f = open(a.manifest);
      f << BuildManifest(fit, config, source).dump(2) << '\n';
      close(f, a.manifest);
    }
    return a;
  });
}

Replay ReadManifest(const std::filesystem::path& manifest_path) {
  std::ifstream f(manifest_path);
  if (!f) {
    throw DataError(
        fmt::format("cannot open manifest '{}'", manifest_path.string()));
  }
  nlohmann::json m;
  try {
    f >> m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("manifest: {}", e.what()));
  }
  if (!m.contains("config")) throw DataError("manifest: missing config");
  Replay r;
  r.config = PipelineConfig::FromJson(m.at("config"));
  if (m.contains("data")) {
    const auto& d = m.at("data");
    r.source.load.include_literals = d.value("include_literals", false);
    r.source.load.strict = d.value("strict", false);
    for (const auto& i : d.at("inputs")) {
      InputSpec spec;
      spec.path = i.at("path").get<std::string>();
      if (!i.at("format").is_null()) {
        spec.format = ParseInputFormat(i.at("format").get<std::string>());
      }
      spec.has_header = i.value("has_header", false);
      r.source.inputs.push_back(std::move(spec));
    }
  }
  return r;
}

}  // namespace rdf2vec
