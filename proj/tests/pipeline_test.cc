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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

namespace rdf2vec {
namespace {

namespace fs = std::filesystem;
const fs::path kData = RDF2VEC_TEST_DATA_DIR;

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("rdf2vec_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter_++));
    fs::remove_all(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

PipelineConfig SmallConfig() {
  PipelineConfig c;
  c.vector_size = 8;
  c.epochs = 2;
  c.min_count = 1;
  c.walk_number = 20;
  c.walk_depth = 3;
  c.batch_size = 32;
  c.memory_budget_bytes = 1ull << 30;
  return c;
}

TEST(Config, DefaultsMatchLibrarySurface) {
  PipelineConfig c;
  EXPECT_EQ(c.walk_strategy, WalkStrategy::kRandom);
  EXPECT_EQ(c.walk_depth, 5);
  EXPECT_EQ(c.walk_number, 100);
  EXPECT_EQ(c.embedding_model, ModelKind::kSkipGram);
  EXPECT_EQ(c.epochs, 5);
  EXPECT_FALSE(c.batch_size);
  EXPECT_EQ(c.vector_size, 100);
  EXPECT_EQ(c.window_size, 5);
  EXPECT_EQ(c.min_count, 10);
  EXPECT_DOUBLE_EQ(c.learning_rate, 0.01);
  EXPECT_EQ(c.negative_samples, 5);
  EXPECT_EQ(c.random_state, 42u);
  EXPECT_FALSE(c.generate_artifact);
  EXPECT_NO_THROW(c.Validate());
}

TEST(Config, JsonRoundTripAndErrors) {
  PipelineConfig c = SmallConfig();
  c.walk_strategy = WalkStrategy::kBfs;
  c.projection = Projection::kProperty;
  c.embedding_model = ModelKind::kCbow;
  PipelineConfig back = PipelineConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.ToJson(), c.ToJson());

  auto message = [](const nlohmann::json& j) -> std::string {
    try {
      PipelineConfig::FromJson(j);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_EQ(message({{"walk_strategy", "dfs"}}).rfind("walk_strategy", 0), 0u);
  EXPECT_EQ(message({{"walk_depht", 3}}).rfind("walk_depht", 0), 0u);
  EXPECT_EQ(message({{"epochs", "five"}}).rfind("epochs", 0), 0u);
  EXPECT_EQ(message({{"batch_size", nullptr}}), "");

  PipelineConfig bad;
  bad.walk_number = 0;
  EXPECT_THROW(bad.Validate(), ConfigError);
}

TEST(Config, ByteSizesAndEnvironmentBudget) {
  EXPECT_EQ(ParseByteSize("1024"), 1024u);
  EXPECT_EQ(ParseByteSize("4K"), 4096u);
  EXPECT_EQ(ParseByteSize("512M"), 512ull << 20);
  EXPECT_EQ(ParseByteSize("2GiB"), 2ull << 30);
  EXPECT_THROW(ParseByteSize("lots"), ConfigError);

  PipelineConfig c;
  ::setenv(kMemoryBudgetEnv, "64M", 1);
  EXPECT_EQ(ResolveMemoryBudget(c), 64ull << 20);
  c.memory_budget_bytes = 7;
  EXPECT_EQ(ResolveMemoryBudget(c), 7u);
  ::unsetenv(kMemoryBudgetEnv);
  c.memory_budget_bytes = 0;
  EXPECT_EQ(ResolveMemoryBudget(c), 0u);
}

TEST(LoadData, ThreeTripleFixture) {
  LoadedData d = LoadData({{kData / "three.nt"}});
  EXPECT_EQ(d.graph.edges.size(), 3u);
  EXPECT_LE(d.graph.vocabulary.size(), 9u);
}

TEST(LoadData, ParquetUnsupported) {
  try {
    LoadData({{kData / "edges.parquet"}});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("format unsupported"),
              std::string::npos);
  }
}

TEST(LoadData, CsvWithHeader) {
  LoadedData d = LoadData({{kData / "star.csv", std::nullopt, true}});
  EXPECT_EQ(d.graph.edges.size(), 4u);  // five rows minus the header
}

TEST(LoadData, MultipleFilesInFileOrder) {
  std::vector<InputSpec> in{{kData / "chain.nt"}, {kData / "three.nt"},
                            {kData / "ntriples_100.nt"}};
  LoadedData one = LoadData(in, {.workers = 1});
  LoadedData three = LoadData(in, {.workers = 3});
  EXPECT_EQ(one.graph.vocabulary, three.graph.vocabulary);
  EXPECT_EQ(one.graph.edges, three.graph.edges);
  EXPECT_EQ(*one.graph.vocabulary.Find("http://ex/a"), 0);
}

TEST(LoadData, StrictModeErrorsAndMissingFile) {
  TempDir tmp;
  fs::create_directories(tmp.path());
  std::ofstream(tmp.path() / "bad.nt")
      << "<http://a> <http://b> .\n<http://a> <http://b> <http://c> .\n";
  LoadedData lenient = LoadData({{tmp.path() / "bad.nt"}}, {});
  ASSERT_EQ(lenient.skipped.size(), 1u);
  EXPECT_EQ(lenient.skipped[0].line(), 1u);
  EXPECT_EQ(lenient.graph.edges.size(), 1u);
  EXPECT_THROW(LoadData({{tmp.path() / "bad.nt"}}, {.strict = true}),
               ParseError);
  EXPECT_THROW(LoadData({{tmp.path() / "missing.nt"}}), DataError);
}

TEST(FitTransform, ChainFixture) {
  LoadedData d = LoadData({{kData / "chain.nt"}});
  const Vocabulary& v = d.graph.vocabulary;
  PipelineConfig c = SmallConfig();
  c.walk_depth = 4;
  c.walk_number = 1;
  Graph g = BuildGraph(d.graph.edges, v.size());
  std::vector<Token> root{*v.Find("http://ex/a")};
  WalkCorpus corpus = ExtractWalks(g, root, c);
  ASSERT_EQ(corpus.size(), 1u);
  std::vector<std::string> lex;
  for (Token t : corpus.walk(0)) lex.push_back(v.Lexical(t));
  EXPECT_EQ(lex, (std::vector<std::string>{"http://ex/a", "http://ex/p",
                                           "http://ex/b", "http://ex/q",
                                           "http://ex/c"}));
  FitResult fit = FitTransform(d.graph, root, c);
  EXPECT_EQ(fit.embeddings.rows(), 5u);
  EXPECT_EQ(fit.embeddings.cols(), 8u);
  EXPECT_EQ(fit.lexicals.size(), 5u);
  EXPECT_EQ(fit.walk_count, 1u);
}

TEST(FitTransform, WalkVerticesRestrictRoots) {
  LoadedData d = LoadData({{kData / "star.csv", std::nullopt, true}});
  const Vocabulary& v = d.graph.vocabulary;
  PipelineConfig c = SmallConfig();
  Graph g = BuildGraph(d.graph.edges, v.size());
  std::vector<Token> root{*v.Find("a")};
  WalkCorpus corpus = ExtractWalks(g, root, c);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(corpus.walk(i)[0], root[0]);
  }
  FitResult fit = FitTransform(d.graph, root, c);
  EXPECT_EQ(fit.walk_count, static_cast<std::size_t>(c.walk_number));
}

TEST(FitTransform, DefaultRootsAreAllEntities) {
  LoadedData d = LoadData({{kData / "star.csv", std::nullopt, true}});
  PipelineConfig c = SmallConfig();
  FitResult fit = FitTransform(d.graph, std::nullopt, c);
  EXPECT_EQ(fit.walk_count, 4u * c.walk_number);  // r, a, b, c
  EXPECT_EQ(fit.embeddings.rows(), d.graph.vocabulary.size());
}

TEST(FitTransform, ErrorsNameTheStage) {
  LoadedData d = LoadData({{kData / "chain.nt"}});
  PipelineConfig c = SmallConfig();
  c.min_count = 1000;
  try {
    FitTransform(d.graph, std::nullopt, c);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.stage(), "train");
    EXPECT_EQ(std::string(e.what()).rfind("train: ", 0), 0u);
  }
  c = SmallConfig();
  c.epochs = 0;
  try {
    FitTransform(d.graph, std::nullopt, c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.stage(), "config");
  }
  c = SmallConfig();
  try {
    FitTransform(d.graph, std::vector<Token>{99}, c);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.stage(), "walks");
  }
}

TEST(FitTransform, BfsWarnsThatWalkNumberIsIgnored) {
  LoadedData d = LoadData({{kData / "star.csv", std::nullopt, true}});
  PipelineConfig c = SmallConfig();
  c.walk_strategy = WalkStrategy::kBfs;
  FitResult fit = FitTransform(d.graph, std::nullopt, c);
  bool warned = false;
  for (auto& e : fit.events) warned |= e.find("walk_number") != std::string::npos;
  EXPECT_TRUE(warned);
}

TEST(FitTransform, ProjectionsFeedTraining) {
  LoadedData d = LoadData({{kData / "ntriples_100.nt"}});
  for (Projection p : {Projection::kEntity, Projection::kProperty}) {
    PipelineConfig c = SmallConfig();
    c.projection = p;
    FitResult fit = FitTransform(d.graph, std::nullopt, c);
    EXPECT_EQ(fit.embeddings.rows(), d.graph.vocabulary.size());
  }
}

TEST(Artifacts, ReproducibleRunsAreByteIdentical) {
  LoadedData d = LoadData({{kData / "ntriples_100.nt"}});
  for (int workers : {1, 3}) {
    PipelineConfig c = SmallConfig();
    c.reproducible = true;
    c.workers = workers;
    c.generate_artifact = true;
    TempDir a, b;
    SaveArtifacts(FitTransform(d.graph, std::nullopt, c), d.graph.vocabulary,
                  c, a.path());
    SaveArtifacts(FitTransform(d.graph, std::nullopt, c), d.graph.vocabulary,
                  c, b.path());
    EXPECT_EQ(Slurp(a.path() / "embeddings.txt"),
              Slurp(b.path() / "embeddings.txt"));
    EXPECT_FALSE(Slurp(a.path() / "embeddings.txt").empty());
  }
}

TEST(Artifacts, DisabledWritesNothing) {
  LoadedData d = LoadData({{kData / "chain.nt"}});
  PipelineConfig c = SmallConfig();
  c.generate_artifact = false;
  TempDir tmp;
  RunArtifacts a = SaveArtifacts(FitTransform(d.graph, std::nullopt, c),
                                 d.graph.vocabulary, c, tmp.path());
  EXPECT_TRUE(a.empty());
  EXPECT_FALSE(fs::exists(tmp.path()));
}

TEST(Artifacts, RoundTripAndRowCorrespondence) {
  LoadedData d = LoadData({{kData / "ntriples_100.nt"}});
  PipelineConfig c = SmallConfig();
  c.generate_artifact = true;
  TempDir tmp;
  FitResult fit = FitTransform(d.graph, std::nullopt, c);
  RunArtifacts a = SaveArtifacts(fit, d.graph.vocabulary, c, tmp.path());
  std::ifstream f(a.embeddings);
  LoadedEmbeddings back = ReadWord2VecText(f);
  ASSERT_EQ(back.vectors.rows(), fit.embeddings.rows());
  for (std::size_t i = 0; i < fit.embeddings.data().size(); ++i) {
    EXPECT_NEAR(back.vectors.data()[i], fit.embeddings.data()[i], 1e-6);
  }
  // One row per vocabulary token, in token order.
  std::set<std::string> distinct(back.lexicals.begin(), back.lexicals.end());
  EXPECT_EQ(distinct.size(), d.graph.vocabulary.size());
  for (std::size_t t = 0; t < back.lexicals.size(); ++t) {
    EXPECT_EQ(back.lexicals[t], d.graph.vocabulary.Lexical(static_cast<Token>(t)));
  }
  std::ifstream vf(a.vocabulary);
  Vocabulary v = Vocabulary::ReadTsv(vf);
  EXPECT_EQ(v, d.graph.vocabulary);
  EXPECT_EQ(v.frequency(), fit.frequency);
  const std::string loss = Slurp(a.loss_trace);
  EXPECT_EQ(loss.rfind("epoch,loss\n1,", 0), 0u);
}

TEST(Artifacts, ManifestReplay) {
  PipelineConfig c = SmallConfig();
  c.generate_artifact = true;
  c.reproducible = true;
  c.batch_size.reset();
  DataSource src{{{kData / "ntriples_100.nt"}}, {}};
  LoadedData d = LoadData(src.inputs, src.load);
  FitResult fit = FitTransform(d.graph, std::nullopt, c);
  TempDir tmp;
  RunArtifacts a = SaveArtifacts(fit, d.graph.vocabulary, c, tmp.path(), src);

  nlohmann::json m = nlohmann::json::parse(Slurp(a.manifest));
  EXPECT_EQ(m["seeds"]["walks"], c.walk_seed());
  EXPECT_EQ(m["seeds"]["training"], c.train_seed());
  EXPECT_TRUE(m["timings"].contains("walks_seconds"));
  bool flagged = false;
  for (auto& e : m["events"]) {
    flagged |= e.get<std::string>().find("batch_size=auto") != std::string::npos;
  }
  EXPECT_TRUE(flagged);

  Replay r = ReadManifest(a.manifest);
  EXPECT_EQ(r.config.ToJson(), c.ToJson());
  LoadedData d2 = LoadData(r.source.inputs, r.source.load);
  FitResult again = FitTransform(d2.graph, std::nullopt, r.config);
  EXPECT_EQ(again.walk_count, fit.walk_count);
  EXPECT_EQ(again.corpus_tokens, fit.corpus_tokens);
  EXPECT_EQ(again.embeddings, fit.embeddings);
}

TEST(Stages, SeparateWalksAndTrainEqualFitTransform) {
  LoadedData d = LoadData({{kData / "ntriples_100.nt"}});
  PipelineConfig c = SmallConfig();
  c.reproducible = true;
  c.workers = 2;
  FitResult fit = FitTransform(d.graph, std::nullopt, c);

  Graph g = BuildGraph(d.graph.edges, d.graph.vocabulary.size());
  WalkCorpus corpus = ExtractWalks(g, d.graph.vocabulary.EntityTokens(), c);
  std::stringstream buf;
  WriteCorpusBinary(buf, corpus);
  std::stringstream vbuf;
  d.graph.vocabulary.WriteTsv(vbuf);
  Vocabulary v = Vocabulary::ReadTsv(vbuf);
  TrainResult r = TrainEmbeddings(ReadCorpusBinary(buf), v.size(), c);
  EXPECT_EQ(r.model.input, fit.embeddings);
}

TEST(Resolve, UnknownVertexIsDataError) {
  LoadedData d = LoadData({{kData / "chain.nt"}});
  EXPECT_EQ(ResolveVertices(d.graph.vocabulary, {"http://ex/b"}),
            std::vector<Token>{*d.graph.vocabulary.Find("http://ex/b")});
  EXPECT_THROW(ResolveVertices(d.graph.vocabulary, {"nope"}), DataError);
}

}  // namespace
}  // namespace rdf2vec
