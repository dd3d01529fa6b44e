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

#include "rdf2vec/benchgen.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "rdf2vec/graph.h"

namespace rdf2vec {
namespace {

std::vector<std::size_t> TotalDegrees(const GeneratedGraph& g) {
  std::vector<std::size_t> deg(g.vertex_count, 0);
  for (auto [u, v] : g.edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

double Median(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TEST(Barabasi, EdgeCountsAndDirection) {
  for (std::size_t n : {2u, 100u, 1000u, 10000u}) {
    GeneratedGraph g = GenBarabasi(n, 1, 3);
    EXPECT_EQ(g.vertex_count, n);
    EXPECT_EQ(g.edges.size(), n - 1);
    for (auto [u, v] : g.edges) EXPECT_LT(v, u);  // new -> older
  }
}

TEST(Barabasi, DistinctTargetsForLargerM) {
  GeneratedGraph g = GenBarabasi(300, 4, 8);
  std::set<std::pair<std::uint32_t, std::uint32_t>> uniq(g.edges.begin(),
                                                         g.edges.end());
  EXPECT_EQ(uniq.size(), g.edges.size());
  // min(m, i) edges for vertex i: 1 + 2 + 3 + 4 * 296.
  EXPECT_EQ(g.edges.size(), 6u + 4u * 296u);
}

TEST(Barabasi, HeavyTailAgainstErdosRenyiNull) {
  // Over 20 seeds at n = 10^4, the hub degree dwarfs the median; an ER
  // graph with the same mean degree stays concentrated.
  int heavy = 0, null_heavy = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto ba = TotalDegrees(GenBarabasi(10000, 1, seed));
    const double mx = *std::max_element(ba.begin(), ba.end());
    heavy += mx > 20 * Median(ba);

    auto er = TotalDegrees(GenErdosRenyi(10000, 1.0 / 9999, 100 + seed));
    std::vector<std::size_t> nonzero;
    for (auto d : er)
      if (d > 0) nonzero.push_back(d);
    const double er_max = *std::max_element(er.begin(), er.end());
    null_heavy += er_max > 20 * Median(nonzero);
  }
  EXPECT_EQ(heavy, 20);
  EXPECT_EQ(null_heavy, 0);
}

TEST(ErdosRenyi, EdgeCountBand) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GeneratedGraph g = GenErdosRenyi(100, 0.4, seed);
    EXPECT_GE(g.edges.size(), 3700u);
    EXPECT_LE(g.edges.size(), 4250u);
  }
}

TEST(ErdosRenyi, NearCompleteTail) {
  // Binomial(90, 0.999): P[X < 80] is below 1e-20.
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_GE(GenErdosRenyi(10, 0.999, seed).edges.size(), 80u);
  }
}

TEST(ErdosRenyi, OrderedPairsNoLoopsNoDuplicates) {
  GeneratedGraph g = GenErdosRenyi(60, 0.3, 4);
  std::set<std::pair<std::uint32_t, std::uint32_t>> uniq;
  for (auto e : g.edges) {
    EXPECT_NE(e.first, e.second);
    EXPECT_LT(e.first, 60u);
    EXPECT_LT(e.second, 60u);
    EXPECT_TRUE(uniq.insert(e).second);
  }
  // Both directions of a pair occur independently.
  std::size_t both = 0;
  for (auto [u, v] : uniq) both += uniq.count({v, u});
  EXPECT_GT(both, 0u);
}

TEST(ErdosRenyi, PairInclusionIsUniform) {
  // Each of the 12 ordered pairs of n = 4 at p = 0.5, over 4000 draws.
  std::vector<int> hits(16, 0);
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    for (auto [u, v] : GenErdosRenyi(4, 0.5, seed).edges) ++hits[u * 4 + v];
  }
  const double sigma = std::sqrt(4000 * 0.25);
  for (int u = 0; u < 4; ++u)
    for (int v = 0; v < 4; ++v)
      if (u != v) EXPECT_LT(std::abs(hits[u * 4 + v] - 2000.0), 5 * sigma);
}

TEST(ErdosRenyi, DensityWithinFiveSigma) {
  const std::size_t n = 1000;
  GeneratedGraph g = GenErdosRenyi(n, 0.4, 12);
  const double pairs = static_cast<double>(n * (n - 1));
  const double density = g.edges.size() / pairs;
  EXPECT_LT(std::abs(density - 0.4), 5 * std::sqrt(0.4 * 0.6 / pairs));
}

TEST(UniformAttachment, GrowingRandomDefault) {
  GeneratedGraph g = GenUniformAttachment(100, 10, 1);
  EXPECT_EQ(g.edges.size(), 990u);
  EXPECT_GE(g.vertex_count, 90u);
  EXPECT_LE(g.vertex_count, 100u);
  // No isolated vertex survives the relabeling.
  for (auto d : TotalDegrees(g)) EXPECT_GT(d, 0u);
}

TEST(UniformAttachment, CitationVariant) {
  GeneratedGraph g = GenUniformAttachment(100, 10, 1, true);
  EXPECT_EQ(g.vertex_count, 100u);
  EXPECT_LE(g.edges.size(), 990u);
  std::set<std::pair<std::uint32_t, std::uint32_t>> uniq(g.edges.begin(),
                                                         g.edges.end());
  EXPECT_EQ(uniq.size(), g.edges.size());  // duplicates collapsed
  for (auto [u, v] : g.edges) EXPECT_LT(v, u);
}

TEST(UniformAttachment, CitationVariantDistinctCountMatchesExpectation) {
  // Vertex i draws m targets with replacement from i older vertices; after
  // collapsing, E[distinct] = i * (1 - (1 - 1/i)^m).
  double expected = 0;
  for (int i = 1; i < 100; ++i) expected += i * (1 - std::pow(1 - 1.0 / i, 10));
  double mean = 0;
  const int trials = 200;
  for (int seed = 0; seed < trials; ++seed) {
    mean += GenUniformAttachment(100, 10, seed, true).edges.size();
  }
  mean /= trials;
  // Per-graph sd is under 10, so the mean's sd is under 0.71.
  EXPECT_NEAR(mean, expected, 3.5);
}

TEST(UniformAttachment, SingleEdgePerStep) {
  for (bool citation : {false, true}) {
    GeneratedGraph g = GenUniformAttachment(500, 1, 2, citation);
    EXPECT_EQ(g.edges.size(), 499u);
  }
  // The citation variant with m = 1 is a random recursive tree.
  GeneratedGraph t = GenUniformAttachment(500, 1, 2, true);
  EXPECT_EQ(t.vertex_count, 500u);
}

TEST(Generators, DeterministicUnderSeed) {
  for (GeneratorModel model :
       {GeneratorModel::kBarabasi, GeneratorModel::kErdosRenyi,
        GeneratorModel::kUniformAttachment}) {
    GeneratorSpec s{.model = model, .n = 300, .seed = 5};
    GeneratedGraph a = Generate(s), b = Generate(s);
    EXPECT_EQ(a.edges, b.edges);
    s.seed = 6;
    EXPECT_NE(Generate(s).edges, a.edges);
  }
}

TEST(Generators, SpecValidation) {
  EXPECT_THROW((GeneratorSpec{.n = 1}.Validate()), ConfigError);
  EXPECT_THROW((GeneratorSpec{.p = 0.0}.Validate()), ConfigError);
  EXPECT_THROW((GeneratorSpec{.p = 1.0}.Validate()), ConfigError);
  EXPECT_THROW(GenBarabasi(10, 0, 1), ConfigError);
  EXPECT_EQ((GeneratorSpec{.model = GeneratorModel::kBarabasi}.EffectiveM()), 1);
  EXPECT_EQ(
      (GeneratorSpec{.model = GeneratorModel::kUniformAttachment}.EffectiveM()),
      10);
  EXPECT_EQ(ParseGeneratorModel("ba"), GeneratorModel::kBarabasi);
  EXPECT_THROW(ParseGeneratorModel("ws"), ConfigError);
}

TEST(Predicates, SingletonSetAndEmpty) {
  GeneratedGraph g = GenErdosRenyi(20, 0.3, 1);
  for (const LabeledEdge& e : AssignPredicates(g.edges, 1, 1)) {
    EXPECT_EQ(e.predicate, 0u);
  }
  EXPECT_TRUE(AssignPredicates({}, 10, 1).empty());
  EXPECT_THROW(AssignPredicates(g.edges, 0, 1), ConfigError);
}

TEST(Predicates, UniformChiSquare) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges(100000, {0, 1});
  auto labeled = AssignPredicates(edges, 10, 31);
  std::vector<int> count(10, 0);
  for (const LabeledEdge& e : labeled) ++count[e.predicate];
  const double sigma = std::sqrt(1e5 * 0.1 * 0.9);
  double chi2 = 0;
  for (int c : count) {
    EXPECT_LT(std::abs(c - 1e4), 5 * sigma);
    chi2 += (c - 1e4) * (c - 1e4) / 1e4;
  }
  EXPECT_LT(chi2, 45.0);  // 9 dof, p about 1e-6
}

TEST(KnowledgeGraph, BarabasiStatsMatchTableShape) {
  GeneratorSpec s{.model = GeneratorModel::kBarabasi, .n = 1000};
  EncodedGraph kg = GenerateKnowledgeGraph(s);
  EXPECT_EQ(kg.vocabulary.entity_count(), 1000u);
  EXPECT_EQ(kg.edges.size(), 999u);
  EXPECT_LE(kg.vocabulary.predicate_count(), 10u);
  Graph g = BuildGraph(kg.edges, kg.vocabulary.size());
  VertexMask mask(kg.vocabulary.size());
  for (std::size_t t = 0; t < mask.size(); ++t) {
    mask[t] = kg.vocabulary.IsEntity(static_cast<Token>(t));
  }
  GraphStats st = ComputeStats(g, false, &mask);
  EXPECT_NEAR(st.avg_degree, 1.998, 5e-5);
  EXPECT_NEAR(st.density, 0.001, 5e-5);
  auto triples = ToTriples(AssignPredicates(GenBarabasi(3, 1, 1).edges, 2, 1));
  EXPECT_EQ(triples[0].subject, "v1");
  EXPECT_EQ(triples[0].predicate.front(), 'P');
}

TEST(Summary, PopulationStd) {
  std::vector<double> one{3.0};
  EXPECT_EQ(Summarize(one).stddev, 0.0);
  std::vector<double> two{1.0, 3.0};
  EXPECT_DOUBLE_EQ(Summarize(two).mean, 2.0);
  EXPECT_DOUBLE_EQ(Summarize(two).stddev, 1.0);
}

PipelineConfig TinyConfig() {
  PipelineConfig c;
  c.walk_depth = 2;
  c.walk_number = 5;
  c.vector_size = 4;
  c.epochs = 1;
  c.min_count = 1;
  c.memory_budget_bytes = 1ull << 30;
  return c;
}

TEST(Benchmark, SingleRepeatHasZeroStd) {
  std::vector<GeneratorSpec> graphs{
      {.model = GeneratorModel::kErdosRenyi, .n = 30, .p = 0.1},
      {.model = GeneratorModel::kBarabasi, .n = 50}};
  std::vector<PipelineConfig> configs{TinyConfig()};
  BenchReport r = RunBenchmark(graphs, configs, 1, 600);
  ASSERT_EQ(r.cells.size(), 2u);
  for (const BenchCell& c : r.cells) {
    EXPECT_FALSE(c.timed_out);
    EXPECT_EQ(c.runs.size(), 1u);
    EXPECT_EQ(c.total.stddev, 0.0);
    EXPECT_EQ(c.walks.stddev, 0.0);
    EXPECT_GT(c.total.mean, 0.0);
  }
  EXPECT_EQ(r.cells[1].vertices, 50u);
  EXPECT_EQ(r.cells[1].edges, 49u);
}

TEST(Benchmark, ZeroTimeoutMarksEveryCell) {
  std::vector<GeneratorSpec> graphs{{.n = 20}, {.n = 25}};
  std::vector<PipelineConfig> configs{TinyConfig(), TinyConfig()};
  BenchReport r = RunBenchmark(graphs, configs, 2, 0.0);
  ASSERT_EQ(r.cells.size(), 4u);
  for (const BenchCell& c : r.cells) {
    EXPECT_TRUE(c.timed_out);
    for (const BenchRun& run : c.runs) EXPECT_TRUE(run.timed_out);
  }
  std::ostringstream table;
  WriteBenchTable(table, r);
  EXPECT_NE(table.str().find("timeout"), std::string::npos);
}

TEST(Benchmark, FreshSeedsPerRepeatAndHarnessDoesNotAlterResults) {
  GeneratorSpec g{.model = GeneratorModel::kErdosRenyi, .n = 30, .p = 0.2,
                  .seed = 10};
  PipelineConfig c = TinyConfig();
  c.random_state = 7;
  std::vector<Matrix> seen;
  BenchReport r = RunBenchmark(
      std::span(&g, 1), std::span(&c, 1), 3, 600,
      [&](const BenchCell&, std::size_t, const FitResult& fit) {
        seen.push_back(fit.embeddings);
      });
  ASSERT_EQ(seen.size(), 3u);
  const auto& runs = r.cells[0].runs;
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(runs[i].graph_seed, 10u + i);
    EXPECT_EQ(runs[i].random_state, 7u + i);
  }
  // Repeat 1 equals a direct run with the same seeds.
  GeneratorSpec g1 = g;
  g1.seed = 11;
  PipelineConfig c1 = c;
  c1.random_state = 8;
  FitResult direct = FitTransform(GenerateKnowledgeGraph(g1), std::nullopt, c1);
  EXPECT_EQ(direct.embeddings, seen[1]);
  EXPECT_FALSE(seen[0] == seen[1]);
}

TEST(Benchmark, CsvHasOneRowPerCell) {
  std::vector<GeneratorSpec> graphs{{.n = 20}};
  std::vector<PipelineConfig> configs{TinyConfig()};
  BenchReport r = RunBenchmark(graphs, configs, 2, 600);
  std::ostringstream csv;
  WriteBenchCsv(csv, r);
  std::istringstream lines(csv.str());
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_FALSE(std::getline(lines, extra));
  EXPECT_EQ(header.rfind("graph,model,n,vertices,edges", 0), 0u);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','),
            std::count(row.begin(), row.end(), ','));
}

TEST(Suite, ParsesGraphsConfigsAndRun) {
  std::istringstream in(R"(# demo
[graph er100]
model = erdos_renyi
n = 100
p = 0.4
seed = 3

[graph ua]
model = uniform_attachment
n = 100
citation = true

[config deep]
walk_depth = 8
walk_number = 500
batch_size = auto
embedding_model = cbow

[run]
repeats = 10
timeout_s = 14400
)");
  BenchSuite s = ParseBenchSuite(in);
  ASSERT_EQ(s.graphs.size(), 2u);
  EXPECT_EQ(s.graphs[0].Label(), "er100");
  EXPECT_EQ(s.graphs[0].seed, 3u);
  EXPECT_TRUE(s.graphs[1].citation);
  ASSERT_EQ(s.configs.size(), 1u);
  EXPECT_EQ(s.config_names[0], "deep");
  EXPECT_EQ(s.configs[0].walk_depth, 8);
  EXPECT_FALSE(s.configs[0].batch_size);
  EXPECT_EQ(s.configs[0].embedding_model, ModelKind::kCbow);
  EXPECT_EQ(s.repeats, 10);
  EXPECT_DOUBLE_EQ(s.timeout_seconds, 14400);
}

TEST(Suite, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      ParseBenchSuite(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("[graph g]\nmodel = er\nq = 1\n"), 3u);
  EXPECT_EQ(line_of("n = 3\n"), 1u);
  EXPECT_EQ(line_of("[graph g]\nn = ten\n"), 2u);
  EXPECT_EQ(line_of("[config c]\nwalk_strategy = dfs\n"), 2u);
  EXPECT_EQ(line_of("[weird]\n"), 1u);
}

TEST(Suite, CheckedInSuitesParse) {
  for (const char* name : {"synthetic.suite", "smoke.suite"}) {
    EXPECT_NO_THROW(ReadBenchSuite(std::string(RDF2VEC_TEST_DATA_DIR) +
                                   "/../../bench/" + name))
        << name;
  }
}

}  // namespace
}  // namespace rdf2vec
