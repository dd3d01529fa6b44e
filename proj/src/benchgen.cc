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
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace rdf2vec {

GeneratorModel ParseGeneratorModel(std::string_view name) {
  if (name == "barabasi" || name == "ba") return GeneratorModel::kBarabasi;
  if (name == "erdos_renyi" || name == "er") return GeneratorModel::kErdosRenyi;
  if (name == "uniform_attachment" || name == "ua" || name == "random") {
    return GeneratorModel::kUniformAttachment;
  }
  throw ConfigError(fmt::format("model: unknown generator '{}'", name));
}

std::string_view GeneratorModelName(GeneratorModel model) {
  switch (model) {
    case GeneratorModel::kBarabasi: return "barabasi";
    case GeneratorModel::kErdosRenyi: return "erdos_renyi";
    case GeneratorModel::kUniformAttachment: return "uniform_attachment";
  }
  return "?";
}

int GeneratorSpec::EffectiveM() const {
  if (m > 0) return m;
  return model == GeneratorModel::kUniformAttachment ? 10 : 1;
}

void GeneratorSpec::Validate() const {
  if (n < 2) throw ConfigError("n: must be >= 2");
  if (model == GeneratorModel::kErdosRenyi && !(p > 0.0 && p < 1.0)) {
    throw ConfigError("p: must be in (0, 1)");
  }
  if (m < 0) throw ConfigError("m: must be >= 1 (or 0 for the default)");
  if (predicate_set_size < 1) {
    throw ConfigError("predicate_set_size: must be >= 1");
  }
}

std::string GeneratorSpec::Label() const {
  if (!name.empty()) return name;
  switch (model) {
    case GeneratorModel::kBarabasi: return fmt::format("barabasi_{}", n);
    case GeneratorModel::kErdosRenyi: return fmt::format("erdos_renyi_{}", n);
    case GeneratorModel::kUniformAttachment:
      return fmt::format("uniform_attachment_{}", n);
  }
  return "?";
}

namespace {

std::mt19937_64 GeneratorRng(std::uint64_t seed, std::uint32_t model_tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), model_tag};
  return std::mt19937_64(seq);
}

}  // namespace

GeneratedGraph GenBarabasi(std::size_t n, int m, std::uint64_t seed) {
  if (n < 2) throw ConfigError("n: must be >= 2");
  if (m < 1) throw ConfigError("m: must be >= 1");
  auto rng = GeneratorRng(seed, 0xba);
  GeneratedGraph g;
  g.vertex_count = n;
  // Vertex j appears in_degree(j) + 1 times, so a uniform pick from the bag
  // is a pick proportional to in_degree + 1.
  std::vector<std::uint32_t> bag{0};
  bag.reserve(n * static_cast<std::size_t>(m + 1));
  std::vector<std::uint32_t> chosen;
  for (std::uint32_t i = 1; i < n; ++i) {
    const std::size_t want = std::min<std::size_t>(m, i);
    chosen.clear();
    if (want == i) {
      for (std::uint32_t j = 0; j < i; ++j) chosen.push_back(j);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, bag.size() - 1);
      while (chosen.size() < want) {
        std::uint32_t j = bag[pick(rng)];
        if (std::find(chosen.begin(), chosen.end(), j) == chosen.end()) {
          chosen.push_back(j);
        }
      }
    }
    for (std::uint32_t j : chosen) {
      g.edges.emplace_back(i, j);
      bag.push_back(j);
    }
    bag.push_back(i);
  }
  return g;
}

GeneratedGraph GenErdosRenyi(std::size_t n, double p, std::uint64_t seed) {
  if (n < 2) throw ConfigError("n: must be >= 2");
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("p: must be in (0, 1)");
  auto rng = GeneratorRng(seed, 0xe7);
  GeneratedGraph g;
  g.vertex_count = n;
  g.edges.reserve(static_cast<std::size_t>(
      p * static_cast<double>(n) * static_cast<double>(n - 1) * 1.05));
  // Geometric skipping over the n(n-1) ordered pairs: the gap to the next
  // included pair is Geometric(p).
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1);
  const double log_q = std::log1p(-p);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::uint64_t idx = 0;
  while (true) {
    const double skip = std::floor(std::log1p(-uniform(rng)) / log_q);
    if (skip >= static_cast<double>(pairs - idx)) break;
    idx += static_cast<std::uint64_t>(skip);
    const auto u = static_cast<std::uint32_t>(idx / (n - 1));
    auto v = static_cast<std::uint32_t>(idx % (n - 1));
    if (v >= u) ++v;
    g.edges.emplace_back(u, v);
    if (++idx >= pairs) break;
  }
  return g;
}

GeneratedGraph GenUniformAttachment(std::size_t n, int m, std::uint64_t seed,
                                    bool citation) {
  if (n < 2) throw ConfigError("n: must be >= 2");
  if (m < 1) throw ConfigError("m: must be >= 1");
  auto rng = GeneratorRng(seed, citation ? 0xc1 : 0x0a);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> raw;
  raw.reserve((n - 1) * static_cast<std::size_t>(m));
  std::vector<std::uint32_t> cited;
  for (std::uint32_t i = 1; i < n; ++i) {
    if (citation) {
      std::uniform_int_distribution<std::uint32_t> pick(0, i - 1);
      cited.clear();
      for (int j = 0; j < m; ++j) cited.push_back(pick(rng));
      std::sort(cited.begin(), cited.end());
      cited.erase(std::unique(cited.begin(), cited.end()), cited.end());
      for (std::uint32_t t : cited) raw.emplace_back(i, t);
    } else {
      std::uniform_int_distribution<std::uint32_t> pick(0, i);
      for (int j = 0; j < m; ++j) {
        const std::uint32_t to = pick(rng);
        const std::uint32_t from = pick(rng);
        raw.emplace_back(from, to);
      }
    }
  }

  std::vector<std::int64_t> relabel(n, -1);
  for (auto [u, v] : raw) relabel[u] = relabel[v] = 0;
  GeneratedGraph g;
  for (std::size_t v = 0; v < n; ++v) {
    if (relabel[v] == 0) relabel[v] = static_cast<std::int64_t>(g.vertex_count++);
  }
  g.edges.reserve(raw.size());
  for (auto [u, v] : raw) {
    g.edges.emplace_back(static_cast<std::uint32_t>(relabel[u]),
                         static_cast<std::uint32_t>(relabel[v]));
  }
  return g;
}

GeneratedGraph Generate(const GeneratorSpec& spec) {
  spec.Validate();
  switch (spec.model) {
    case GeneratorModel::kBarabasi:
      return GenBarabasi(spec.n, spec.EffectiveM(), spec.seed);
    case GeneratorModel::kErdosRenyi:
      return GenErdosRenyi(spec.n, spec.p, spec.seed);
    case GeneratorModel::kUniformAttachment:
      return GenUniformAttachment(spec.n, spec.EffectiveM(), spec.seed,
                                  spec.citation);
  }
  throw ConfigError("model: unknown generator");
}

std::vector<LabeledEdge> AssignPredicates(
    std::span<const std::pair<std::uint32_t, std::uint32_t>> edges,
    int predicate_set_size, std::uint64_t seed) {
  if (predicate_set_size < 1) {
    throw ConfigError("predicate_set_size: must be >= 1");
  }
  auto rng = GeneratorRng(seed, 0x9d);
  std::uniform_int_distribution<std::uint32_t> pick(
      0, static_cast<std::uint32_t>(predicate_set_size - 1));
  std::vector<LabeledEdge> out;
  out.reserve(edges.size());
  for (auto [u, v] : edges) out.push_back({u, pick(rng), v});
  return out;
}

std::vector<Triple> ToTriples(std::span<const LabeledEdge> edges) {
  std::vector<Triple> out;
  out.reserve(edges.size());
  for (const LabeledEdge& e : edges) {
    out.push_back(Triple{fmt::format("v{}", e.source),
                         fmt::format("P{}", e.predicate),
                         fmt::format("v{}", e.target),
                         ObjectKind::kResource});
  }
  return out;
}

EncodedGraph GenerateKnowledgeGraph(const GeneratorSpec& spec) {
  GeneratedGraph g = Generate(spec);
  std::vector<LabeledEdge> labeled =
      AssignPredicates(g.edges, spec.predicate_set_size, spec.seed);
  std::vector<Triple> triples = ToTriples(labeled);
  return BuildVocabulary(triples, false);
}

MeanStd Summarize(std::span<const double> values) {
  MeanStd s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

BenchReport RunBenchmark(std::span<const GeneratorSpec> graphs,
                         std::span<const PipelineConfig> configs, int repeats,
                         double timeout_seconds,
                         const BenchObserver& observer) {
  if (repeats < 1) throw ConfigError("repeats: must be >= 1");
  if (timeout_seconds < 0) throw ConfigError("timeout_s: must be >= 0");
  BenchReport report;
  report.repeats = repeats;
  report.timeout_seconds = timeout_seconds;

  for (const GeneratorSpec& base_graph : graphs) {
    for (const PipelineConfig& base_config : configs) {
      BenchCell cell;
      cell.graph = base_graph;
      cell.config = base_config;
      std::vector<double> walks, train, total;
      for (int r = 0; r < repeats; ++r) {
        GeneratorSpec gspec = base_graph;
        gspec.seed = base_graph.seed + static_cast<std::uint64_t>(r);
        PipelineConfig config = base_config;
        config.random_state =
            base_config.random_state + static_cast<std::uint64_t>(r);

        BenchRun run;
        run.graph_seed = gspec.seed;
        run.random_state = config.random_state;
        EncodedGraph kg = GenerateKnowledgeGraph(gspec);
        if (r == 0) {
          cell.vertices = kg.vocabulary.entity_count();
          cell.edges = kg.edges.size();
        }
        RunControl control;
        control.deadline =
            std::chrono::steady_clock::now() +
            std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                std::chrono::duration<double>(timeout_seconds));
        try {
          FitResult fit = FitTransform(kg, std::nullopt, config, &control);
          run.walks_seconds = fit.timings.walks_seconds;
          run.train_seconds = fit.timings.train_seconds;
          run.total_seconds = fit.timings.total_seconds;
          walks.push_back(run.walks_seconds);
          train.push_back(run.train_seconds);
          total.push_back(run.total_seconds);
          cell.runs.push_back(run);
          if (observer) observer(cell, static_cast<std::size_t>(r), fit);
        } catch (const TimeoutError&) {
          run.timed_out = true;
          cell.timed_out = true;
          cell.runs.push_back(run);
          spdlog::info("{} repeat {} timed out after {} s", gspec.Label(), r,
                       timeout_seconds);
        }
      }
      cell.walks = Summarize(walks);
      cell.train = Summarize(train);
      cell.total = Summarize(total);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

void WriteBenchCsv(std::ostream& out, const BenchReport& report) {
  out << "graph,model,n,vertices,edges,walk_strategy,walk_depth,walk_number,"
         "embedding_model,epochs,repeats,completed,timed_out,walks_mean_s,"
         "walks_std_s,train_mean_s,train_std_s,total_mean_s,total_std_s\n";
  for (const BenchCell& c : report.cells) {
    const auto completed = std::count_if(
        c.runs.begin(), c.runs.end(),
        [](const BenchRun& r) { return !r.timed_out; });
    out << fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},"
        "{:.6f},{:.6f}\n",
        c.graph.Label(), GeneratorModelName(c.graph.model), c.graph.n,
        c.vertices, c.edges, WalkStrategyName(c.config.walk_strategy),
        c.config.walk_depth, c.config.walk_number,
        ModelKindName(c.config.embedding_model), c.config.epochs,
        report.repeats, completed, c.timed_out ? 1 : 0, c.walks.mean,
        c.walks.stddev, c.train.mean, c.train.stddev, c.total.mean,
        c.total.stddev);
  }
}

void WriteBenchTable(std::ostream& out, const BenchReport& report) {
  out << fmt::format("{:<28} {:>8} {:>10} {:>6} {:>7} {:>22} {:>22}\n",
                     "graph", "V", "E", "depth", "walks", "walk extraction [s]",
                     "total [s]");
  for (const BenchCell& c : report.cells) {
    std::string walk_col = "timeout";
    std::string total_col = "timeout";
    if (!c.timed_out) {
      walk_col = fmt::format("{:.3f} +- {:.3f}", c.walks.mean, c.walks.stddev);
      total_col = fmt::format("{:.3f} +- {:.3f}", c.total.mean, c.total.stddev);
    }
    out << fmt::format("{:<28} {:>8} {:>10} {:>6} {:>7} {:>22} {:>22}\n",
                       c.graph.Label(), c.vertices, c.edges,
                       c.config.walk_depth, c.config.walk_number, walk_col,
                       total_col);
  }
}

namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T ParseNumber(const std::string& value, std::string_view key, std::size_t line) {
  T out{};
  auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParseError(line, fmt::format("{}: bad number '{}'", key, value));
  }
  return out;
}

bool ParseBool(const std::string& value, std::string_view key,
               std::size_t line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError(line, fmt::format("{}: bad boolean '{}'", key, value));
}

// Best-effort typing of a config value for PipelineConfig::FromJson.
nlohmann::json TypedValue(const std::string& value) {
  if (value == "auto" || value == "none" || value == "null") return nullptr;
  if (value == "true") return true;
  if (value == "false") return false;
  std::int64_t i = 0;
  auto [ip, iec] = std::from_chars(value.data(), value.data() + value.size(), i);
  if (iec == std::errc() && ip == value.data() + value.size()) return i;
  double d = 0.0;
  auto [dp, dec] = std::from_chars(value.data(), value.data() + value.size(), d);
  if (dec == std::errc() && dp == value.data() + value.size()) return d;
  return value;
}

}  // namespace

BenchSuite ParseBenchSuite(std::istream& in) {
  BenchSuite suite;
  enum class Section { kNone, kGraph, kConfig, kRun } section = Section::kNone;
  nlohmann::json pending_config;
  bool have_config = false;

  auto flush_config = [&](std::size_t line) {
    if (!have_config) return;
    try {
      suite.configs.push_back(PipelineConfig::FromJson(pending_config));
    } catch (const ConfigError& e) {
      throw ParseError(line, e.what());
    }
    pending_config = nlohmann::json::object();
    have_config = false;
  };

  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string text = Trim(raw);
    if (text.empty() || text[0] == '#') continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ParseError(line, "unterminated section");
      flush_config(line);
      std::string header = Trim(std::string_view(text).substr(1, text.size() - 2));
      std::string kind = header.substr(0, header.find(' '));
      std::string name = header.find(' ') == std::string::npos
                             ? std::string()
                             : Trim(header.substr(header.find(' ') + 1));
      if (kind == "graph") {
        section = Section::kGraph;
        suite.graphs.emplace_back();
        suite.graphs.back().name = name;
      } else if (kind == "config") {
        section = Section::kConfig;
        pending_config = nlohmann::json::object();
        have_config = true;
        suite.config_names.push_back(name);
      } else if (kind == "run") {
        section = Section::kRun;
      } else {
        throw ParseError(line, fmt::format("unknown section '{}'", kind));
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected key = value");
    std::string key = Trim(std::string_view(text).substr(0, eq));
    std::string value = Trim(std::string_view(text).substr(eq + 1));
    switch (section) {
      case Section::kNone:
        throw ParseError(line, "key outside of a section");
      case Section::kGraph: {
        GeneratorSpec& g = suite.graphs.back();
        if (key == "model") {
          try {
            g.model = ParseGeneratorModel(value);
          } catch (const ConfigError& e) {
            throw ParseError(line, e.what());
          }
        } else if (key == "n") {
          g.n = ParseNumber<std::size_t>(value, key, line);
        } else if (key == "p") {
          g.p = ParseNumber<double>(value, key, line);
        } else if (key == "m") {
          g.m = ParseNumber<int>(value, key, line);
        } else if (key == "citation") {
          g.citation = ParseBool(value, key, line);
        } else if (key == "predicate_set_size") {
          g.predicate_set_size = ParseNumber<int>(value, key, line);
        } else if (key == "seed") {
          g.seed = ParseNumber<std::uint64_t>(value, key, line);
        } else {
          throw ParseError(line, fmt::format("{}: unknown graph key", key));
        }
        break;
      }
      case Section::kConfig:
        pending_config[key] = TypedValue(value);
        break;
      case Section::kRun:
        if (key == "repeats") {
          suite.repeats = ParseNumber<int>(value, key, line);
        } else if (key == "timeout_s") {
          suite.timeout_seconds = ParseNumber<double>(value, key, line);
        } else {
          throw ParseError(line, fmt::format("{}: unknown run key", key));
        }
        break;
    }
  }
  flush_config(line);
  if (suite.configs.empty()) {
    suite.configs.emplace_back();
    suite.config_names.push_back("default");
  }
  for (const GeneratorSpec& g : suite.graphs) g.Validate();
  return suite;
}

BenchSuite ReadBenchSuite(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return ParseBenchSuite(f);
}

}  // namespace rdf2vec
