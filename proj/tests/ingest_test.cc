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

#include "rdf2vec/ingest.h"

#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace rdf2vec {
namespace {

const std::string kData = RDF2VEC_TEST_DATA_DIR;

std::vector<Triple> ParseText(const std::string& text,
                              ParseReport* report = nullptr,
                              bool strict = false) {
  std::istringstream in(text);
  return ParseNTriples(in, ParseOptions{.strict = strict}, report);
}

TEST(NTriples, SimpleStatement) {
  auto t = ParseText("<http://a> <http://p> <http://b> .\n");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0], (Triple{"http://a", "http://p", "http://b",
                          ObjectKind::kResource}));
}

TEST(NTriples, CommentAndBlankLinesProduceNothing) {
  ParseReport report;
  auto t = ParseText("# comment\n\n   \n\t# indented comment\n", &report);
  EXPECT_TRUE(t.empty());
  EXPECT_TRUE(report.skipped.empty());
  EXPECT_EQ(report.lines, 4u);
}

TEST(NTriples, TypedLiteralKeepsQuotedLexicalForm) {
  auto t = ParseText("<http://a> <http://p> \"42\"^^<http://int> .");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].object, "\"42\"");
  EXPECT_EQ(t[0].object_kind, ObjectKind::kLiteral);
}

TEST(NTriples, LanguageTagStripped) {
  auto t = ParseText("<http://a> <http://p> \"chat\"@en-GB .");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].object, "\"chat\"");
}

TEST(NTriples, BlankNodesKeepLabel) {
  auto t = ParseText("_:x <http://p> _:y.z .");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].subject, "_:x");
  EXPECT_EQ(t[0].object, "_:y.z");
}

TEST(NTriples, TrailingCommentContainingDot) {
  auto t = ParseText("<http://a> <http://p> <http://b> . # see a.b.");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].object, "http://b");
}

TEST(NTriples, MalformedLinesCarryLineNumbers) {
  ParseReport report;
  auto t = ParseText(
      "<http://a> <http://p> <http://b> .\n"
      "<http://a> <http://p> .\n"
      "# ok\n"
      "<http://a> \"lit\" <http://b> .\n"
      "<http://a> <http://p> <http://b>\n"
      "<http://c> <http://p> <http://d> .\n",
      &report);
  EXPECT_EQ(t.size(), 2u);
  ASSERT_EQ(report.skipped.size(), 3u);
  EXPECT_EQ(report.skipped[0].line(), 2u);
  EXPECT_EQ(report.skipped[1].line(), 4u);
  EXPECT_EQ(report.skipped[2].line(), 5u);
}

TEST(NTriples, StrictModeAborts) {
  try {
    ParseText("<http://a> <http://p> <http://b> .\nbroken\n", nullptr, true);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

// Blank nodes renamed _:b0, _:b1, ... by first appearance, matching the
// renaming the oracle applied to its own output.
std::vector<Triple> CanonicalBlankNodes(std::vector<Triple> triples) {
  std::map<std::string, std::string> names;
  auto rename = [&](std::string& term) {
    if (term.rfind("_:", 0) != 0) return;
    auto [it, fresh] =
        names.try_emplace(term, "_:b" + std::to_string(names.size()));
    term = it->second;
  };
  for (Triple& t : triples) {
    rename(t.subject);
    if (t.object_kind == ObjectKind::kResource) rename(t.object);
  }
  return triples;
}

TEST(NTriples, MatchesReferenceParserOnFixture) {
  std::ifstream nt(kData + "/ntriples_100.nt", std::ios::binary);
  ASSERT_TRUE(nt);
  ParseReport report;
  auto parsed = CanonicalBlankNodes(
      ParseNTriples(nt, ParseOptions{.strict = true}, &report));
  EXPECT_EQ(report.lines, 100u);

  std::ifstream expected_file(kData + "/ntriples_100.expected.jsonl");
  ASSERT_TRUE(expected_file);
  std::vector<Triple> expected;
  std::string line;
  while (std::getline(expected_file, line)) {
    auto j = nlohmann::json::parse(line);
    expected.push_back(Triple{
        j["s"], j["p"], j["o"],
        j["kind"] == "literal" ? ObjectKind::kLiteral : ObjectKind::kResource});
  }
  ASSERT_EQ(parsed.size(), expected.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    EXPECT_EQ(parsed[i], expected[i]) << "statement " << i;
  }
}

TEST(EdgeTable, CsvRow) {
  std::istringstream in("a,p,b\n");
  auto t = ParseEdgeTable(in, EdgeTableOptions{});
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0], (Triple{"a", "p", "b", ObjectKind::kResource}));
}

TEST(EdgeTable, HeaderSkipped) {
  std::istringstream in("subject,predicate,object\na,p,b\nb,q,c\n");
  auto t = ParseEdgeTable(in, EdgeTableOptions{.has_header = true});
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].subject, "a");
}

TEST(EdgeTable, WrongColumnCountIsRowError) {
  std::istringstream in("a,p,b\na,p\n");
  try {
    ParseEdgeTable(in, EdgeTableOptions{.strict = true});
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("expected 3 columns"),
              std::string::npos);
  }
}

TEST(EdgeTable, NonStrictSkipsBadRows) {
  std::istringstream in("a,p,b\na,p\nc,q,d,e\nx,y,z\n");
  ParseReport report;
  auto t = ParseEdgeTable(in, EdgeTableOptions{}, &report);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(report.skipped.size(), 2u);
}

TEST(EdgeTable, QuotedCsvAndTsvAndTxt) {
  std::istringstream csv("\"a,1\",p,\"say \"\"hi\"\"\"\n");
  auto c = ParseEdgeTable(csv, EdgeTableOptions{});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].subject, "a,1");
  EXPECT_EQ(c[0].object, "say \"hi\"");

  std::istringstream tsv("a b\tp\tc\n");
  auto t = ParseEdgeTable(tsv, EdgeTableOptions{.format = InputFormat::kTsv});
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].subject, "a b");

  std::istringstream txt("a   p\tb\n");
  auto x = ParseEdgeTable(txt, EdgeTableOptions{.format = InputFormat::kTxt});
  ASSERT_EQ(x.size(), 1u);
  EXPECT_EQ(x[0].object, "b");
}

TEST(Vocabulary, SingleTripleFirstOccurrenceOrder) {
  std::vector<Triple> t{{"a", "p", "b", ObjectKind::kResource}};
  EncodedGraph g = BuildVocabulary(t, false);
  EXPECT_EQ(g.vocabulary.size(), 3u);
  EXPECT_EQ(*g.vocabulary.Find("a"), 0);
  EXPECT_EQ(*g.vocabulary.Find("p"), 1);
  EXPECT_EQ(*g.vocabulary.Find("b"), 2);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0], (EncodedEdge{0, 1, 2}));
}

TEST(Vocabulary, TwoTriplesThreeTokens) {
  std::vector<Triple> t{{"a", "p", "b", ObjectKind::kResource},
                        {"b", "p", "a", ObjectKind::kResource}};
  EncodedGraph g = BuildVocabulary(t, false);
  EXPECT_EQ(g.vocabulary.size(), 3u);
  EXPECT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.vocabulary.entity_count(), 2u);
  EXPECT_EQ(g.vocabulary.predicate_count(), 1u);
}

TEST(Vocabulary, LiteralDroppedByDefault) {
  std::vector<Triple> t{{"a", "p", "\"x\"", ObjectKind::kLiteral}};
  EncodedGraph g = BuildVocabulary(t, false);
  EXPECT_EQ(g.vocabulary.size(), 2u);
  EXPECT_TRUE(g.vocabulary.Find("a"));
  EXPECT_TRUE(g.vocabulary.Find("p"));
  EXPECT_TRUE(g.edges.empty());
  EXPECT_EQ(g.dropped_literals, 1u);

  EncodedGraph with = BuildVocabulary(t, true);
  EXPECT_EQ(with.vocabulary.size(), 3u);
  EXPECT_EQ(with.edges.size(), 1u);
}

TEST(Vocabulary, LiteralFixtureMatchesBruteForceCount) {
  std::mt19937_64 rng(20);
  std::vector<Triple> triples;
  for (int i = 0; i < 20; ++i) {
    const bool literal = rng() % 3 == 0;
    triples.push_back(Triple{
        "s" + std::to_string(rng() % 6), "p" + std::to_string(rng() % 3),
        literal ? "\"l" + std::to_string(rng() % 4) + "\""
                : "o" + std::to_string(rng() % 6),
        literal ? ObjectKind::kLiteral : ObjectKind::kResource});
  }
  std::size_t surviving = 0;
  for (const Triple& t : triples) {
    if (t.object_kind == ObjectKind::kResource) ++surviving;
  }
  EncodedGraph g = BuildVocabulary(triples, false);
  EXPECT_EQ(g.edges.size(), surviving);
  EXPECT_EQ(g.dropped_literals, triples.size() - surviving);
  for (std::size_t t = 0; t < g.vocabulary.size(); ++t) {
    EXPECT_NE(g.vocabulary.Lexical(static_cast<Token>(t)).front(), '"');
  }
}

TEST(Vocabulary, EmptyInputIsError) {
  std::vector<Triple> none;
  try {
    BuildVocabulary(none, false);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("empty graph"), std::string::npos);
  }
}

TEST(Vocabulary, SharedTokenSpaceForPredicateAlsoEntity) {
  std::vector<Triple> t{{"a", "p", "b", ObjectKind::kResource},
                        {"p", "q", "a", ObjectKind::kResource}};
  EncodedGraph g = BuildVocabulary(t, false);
  EXPECT_EQ(g.vocabulary.size(), 4u);
  const Token p = *g.vocabulary.Find("p");
  EXPECT_TRUE(g.vocabulary.IsEntity(p));
  EXPECT_TRUE(g.vocabulary.IsPredicate(p));
}

TEST(Vocabulary, RoundTripInvariantAndDeterminism) {
  std::ifstream nt(kData + "/ntriples_100.nt", std::ios::binary);
  auto triples = ParseNTriples(nt);
  EncodedGraph a = BuildVocabulary(triples, true);
  EncodedGraph b = BuildVocabulary(triples, true);
  EXPECT_EQ(a.vocabulary, b.vocabulary);
  EXPECT_EQ(a.edges, b.edges);
  for (std::size_t t = 0; t < a.vocabulary.size(); ++t) {
    const Token tok = static_cast<Token>(t);
    EXPECT_EQ(*a.vocabulary.Find(a.vocabulary.Lexical(tok)), tok);
  }
  EXPECT_FALSE(a.vocabulary.Find("-1"));
}

TEST(Vocabulary, EdgeCountAccounting) {
  // |edges| == |triples| - |dropped literals| - |skipped lines|.
  std::ifstream nt(kData + "/ntriples_100.nt", std::ios::binary);
  std::stringstream text;
  text << nt.rdbuf() << "this line is broken\n<a> <b> .\n";
  ParseReport report;
  auto triples = ParseNTriples(text, ParseOptions{}, &report);
  EncodedGraph g = BuildVocabulary(triples, false);
  const std::size_t statements = triples.size() + report.skipped.size();
  EXPECT_EQ(report.skipped.size(), 2u);
  EXPECT_EQ(g.edges.size(),
            statements - g.dropped_literals - report.skipped.size());
}

TEST(Vocabulary, TsvRoundTrip) {
  std::vector<Triple> t{{"a", "p", "b", ObjectKind::kResource},
                        {"b", "q", "c d", ObjectKind::kResource}};
  EncodedGraph g = BuildVocabulary(t, false);
  g.vocabulary.SetFrequencies({3, 1, 2, 1, 1});
  std::stringstream buf;
  g.vocabulary.WriteTsv(buf);
  Vocabulary back = Vocabulary::ReadTsv(buf);
  EXPECT_EQ(back, g.vocabulary);
  EXPECT_EQ(back.frequency(), g.vocabulary.frequency());
}

TEST(Formats, ExtensionAndNames) {
  EXPECT_EQ(FormatFromExtension("x.nt"), InputFormat::kNTriples);
  EXPECT_EQ(FormatFromExtension("x.csv"), InputFormat::kCsv);
  EXPECT_EQ(FormatFromExtension("x.parquet"), InputFormat::kParquet);
  EXPECT_FALSE(FormatFromExtension("x.unknown"));
  EXPECT_EQ(ParseInputFormat("tsv"), InputFormat::kTsv);
  EXPECT_THROW(ParseInputFormat("xml"), ConfigError);
}

}  // namespace
}  // namespace rdf2vec
