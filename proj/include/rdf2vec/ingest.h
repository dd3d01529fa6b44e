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

// Parsing of N-Triples and delimited edge tables into raw triples, and
// tokenization of those triples into an integer vocabulary.

#ifndef RDF2VEC_INGEST_H_
#define RDF2VEC_INGEST_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rdf2vec/common.h"

namespace rdf2vec {

enum class ObjectKind : std::uint8_t { kResource, kLiteral };

// One RDF statement. IRIs carry no angle brackets, blank nodes keep their
// "_:label" form and literals are stored as their quoted lexical form with
// datatype and language tags dropped, e.g. "\"42\"".
struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;
  ObjectKind object_kind = ObjectKind::kResource;

  friend bool operator==(const Triple&, const Triple&) = default;
};

enum class InputFormat { kNTriples, kCsv, kTsv, kTxt, kParquet, kOrc };

// Parses "nt", "csv", "tsv", "txt" (and recognizes "parquet"/"orc" so they
// can be rejected explicitly). Throws ConfigError on anything else.
InputFormat ParseInputFormat(std::string_view name);
std::string_view InputFormatName(InputFormat format);

// Guesses the format from a file extension; nullopt if unknown.
std::optional<InputFormat> FormatFromExtension(const std::filesystem::path& path);

struct ParseOptions {
  // Abort on the first malformed line instead of skipping it.
  bool strict = false;
};

struct ParseReport {
  std::size_t lines = 0;
  std::size_t triples = 0;
  // Malformed lines that were skipped (non-strict mode only).
  std::vector<ParseError> skipped;
};

using TripleSink = std::function<void(Triple&&)>;

// Parses one N-Triples line. Returns nullopt for blank and comment lines.
// Throws ParseError carrying `line_number` on malformed input.
std::optional<Triple> ParseNTriplesLine(std::string_view line,
                                        std::size_t line_number);

// Streams every statement of `in` into `sink` in input order.
ParseReport ParseNTriples(std::istream& in, const TripleSink& sink,
                          const ParseOptions& options = {});
std::vector<Triple> ParseNTriples(std::istream& in,
                                  const ParseOptions& options = {},
                                  ParseReport* report = nullptr);

// Delimited three-column edge tables. csv uses ',', tsv uses '\t', txt
// splits on runs of whitespace. Every object is a resource.
struct EdgeTableOptions {
  InputFormat format = InputFormat::kCsv;
  bool has_header = false;
  bool strict = false;
};

ParseReport ParseEdgeTable(std::istream& in, const TripleSink& sink,
                           const EdgeTableOptions& options);
std::vector<Triple> ParseEdgeTable(std::istream& in,
                                   const EdgeTableOptions& options,
                                   ParseReport* report = nullptr);

// Bijection between lexical keys and contiguous tokens 0..size()-1.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Returns the token for `lexical`, assigning the next free one on first
  // sight.
  Token Intern(std::string_view lexical);

  std::optional<Token> Find(std::string_view lexical) const;
  const std::string& Lexical(Token token) const;

  std::size_t size() const { return lexical_of_.size(); }
  bool empty() const { return lexical_of_.empty(); }

  void MarkEntity(Token token);
  void MarkPredicate(Token token);
  bool IsEntity(Token token) const { return is_entity_[token] != 0; }
  bool IsPredicate(Token token) const { return is_predicate_[token] != 0; }

  // Tokens seen as subject or object.
  std::size_t entity_count() const { return entity_count_; }
  // Tokens seen as predicate. A token may count as both.
  std::size_t predicate_count() const { return predicate_count_; }

  std::vector<Token> EntityTokens() const;

  // Occurrence counts in the walk corpus; empty until SetFrequencies.
  const std::vector<std::uint64_t>& frequency() const { return frequency_; }
  void SetFrequencies(std::vector<std::uint64_t> frequency);

  const std::vector<std::string>& lexicals() const { return lexical_of_; }

  // Tab-separated "token lexical roles frequency" rows, one per token in
  // token order. roles is a subset of "ep" or "-".
  void WriteTsv(std::ostream& out) const;
  static Vocabulary ReadTsv(std::istream& in);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.lexical_of_ == b.lexical_of_ && a.is_entity_ == b.is_entity_ &&
           a.is_predicate_ == b.is_predicate_;
  }

 private:
  std::unordered_map<std::string, Token> token_of_;
  std::vector<std::string> lexical_of_;
  std::vector<std::uint8_t> is_entity_;
  std::vector<std::uint8_t> is_predicate_;
  std::size_t entity_count_ = 0;
  std::size_t predicate_count_ = 0;
  std::vector<std::uint64_t> frequency_;
};

struct EncodedEdge {
  Token source;
  Token predicate;
  Token target;

  friend bool operator==(const EncodedEdge&, const EncodedEdge&) = default;
};

struct EncodedGraph {
  Vocabulary vocabulary;
  std::vector<EncodedEdge> edges;
  std::size_t dropped_literals = 0;
};

// Tokenizes triples in first-occurrence order (subject, predicate, object).
// Literal-object triples are dropped unless `include_literals`; their
// subject and predicate are still tokenized. Throws DataError("empty graph")
// on empty input.
EncodedGraph BuildVocabulary(std::span<const Triple> triples,
                             bool include_literals);

// Streaming form used when merging several inputs.
class VocabularyBuilder {
 public:
  explicit VocabularyBuilder(bool include_literals)
      : include_literals_(include_literals) {}

  void Add(const Triple& triple);
  std::size_t triples_seen() const { return triples_seen_; }

  // Throws DataError("empty graph") if nothing was added.
  EncodedGraph Finish() &&;

 private:
  bool include_literals_;
  std::size_t triples_seen_ = 0;
  EncodedGraph result_;
};

}  // namespace rdf2vec

#endif  // RDF2VEC_INGEST_H_
