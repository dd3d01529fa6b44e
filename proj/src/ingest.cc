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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include <fmt/format.h>

namespace rdf2vec {

ParseError::ParseError(std::size_t line, const std::string& message)
    : DataError(fmt::format("line {}: {}", line, message)),
      line_(line),
      detail_(message) {}

DivergenceError::DivergenceError(int epoch, std::size_t batch)
    : Error(fmt::format("divergence: non-finite loss at epoch {} batch {}",
                        epoch, batch)),
      epoch_(epoch),
      batch_(batch) {}

InputFormat ParseInputFormat(std::string_view name) {
  if (name == "nt") return InputFormat::kNTriples;
  if (name == "csv") return InputFormat::kCsv;
  if (name == "tsv") return InputFormat::kTsv;
  if (name == "txt") return InputFormat::kTxt;
  if (name == "parquet") return InputFormat::kParquet;
  if (name == "orc") return InputFormat::kOrc;
  throw ConfigError(fmt::format("unknown input format '{}'", name));
}

std::string_view InputFormatName(InputFormat format) {
  switch (format) {
    case InputFormat::kNTriples: return "nt";
    case InputFormat::kCsv: return "csv";
    case InputFormat::kTsv: return "tsv";
    case InputFormat::kTxt: return "txt";
    case InputFormat::kParquet: return "parquet";
    case InputFormat::kOrc: return "orc";
  }
  return "?";
}

std::optional<InputFormat> FormatFromExtension(
    const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".nt") return InputFormat::kNTriples;
  if (ext == ".csv") return InputFormat::kCsv;
  if (ext == ".tsv") return InputFormat::kTsv;
  if (ext == ".txt") return InputFormat::kTxt;
  if (ext == ".parquet") return InputFormat::kParquet;
  if (ext == ".orc") return InputFormat::kOrc;
  return std::nullopt;
}

namespace {

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\r'; }

void AppendUtf8(std::uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Cursor over a single N-Triples statement.
class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_number)
      : s_(line), line_(line_number) {}

  void SkipSpace() {
    while (pos_ < s_.size() && IsSpace(s_[pos_])) ++pos_;
  }

  bool AtEnd() const { return pos_ >= s_.size(); }
  char Peek() const { return AtEnd() ? '\0' : s_[pos_]; }

  [[noreturn]] void Fail(std::string_view what) const {
    throw ParseError(line_, fmt::format("{} at column {}", what, pos_ + 1));
  }

  std::string Iri() {
    if (Peek() != '<') Fail("expected '<'");
    ++pos_;
    std::string out;
    while (true) {
      if (AtEnd()) Fail("unterminated IRI");
      char c = s_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '\\') {
        ++pos_;
        char e = Peek();
        if (e == 'u' || e == 'U') {
          ++pos_;
          AppendUtf8(Hex(e == 'u' ? 4 : 8), out);
          continue;
        }
        Fail("invalid escape in IRI");
      }
      if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' ||
          c == '{' || c == '}' || c == '|' || c == '^' || c == '`') {
        Fail("invalid character in IRI");
      }
      out.push_back(c);
      ++pos_;
    }
    if (out.empty()) Fail("empty IRI");
    return out;
  }

  std::string BlankNode() {
    if (s_.substr(pos_, 2) != "_:") Fail("expected blank node");
    std::size_t start = pos_;
    pos_ += 2;
    while (!AtEnd() && !IsSpace(s_[pos_]) && s_[pos_] != '<' &&
           s_[pos_] != '"') {
      ++pos_;
    }
    // A trailing '.' belongs to the statement terminator, not the label.
    while (pos_ > start + 2 && s_[pos_ - 1] == '.') --pos_;
    if (pos_ == start + 2) Fail("empty blank node label");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string Literal() {
    ++pos_;  // opening quote
    std::string out = "\"";
    while (true) {
      if (AtEnd()) Fail("unterminated literal");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (AtEnd()) Fail("dangling escape");
      char e = s_[pos_++];
      switch (e) {
        case 't': out.push_back('\t'); break;
        case 'b': out.push_back('\b'); break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case 'f': out.push_back('\f'); break;
        case '"': out.push_back('"'); break;
        case '\'': out.push_back('\''); break;
        case '\\': out.push_back('\\'); break;
        case 'u': AppendUtf8(Hex(4), out); break;
        case 'U': AppendUtf8(Hex(8), out); break;
        default: --pos_; Fail("invalid escape in literal");
      }
    }
    out.push_back('"');
    if (Peek() == '@') {
      ++pos_;
      std::size_t start = pos_;
      while (!AtEnd() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                          s_[pos_] == '-')) {
        ++pos_;
      }
      if (pos_ == start) Fail("empty language tag");
    } else if (s_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      Iri();
    }
    return out;
  }

  // Statement terminator, optionally followed by a comment.
  void Terminator() {
    SkipSpace();
    if (Peek() != '.') Fail("expected '.'");
    ++pos_;
    SkipSpace();
    if (!AtEnd() && Peek() != '#') Fail("trailing characters after '.'");
  }

 private:
  std::uint32_t Hex(int digits) {
    if (pos_ + digits > s_.size()) Fail("truncated \\u escape");
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_,
                                     s_.data() + pos_ + digits, value, 16);
    if (ec != std::errc() || ptr != s_.data() + pos_ + digits) {
      Fail("invalid \\u escape");
    }
    pos_ += digits;
    return value;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

template <typename LineFn>
ParseReport ForEachLine(std::istream& in, bool strict, LineFn&& fn) {
  ParseReport report;
  std::string line;
  while (std::getline(in, line)) {
    ++report.lines;
    try {
      if (fn(line, report.lines)) ++report.triples;
    } catch (const ParseError& e) {
      if (strict) throw;
      report.skipped.push_back(e);
    }
  }
  return report;
}

std::vector<std::string> SplitCsv(std::string_view row, char delimiter,
                                  std::size_t line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < row.size(); ++i) {
    char c = row[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < row.size() && row[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError(line, "unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

std::vector<std::string> SplitWhitespace(std::string_view row) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (i < row.size()) {
    while (i < row.size() && std::isspace(static_cast<unsigned char>(row[i])))
      ++i;
    std::size_t start = i;
    while (i < row.size() && !std::isspace(static_cast<unsigned char>(row[i])))
      ++i;
    if (i > start) fields.emplace_back(row.substr(start, i - start));
  }
  return fields;
}

bool IsBlank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c));
  });
}

}  // namespace

std::optional<Triple> ParseNTriplesLine(std::string_view line,
                                        std::size_t line_number) {
  LineParser p(line, line_number);
  p.SkipSpace();
  if (p.AtEnd() || p.Peek() == '#') return std::nullopt;

  Triple t;
  t.subject = p.Peek() == '<' ? p.Iri() : p.BlankNode();
  p.SkipSpace();
  t.predicate = p.Iri();
  p.SkipSpace();
  switch (p.Peek()) {
    case '<': t.object = p.Iri(); break;
    case '_': t.object = p.BlankNode(); break;
    case '"':
      t.object = p.Literal();
      t.object_kind = ObjectKind::kLiteral;
      break;
    default: p.Fail("expected object");
  }
  p.Terminator();
  return t;
}

ParseReport ParseNTriples(std::istream& in, const TripleSink& sink,
                          const ParseOptions& options) {
  return ForEachLine(in, options.strict,
                     [&](const std::string& line, std::size_t n) {
                       auto triple = ParseNTriplesLine(line, n);
                       if (!triple) return false;
                       sink(std::move(*triple));
                       return true;
                     });
}

std::vector<Triple> ParseNTriples(std::istream& in,
                                  const ParseOptions& options,
                                  ParseReport* report) {
  std::vector<Triple> out;
  ParseReport r =
      ParseNTriples(in, [&](Triple&& t) { out.push_back(std::move(t)); },
                    options);
  if (report != nullptr) *report = std::move(r);
  return out;
}

ParseReport ParseEdgeTable(std::istream& in, const TripleSink& sink,
                           const EdgeTableOptions& options) {
  char delimiter = '\0';
  switch (options.format) {
    case InputFormat::kCsv: delimiter = ','; break;
    case InputFormat::kTsv: delimiter = '\t'; break;
    case InputFormat::kTxt: break;
    default:
      throw ConfigError(fmt::format("'{}' is not an edge-table format",
                                    InputFormatName(options.format)));
  }
  bool header_pending = options.has_header;
  return ForEachLine(
      in, options.strict, [&](std::string& line, std::size_t n) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (IsBlank(line)) return false;
        if (header_pending) {
          header_pending = false;
          return false;
        }
        std::vector<std::string> fields = delimiter == '\0'
                                              ? SplitWhitespace(line)
                                              : SplitCsv(line, delimiter, n);
        if (fields.size() != 3) {
          throw ParseError(n, fmt::format("expected 3 columns, got {}",
                                          fields.size()));
        }
        for (const std::string& f : fields) {
          if (f.empty()) throw ParseError(n, "empty column");
        }
        sink(Triple{std::move(fields[0]), std::move(fields[1]),
                    std::move(fields[2]), ObjectKind::kResource});
        return true;
      });
}

std::vector<Triple> ParseEdgeTable(std::istream& in,
                                   const EdgeTableOptions& options,
                                   ParseReport* report) {
  std::vector<Triple> out;
  ParseReport r = ParseEdgeTable(
      in, [&](Triple&& t) { out.push_back(std::move(t)); }, options);
  if (report != nullptr) *report = std::move(r);
  return out;
}

Token Vocabulary::Intern(std::string_view lexical) {
  std::string key(lexical);
  auto [it, inserted] =
      token_of_.try_emplace(key, static_cast<Token>(lexical_of_.size()));
  if (inserted) {
    lexical_of_.push_back(std::move(key));
    is_entity_.push_back(0);
    is_predicate_.push_back(0);
  }
  return it->second;
}

std::optional<Token> Vocabulary::Find(std::string_view lexical) const {
  auto it = token_of_.find(std::string(lexical));
  if (it == token_of_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::Lexical(Token token) const {
  if (token < 0 || static_cast<std::size_t>(token) >= lexical_of_.size()) {
    throw DataError(fmt::format("token {} out of range", token));
  }
  return lexical_of_[token];
}

void Vocabulary::MarkEntity(Token token) {
  if (!is_entity_[token]) {
    is_entity_[token] = 1;
    ++entity_count_;
  }
}

void Vocabulary::MarkPredicate(Token token) {
  if (!is_predicate_[token]) {
    is_predicate_[token] = 1;
    ++predicate_count_;
  }
}

std::vector<Token> Vocabulary::EntityTokens() const {
  std::vector<Token> out;
  out.reserve(entity_count_);
  for (std::size_t t = 0; t < is_entity_.size(); ++t) {
    if (is_entity_[t]) out.push_back(static_cast<Token>(t));
  }
  return out;
}

void Vocabulary::SetFrequencies(std::vector<std::uint64_t> frequency) {
  if (frequency.size() != size()) {
    throw DataError("frequency table does not match vocabulary size");
  }
  frequency_ = std::move(frequency);
}

void Vocabulary::WriteTsv(std::ostream& out) const {
  for (std::size_t t = 0; t < lexical_of_.size(); ++t) {
    std::string roles;
    if (is_entity_[t]) roles += 'e';
    if (is_predicate_[t]) roles += 'p';
    if (roles.empty()) roles = "-";
    std::uint64_t freq = frequency_.empty() ? 0 : frequency_[t];
    out << t << '\t' << lexical_of_[t] << '\t' << roles << '\t' << freq
        << '\n';
  }
}

Vocabulary Vocabulary::ReadTsv(std::istream& in) {
  Vocabulary vocab;
  std::vector<std::uint64_t> freq;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    // Lexical keys may contain tabs only in pathological literals; split on
    // the first and the last two tabs.
    std::size_t a = line.find('\t');
    std::size_t c = line.rfind('\t');
    std::size_t b = c == std::string::npos ? c : line.rfind('\t', c - 1);
    if (a == std::string::npos || b == std::string::npos || b <= a) {
      throw ParseError(n, "expected 4 tab-separated columns");
    }
    Token token = 0;
    std::string_view head(line.data(), a);
    auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(),
                                     token);
    if (ec != std::errc() || token != static_cast<Token>(vocab.size())) {
      throw ParseError(n, "tokens must be contiguous from 0");
    }
    Token got = vocab.Intern(std::string_view(line).substr(a + 1, b - a - 1));
    if (got != token) throw ParseError(n, "duplicate lexical key");
    std::string_view roles = std::string_view(line).substr(b + 1, c - b - 1);
    if (roles.find('e') != std::string_view::npos) vocab.MarkEntity(token);
    if (roles.find('p') != std::string_view::npos) vocab.MarkPredicate(token);
    std::uint64_t f = 0;
    std::string_view tail = std::string_view(line).substr(c + 1);
    std::from_chars(tail.data(), tail.data() + tail.size(), f);
    freq.push_back(f);
  }
  if (std::any_of(freq.begin(), freq.end(), [](auto f) { return f != 0; })) {
    vocab.SetFrequencies(std::move(freq));
  }
  return vocab;
}

void VocabularyBuilder::Add(const Triple& triple) {
  ++triples_seen_;
  Vocabulary& v = result_.vocabulary;
  Token s = v.Intern(triple.subject);
  v.MarkEntity(s);
  Token p = v.Intern(triple.predicate);
  v.MarkPredicate(p);
  if (triple.object_kind == ObjectKind::kLiteral && !include_literals_) {
    ++result_.dropped_literals;
    return;
  }
  Token o = v.Intern(triple.object);
  v.MarkEntity(o);
  result_.edges.push_back({s, p, o});
}

EncodedGraph VocabularyBuilder::Finish() && {
  if (triples_seen_ == 0) throw DataError("empty graph");
  return std::move(result_);
}

EncodedGraph BuildVocabulary(std::span<const Triple> triples,
                             bool include_literals) {
  VocabularyBuilder builder(include_literals);
  for (const Triple& t : triples) builder.Add(t);
  return std::move(builder).Finish();
}

}  // namespace rdf2vec
