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

#ifndef RDF2VEC_COMMON_H_
#define RDF2VEC_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace rdf2vec {

// Vocabulary token. Entities and predicates share one token space.
using Token = std::int32_t;

// Filler for early-terminated positions inside fixed-length walk buffers.
// Never a vocabulary token and never emitted in a corpus.
inline constexpr Token kPad = -1;

using Real = double;

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message)
      : std::runtime_error(message), full_(message) {}

  // Pipeline stage that raised the error ("ingest", "walks", ...); empty
  // outside the pipeline.
  const std::string& stage() const { return stage_; }
  void set_stage(std::string stage) {
    stage_ = std::move(stage);
    full_ = stage_ + ": " + std::runtime_error::what();
  }

  const char* what() const noexcept override { return full_.c_str(); }

 private:
  std::string stage_;
  std::string full_;
};

// Bad or inconsistent input data (exit code 2).
class DataError : public Error {
 public:
  using Error::Error;
};

// Recoverable parse failure pointing at a line (or row) of the input.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& message);

  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

// Invalid configuration or argument.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Resource limits (memory, time guards) (exit code 3).
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A run exceeded its wall-clock deadline.
class TimeoutError : public ResourceError {
 public:
  using ResourceError::ResourceError;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(int epoch, std::size_t batch);

  int epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }

 private:
  int epoch_;
  std::size_t batch_;
};

}  // namespace rdf2vec

#endif  // RDF2VEC_COMMON_H_
