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

// word2vec training on a walk corpus: skip-gram and CBOW, both with uniform
// negative sampling, trained by row-sparse Adam.

#ifndef RDF2VEC_W2V_H_
#define RDF2VEC_W2V_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rdf2vec/common.h"
#include "rdf2vec/walks.h"

namespace rdf2vec {

enum class ModelKind { kSkipGram, kCbow };

ModelKind ParseModelKind(std::string_view name);
std::string_view ModelKindName(ModelKind kind);

using Rng = std::mt19937_64;

// Cooperative cancellation for long stages.
struct RunControl {
  std::optional<std::chrono::steady_clock::time_point> deadline;

  // Throws TimeoutError once the deadline has passed.
  void Check() const;
};

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<Real> row(std::size_t r) {
    return std::span<Real>(data_).subspan(r * cols_, cols_);
  }
  std::span<const Real> row(std::size_t r) const {
    return std::span<const Real>(data_).subspan(r * cols_, cols_);
  }
  std::span<Real> data() { return data_; }
  std::span<const Real> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

struct TrainingPair {
  Token center;
  Token context;

  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

struct EmbeddingModel {
  Matrix input;
  Matrix output;
  // Rows touched by at least one batch. Untouched rows keep their
  // initialization bit for bit.
  std::vector<std::uint8_t> trained_mask;

  std::size_t vocab_size() const { return input.rows(); }
  std::size_t dim() const { return input.cols(); }
};

struct TrainConfig {
  ModelKind model = ModelKind::kSkipGram;
  int dim = 100;
  int epochs = 5;
  // Symmetric context radius. CBOW also draws this many negatives.
  int window_size = 5;
  // Negatives per pair for skip-gram.
  int negative_samples = 5;
  double learning_rate = 0.01;
  int min_count = 10;
  // nullopt selects SuggestBatchSize.
  std::optional<std::size_t> batch_size;
  int workers = 1;
  // Multi-worker runs merge replica updates every sync_interval_ms of wall
  // clock, or every sync_every_batches batches per worker when
  // `reproducible` is set.
  int sync_interval_ms = 500;
  int sync_every_batches = 16;
  bool reproducible = false;
  // 0 means physical memory of the host.
  std::uint64_t memory_budget_bytes = 0;
  double memory_cap_fraction = 0.9;
  bool use_sparse = true;

  // Throws ConfigError naming the offending field.
  void Validate() const;
};

// Walks with min_count-filtered tokens removed, plus the frequency table
// counted over the unfiltered corpus.
struct TrainingSet {
  std::size_t vocab_size = 0;
  std::vector<std::uint64_t> frequency;
  // Tokens with frequency >= min_count, ascending.
  std::vector<Token> surviving;
  std::vector<Token> tokens;
  std::vector<std::size_t> offsets;

  std::size_t sequence_count() const { return offsets.size() - 1; }
  std::span<const Token> sequence(std::size_t i) const {
    return std::span<const Token>(tokens).subspan(offsets[i],
                                                  offsets[i + 1] - offsets[i]);
  }
};

// Throws DataError("empty training set") if min_count leaves no token, or
// DataError("empty corpus") if the corpus has no walks.
TrainingSet FilterCorpus(const WalkCorpus& corpus, std::size_t vocab_size,
                         int min_count);

// All (tokens[i], tokens[j]) with j != i and |i - j| <= window, in walk then
// position order.
std::vector<TrainingPair> MakeSkipGramPairs(const TrainingSet& set,
                                            int window_size);

// Filters then windows. Throws DataError("empty training set") when no
// token survives min_count.
std::vector<TrainingPair> GeneratePairs(const WalkCorpus& corpus,
                                        std::size_t vocab_size,
                                        int window_size, int min_count,
                                        std::vector<std::uint64_t>* frequency =
                                            nullptr);

// Position of a CBOW target inside a TrainingSet sequence.
struct CbowSlot {
  std::uint32_t sequence;
  std::uint32_t position;
};

// Every position whose window holds at least one other token.
std::vector<CbowSlot> MakeCbowSlots(const TrainingSet& set, int window_size);

struct CbowInstance {
  std::vector<Token> context;
  Token target;
};

CbowInstance CbowInstanceAt(const TrainingSet& set, CbowSlot slot,
                            int window_size);

// Both matrices i.i.d. uniform on the open interval (-1/d, 1/d).
EmbeddingModel InitEmbeddings(std::size_t vocab_size, int dim,
                              std::uint64_t seed);

// `count` i.i.d. tokens uniform over [0, vocab_size).
std::vector<Token> SampleNegatives(std::size_t count, std::size_t vocab_size,
                                   Rng& rng);

// Row gradients for one matrix, stored only for touched rows.
class SparseRows {
 public:
  void Reset(std::size_t vocab_size, std::size_t dim);

  // Zero-initialized on first access.
  std::span<Real> Row(Token token);

  std::span<const Token> touched() const { return rows_; }
  std::span<const Real> Get(std::size_t i) const {
    return std::span<const Real>(values_).subspan(i * dim_, dim_);
  }
  std::size_t dim() const { return dim_; }
  void Clear();

 private:
  std::size_t dim_ = 0;
  std::vector<std::int32_t> slot_;
  std::vector<Token> rows_;
  std::vector<Real> values_;
};

struct BatchGradients {
  SparseRows input;
  SparseRows output;

  void Reset(std::size_t vocab_size, std::size_t dim) {
    input.Reset(vocab_size, dim);
    output.Reset(vocab_size, dim);
  }
  void Clear() {
    input.Clear();
    output.Clear();
  }
};

// Mean over the batch of
//   BCE(<in[c], out[ctx]>, 1) + sum_j BCE(<in[c], out[n_j]>, 0).
// `negatives` holds k tokens per pair, row-major. If `grads` is non-null it
// receives the gradient of the returned mean (accumulated, not cleared).
double SgnsBatchLoss(const EmbeddingModel& model,
                     std::span<const TrainingPair> batch,
                     std::span<const Token> negatives, int k,
                     BatchGradients* grads = nullptr);

// Mean over the batch of
//   BCE(<c, out[t]>, 1) + sum_j BCE(<c, out[n_j]>, 0)
// where c is the mean of the context rows of the input matrix. Throws
// DataError on an instance with an empty context.
double CbowBatchLoss(const EmbeddingModel& model,
                     std::span<const CbowInstance> batch,
                     std::span<const Token> negatives, int k,
                     BatchGradients* grads = nullptr);

struct AdamParams {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam moments for one matrix. Sparse mode advances moments of gradient
// rows only; dense mode treats every other row as a zero gradient.
class RowAdam {
 public:
  RowAdam() = default;
  RowAdam(std::size_t rows, std::size_t dim, bool sparse);

  // One optimizer step. Increments the step counter.
  void Step(Matrix& param, const SparseRows& grad, const AdamParams& params);

  std::int64_t steps() const { return step_; }
  bool sparse() const { return sparse_; }

 private:
  bool sparse_ = true;
  std::int64_t step_ = 0;
  Matrix m_;
  Matrix v_;
  std::vector<std::uint8_t> has_grad_;
};

struct OptimizerState {
  RowAdam input;
  RowAdam output;

  OptimizerState() = default;
  OptimizerState(std::size_t rows, std::size_t dim, bool sparse)
      : input(rows, dim, sparse), output(rows, dim, sparse) {}
};

void ApplySparseUpdate(EmbeddingModel& model, const BatchGradients& grads,
                       OptimizerState& state, const AdamParams& params);

// min(floor(budget / (4 * per_sample)), ceil(pairs / 20)), at least 1.
std::size_t SuggestBatchSize(std::uint64_t per_sample_bytes,
                             std::uint64_t memory_budget_bytes,
                             std::uint64_t corpus_pair_count);

// Estimated working-set bytes of one training instance.
std::uint64_t PerSampleBytes(const TrainConfig& config);

// Bytes held by parameters plus optimizer moments, per model replica.
std::uint64_t ModelBytes(std::size_t vocab_size, int dim);

// Total physical memory, or 0 when it cannot be determined.
std::uint64_t PhysicalMemoryBytes();

struct TrainResult {
  EmbeddingModel model;
  std::vector<double> epoch_loss;
  std::size_t batch_size = 0;
  std::size_t instances = 0;
  // Memory-guard and configuration notices, in order.
  std::vector<std::string> events;
  double seconds = 0.0;
};

// Runs config.epochs passes over shuffled batches, drawing fresh negatives
// for every batch. Throws DataError("empty training set") when nothing is
// left to train on and DivergenceError on a non-finite batch loss.
TrainResult Train(const WalkCorpus& corpus, std::size_t vocab_size,
                  const TrainConfig& config, std::uint64_t seed,
                  const RunControl* control = nullptr);

// word2vec text format: "<count> <dim>" then "<lexical> <d values>".
void WriteWord2VecText(std::ostream& out, const Matrix& vectors,
                       std::span<const std::string> lexicals);
struct LoadedEmbeddings {
  std::vector<std::string> lexicals;
  Matrix vectors;
};
LoadedEmbeddings ReadWord2VecText(std::istream& in);

// "<lexical>\t<v1>\t...\t<vd>" per row, no header.
void WriteEmbeddingsTsv(std::ostream& out, const Matrix& vectors,
                        std::span<const std::string> lexicals);

// CSV with header "epoch,loss", epochs numbered from 1.
void WriteLossCsv(std::ostream& out, std::span<const double> losses);

}  // namespace rdf2vec

#endif  // RDF2VEC_W2V_H_
