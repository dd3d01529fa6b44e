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

#include "rdf2vec/w2v.h"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace rdf2vec {

ModelKind ParseModelKind(std::string_view name) {
  if (name == "skipgram") return ModelKind::kSkipGram;
  if (name == "cbow") return ModelKind::kCbow;
  throw ConfigError(fmt::format("embedding_model: unknown model '{}'", name));
}

std::string_view ModelKindName(ModelKind kind) {
  return kind == ModelKind::kSkipGram ? "skipgram" : "cbow";
}

void RunControl::Check() const {
  if (deadline && std::chrono::steady_clock::now() >= *deadline) {
    throw TimeoutError("deadline exceeded");
  }
}

void TrainConfig::Validate() const {
  auto require = [](bool ok, std::string_view field, std::string_view rule) {
    if (!ok) throw ConfigError(fmt::format("{}: must be {}", field, rule));
  };
  require(dim >= 1, "vector_size", ">= 1");
  require(epochs >= 1, "epochs", ">= 1");
  require(window_size >= 1, "window_size", ">= 1");
  require(negative_samples >= 1, "negative_samples", ">= 1");
  require(learning_rate >= 0.0 && std::isfinite(learning_rate),
          "learning_rate", "finite and >= 0");
  require(min_count >= 0, "min_count", ">= 0");
  require(!batch_size || *batch_size >= 1, "batch_size", ">= 1");
  require(workers >= 1, "workers", ">= 1");
  require(sync_interval_ms >= 1, "sync_interval_ms", ">= 1");
  require(sync_every_batches >= 1, "sync_every_batches", ">= 1");
  require(memory_cap_fraction > 0.0 && memory_cap_fraction <= 1.0,
          "memory_cap_fraction", "in (0, 1]");
}

TrainingSet FilterCorpus(const WalkCorpus& corpus, std::size_t vocab_size,
                         int min_count) {
  if (corpus.empty()) throw DataError("empty corpus");
  TrainingSet set;
  set.vocab_size = vocab_size;
  set.frequency.assign(vocab_size, 0);
  for (Token t : corpus.tokens()) {
    if (t < 0 || static_cast<std::size_t>(t) >= vocab_size) {
      throw DataError(fmt::format("corpus token {} outside vocabulary", t));
    }
    ++set.frequency[t];
  }
  const auto threshold = static_cast<std::uint64_t>(std::max(0, min_count));
  std::vector<std::uint8_t> keep(vocab_size, 0);
  for (std::size_t t = 0; t < vocab_size; ++t) {
    if (set.frequency[t] > 0 && set.frequency[t] >= threshold) {
      keep[t] = 1;
      set.surviving.push_back(static_cast<Token>(t));
    }
  }
  if (set.surviving.empty()) throw DataError("empty training set");

  set.offsets.reserve(corpus.size() + 1);
  set.offsets.push_back(0);
  set.tokens.reserve(corpus.total_tokens());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (Token t : corpus.walk(i)) {
      if (keep[t]) set.tokens.push_back(t);
    }
    set.offsets.push_back(set.tokens.size());
  }
  return set;
}

std::vector<TrainingPair> MakeSkipGramPairs(const TrainingSet& set,
                                            int window_size) {
  std::vector<TrainingPair> pairs;
  const auto w = static_cast<std::size_t>(window_size);
  for (std::size_t s = 0; s < set.sequence_count(); ++s) {
    auto seq = set.sequence(s);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const std::size_t lo = i > w ? i - w : 0;
      const std::size_t hi = std::min(seq.size() - 1, i + w);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j != i) pairs.push_back({seq[i], seq[j]});
      }
    }
  }
  return pairs;
}

std::vector<TrainingPair> GeneratePairs(const WalkCorpus& corpus,
                                        std::size_t vocab_size,
                                        int window_size, int min_count,
                                        std::vector<std::uint64_t>* frequency) {
  TrainingSet set = FilterCorpus(corpus, vocab_size, min_count);
  if (frequency != nullptr) *frequency = set.frequency;
  return MakeSkipGramPairs(set, window_size);
}

std::vector<CbowSlot> MakeCbowSlots(const TrainingSet& set, int window_size) {
  (void)window_size;  // any window >= 1 reaches a neighbour
  std::vector<CbowSlot> slots;
  for (std::size_t s = 0; s < set.sequence_count(); ++s) {
    const std::size_t len = set.offsets[s + 1] - set.offsets[s];
    if (len < 2) continue;
    for (std::size_t i = 0; i < len; ++i) {
      slots.push_back({static_cast<std::uint32_t>(s),
                       static_cast<std::uint32_t>(i)});
    }
  }
  return slots;
}

CbowInstance CbowInstanceAt(const TrainingSet& set, CbowSlot slot,
                            int window_size) {
  auto seq = set.sequence(slot.sequence);
  const std::size_t i = slot.position;
  const auto w = static_cast<std::size_t>(window_size);
  CbowInstance inst;
  inst.target = seq[i];
  const std::size_t lo = i > w ? i - w : 0;
  const std::size_t hi = std::min(seq.size() - 1, i + w);
  for (std::size_t j = lo; j <= hi; ++j) {
    if (j != i) inst.context.push_back(seq[j]);
  }
  return inst;
}

EmbeddingModel InitEmbeddings(std::size_t vocab_size, int dim,
                              std::uint64_t seed) {
  if (dim < 1) throw ConfigError("vector_size: must be >= 1");
  EmbeddingModel model;
  model.input = Matrix(vocab_size, static_cast<std::size_t>(dim));
  model.output = Matrix(vocab_size, static_cast<std::size_t>(dim));
  model.trained_mask.assign(vocab_size, 0);
  const Real bound = 1.0 / static_cast<Real>(dim);
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0x696e6974u};
  Rng rng(seq);
  std::uniform_real_distribution<Real> uniform(-bound, bound);
  auto fill = [&](Matrix& m) {
    for (Real& x : m.data()) {
      // uniform_real_distribution is half-open; keep the interval open.
      do {
        x = uniform(rng);
      } while (x == -bound);
    }
  };
  fill(model.input);
  fill(model.output);
  return model;
}

std::vector<Token> SampleNegatives(std::size_t count, std::size_t vocab_size,
                                   Rng& rng) {
  if (vocab_size == 0) throw ConfigError("vocab_size must be >= 1");
  std::uniform_int_distribution<std::size_t> pick(0, vocab_size - 1);
  std::vector<Token> out(count);
  for (Token& t : out) t = static_cast<Token>(pick(rng));
  return out;
}

void SparseRows::Reset(std::size_t vocab_size, std::size_t dim) {
  dim_ = dim;
  slot_.assign(vocab_size, -1);
  rows_.clear();
  values_.clear();
}

std::span<Real> SparseRows::Row(Token token) {
  std::int32_t& slot = slot_[token];
  if (slot < 0) {
    slot = static_cast<std::int32_t>(rows_.size());
    rows_.push_back(token);
    values_.resize(values_.size() + dim_, 0.0);
  }
  return std::span<Real>(values_).subspan(
      static_cast<std::size_t>(slot) * dim_, dim_);
}

void SparseRows::Clear() {
  for (Token t : rows_) slot_[t] = -1;
  rows_.clear();
  values_.clear();
}

namespace {

Real Dot(std::span<const Real> a, std::span<const Real> b) {
  Real s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void Axpy(Real alpha, std::span<const Real> x, std::span<Real> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Real Sigmoid(Real x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const Real e = std::exp(x);
  return e / (1.0 + e);
}

// ln(1 + e^x) without overflow.
Real Softplus(Real x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void CheckToken(Token t, std::size_t vocab_size) {
  if (t < 0 || static_cast<std::size_t>(t) >= vocab_size) {
    throw DataError(fmt::format("token {} outside model rows", t));
  }
}

// Loss and gradients of one instance given its center representation.
// Writes dL/dcenter into center_grad (scaled by `scale`) and accumulates
// output-row gradients into grads->output.
Real ContrastiveTerm(const EmbeddingModel& model, std::span<const Real> center,
                     Token positive, std::span<const Token> negatives,
                     Real scale, BatchGradients* grads,
                     std::span<Real> center_grad) {
  auto pos_row = model.output.row(positive);
  const Real x = Dot(center, pos_row);
  Real loss = Softplus(-x);
  if (grads != nullptr) {
    const Real g = (Sigmoid(x) - 1.0) * scale;
    Axpy(g, pos_row, center_grad);
    Axpy(g, center, grads->output.Row(positive));
  }
  for (Token n : negatives) {
    auto neg_row = model.output.row(n);
    const Real y = Dot(center, neg_row);
    loss += Softplus(y);
    if (grads != nullptr) {
      const Real g = Sigmoid(y) * scale;
      Axpy(g, neg_row, center_grad);
      Axpy(g, center, grads->output.Row(n));
    }
  }
  return loss;
}

}  // namespace

double SgnsBatchLoss(const EmbeddingModel& model,
                     std::span<const TrainingPair> batch,
                     std::span<const Token> negatives, int k,
                     BatchGradients* grads) {
  if (k < 0) throw ConfigError("negative_samples: must be >= 0");
  if (batch.empty()) return 0.0;
  const auto kk = static_cast<std::size_t>(k);
  if (negatives.size() != batch.size() * kk) {
    throw DataError("negatives must hold k tokens per pair");
  }
  const std::size_t vocab = model.vocab_size();
  const Real scale = 1.0 / static_cast<Real>(batch.size());
  std::vector<Real> center_grad(model.dim());
  Real total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const TrainingPair& p = batch[i];
    CheckToken(p.center, vocab);
    CheckToken(p.context, vocab);
    auto negs = negatives.subspan(i * kk, kk);
    for (Token n : negs) CheckToken(n, vocab);
    std::fill(center_grad.begin(), center_grad.end(), 0.0);
    total += ContrastiveTerm(model, model.input.row(p.center), p.context, negs,
                             scale, grads, center_grad);
    if (grads != nullptr) {
      Axpy(1.0, center_grad, grads->input.Row(p.center));
    }
  }
  return total * scale;
}

double CbowBatchLoss(const EmbeddingModel& model,
                     std::span<const CbowInstance> batch,
                     std::span<const Token> negatives, int k,
                     BatchGradients* grads) {
  if (k < 0) throw ConfigError("window_size: must be >= 0");
  if (batch.empty()) return 0.0;
  const auto kk = static_cast<std::size_t>(k);
  if (negatives.size() != batch.size() * kk) {
    throw DataError("negatives must hold k tokens per instance");
  }
  const std::size_t vocab = model.vocab_size();
  const std::size_t dim = model.dim();
  const Real scale = 1.0 / static_cast<Real>(batch.size());
  std::vector<Real> context(dim);
  std::vector<Real> context_grad(dim);
  Real total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const CbowInstance& inst = batch[i];
    if (inst.context.empty()) {
      throw DataError("CBOW instance with an empty context window");
    }
    CheckToken(inst.target, vocab);
    auto negs = negatives.subspan(i * kk, kk);
    for (Token n : negs) CheckToken(n, vocab);
    std::fill(context.begin(), context.end(), 0.0);
    const Real inv = 1.0 / static_cast<Real>(inst.context.size());
    for (Token c : inst.context) {
      CheckToken(c, vocab);
      Axpy(inv, model.input.row(c), context);
    }
    std::fill(context_grad.begin(), context_grad.end(), 0.0);
    total += ContrastiveTerm(model, context, inst.target, negs, scale, grads,
                             context_grad);
    if (grads != nullptr) {
      for (Token c : inst.context) {
        Axpy(inv, context_grad, grads->input.Row(c));
      }
    }
  }
  return total * scale;
}

RowAdam::RowAdam(std::size_t rows, std::size_t dim, bool sparse)
    : sparse_(sparse), m_(rows, dim), v_(rows, dim) {
  if (!sparse) has_grad_.assign(rows, 0);
}

void RowAdam::Step(Matrix& param, const SparseRows& grad,
                   const AdamParams& params) {
  ++step_;
  const double b1 = params.beta1;
  const double b2 = params.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const std::size_t dim = param.cols();

  if (sparse_) {
    // Lazy moments: only rows with a gradient advance.
    const double step_size = params.learning_rate * std::sqrt(bc2) / bc1;
    for (std::size_t i = 0; i < grad.touched().size(); ++i) {
      const Token r = grad.touched()[i];
      auto g = grad.Get(i);
      auto m = m_.row(r);
      auto v = v_.row(r);
      auto p = param.row(r);
      for (std::size_t j = 0; j < dim; ++j) {
        m[j] = b1 * m[j] + (1.0 - b1) * g[j];
        v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
        p[j] -= step_size * m[j] / (std::sqrt(v[j]) + params.epsilon);
      }
    }
    return;
  }

  // Dense: every row sees a gradient, zero where the batch did not touch it.
  for (std::size_t i = 0; i < grad.touched().size(); ++i) {
    has_grad_[grad.touched()[i]] = 1;
  }
  std::vector<std::int64_t> slot(param.rows(), -1);
  for (std::size_t i = 0; i < grad.touched().size(); ++i) {
    slot[grad.touched()[i]] = static_cast<std::int64_t>(i);
  }
  const double step_size = params.learning_rate / bc1;
  const double sqrt_bc2 = std::sqrt(bc2);
  for (std::size_t r = 0; r < param.rows(); ++r) {
    if (!has_grad_[r]) continue;  // moments still zero: update is exactly 0
    auto m = m_.row(r);
    auto v = v_.row(r);
    auto p = param.row(r);
    const Real* g = slot[r] >= 0
                        ? grad.Get(static_cast<std::size_t>(slot[r])).data()
                        : nullptr;
    for (std::size_t j = 0; j < dim; ++j) {
      const double gj = g != nullptr ? g[j] : 0.0;
      m[j] = b1 * m[j] + (1.0 - b1) * gj;
      v[j] = b2 * v[j] + (1.0 - b2) * gj * gj;
      p[j] -= step_size * m[j] / (std::sqrt(v[j]) / sqrt_bc2 + params.epsilon);
    }
  }
}

void ApplySparseUpdate(EmbeddingModel& model, const BatchGradients& grads,
                       OptimizerState& state, const AdamParams& params) {
  state.input.Step(model.input, grads.input, params);
  state.output.Step(model.output, grads.output, params);
}

std::size_t SuggestBatchSize(std::uint64_t per_sample_bytes,
                             std::uint64_t memory_budget_bytes,
                             std::uint64_t corpus_pair_count) {
  if (per_sample_bytes == 0) {
    throw ConfigError("per_sample_bytes must be > 0");
  }
  const std::uint64_t by_memory = memory_budget_bytes / (4 * per_sample_bytes);
  const std::uint64_t by_corpus = (corpus_pair_count + 19) / 20;
  return static_cast<std::size_t>(
      std::max<std::uint64_t>(1, std::min(by_memory, by_corpus)));
}

std::uint64_t PerSampleBytes(const TrainConfig& config) {
  const auto d = static_cast<std::uint64_t>(config.dim);
  const auto bytes = static_cast<std::uint64_t>(sizeof(Real));
  std::uint64_t rows = 0;
  if (config.model == ModelKind::kSkipGram) {
    rows = 2 + static_cast<std::uint64_t>(config.negative_samples);
  } else {
    rows = 2 * static_cast<std::uint64_t>(config.window_size) + 1 +
           static_cast<std::uint64_t>(config.window_size);
  }
  // Gathered rows plus their gradients, and the token ids themselves.
  return rows * d * bytes * 2 + rows * sizeof(Token);
}

std::uint64_t ModelBytes(std::size_t vocab_size, int dim) {
  // Two parameter matrices, each with two Adam moment matrices.
  return 6ull * vocab_size * static_cast<std::uint64_t>(dim) * sizeof(Real);
}

std::uint64_t PhysicalMemoryBytes() {
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page = sysconf(_SC_PAGE_SIZE);
  if (pages <= 0 || page <= 0) return 0;
  return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page);
}

namespace {

Rng StreamRng(std::uint64_t seed, std::uint32_t purpose, std::uint32_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), purpose, index};
  return Rng(seq);
}

constexpr std::uint32_t kShuffleStream = 0x73687566u;
constexpr std::uint32_t kNegativeStream = 0x6e656773u;

// Everything one worker needs to run batches against its own parameters.
struct BatchRunner {
  const TrainConfig* config = nullptr;
  const TrainingSet* set = nullptr;
  const std::vector<TrainingPair>* pairs = nullptr;
  const std::vector<CbowSlot>* slots = nullptr;
  std::size_t instances = 0;
  std::size_t batch_size = 1;
  int k = 1;
  AdamParams adam;

  EmbeddingModel* model = nullptr;
  OptimizerState optimizer;
  BatchGradients grads;
  Rng rng;
  std::vector<CbowInstance> cbow_batch;

  // Runs batch `b` and returns its mean loss.
  double Run(std::size_t b, int epoch) {
    const std::size_t lo = b * batch_size;
    const std::size_t hi = std::min(instances, lo + batch_size);
    const std::size_t n = hi - lo;
    std::vector<Token> negatives(n * static_cast<std::size_t>(k));
    std::uniform_int_distribution<std::size_t> pick(0,
                                                    set->surviving.size() - 1);
    for (Token& t : negatives) t = set->surviving[pick(rng)];

    grads.Clear();
    double loss = 0.0;
    if (config->model == ModelKind::kSkipGram) {
      loss = SgnsBatchLoss(*model,
                           std::span<const TrainingPair>(*pairs).subspan(lo, n),
                           negatives, k, &grads);
    } else {
      cbow_batch.clear();
      for (std::size_t i = lo; i < hi; ++i) {
        cbow_batch.push_back(
            CbowInstanceAt(*set, (*slots)[i], config->window_size));
      }
      loss = CbowBatchLoss(*model, cbow_batch, negatives, k, &grads);
    }
    if (!std::isfinite(loss)) throw DivergenceError(epoch, b);
    ApplySparseUpdate(*model, grads, optimizer, adam);
    return loss;
  }
};

void MarkTouched(const BatchGradients& grads, std::vector<std::uint8_t>& mask) {
  for (Token t : grads.input.touched()) mask[t] = 1;
  for (Token t : grads.output.touched()) mask[t] = 1;
}

}  // namespace

TrainResult Train(const WalkCorpus& corpus, std::size_t vocab_size,
                  const TrainConfig& config, std::uint64_t seed,
                  const RunControl* control) {
  config.Validate();
  const auto started = std::chrono::steady_clock::now();
  TrainResult result;

  TrainingSet set = FilterCorpus(corpus, vocab_size, config.min_count);
  std::vector<TrainingPair> pairs;
  std::vector<CbowSlot> slots;
  if (config.model == ModelKind::kSkipGram) {
    pairs = MakeSkipGramPairs(set, config.window_size);
    result.instances = pairs.size();
  } else {
    slots = MakeCbowSlots(set, config.window_size);
    result.instances = slots.size();
  }
  if (result.instances == 0) throw DataError("empty training set");

  EmbeddingModel global = InitEmbeddings(vocab_size, config.dim, seed);
  const int workers = config.workers;
  const int k = config.model == ModelKind::kSkipGram ? config.negative_samples
                                                     : config.window_size;

  std::uint64_t budget = config.memory_budget_bytes;
  if (budget == 0) budget = PhysicalMemoryBytes();
  if (budget == 0) budget = 8ull << 30;
  const std::uint64_t per_sample = PerSampleBytes(config);
  std::size_t batch = config.batch_size.value_or(
      SuggestBatchSize(per_sample, budget, result.instances));
  batch = std::min(batch, result.instances);

  // Projected usage must stay under the cap; shrink the batch, never abort.
  const std::uint64_t replicas = workers > 1 ? workers + 1 : 1;
  const auto cap = static_cast<std::uint64_t>(
      config.memory_cap_fraction * static_cast<double>(budget));
  auto projected = [&](std::size_t b) {
    return replicas * ModelBytes(vocab_size, config.dim) +
           static_cast<std::uint64_t>(workers) * b * per_sample;
  };
  while (batch > 1 && projected(batch) > cap) {
    const std::size_t halved = std::max<std::size_t>(1, batch / 2);
    std::string event = fmt::format(
        "memory guard: projected {} bytes > {} bytes cap, batch size {} -> {}",
        projected(batch), cap, batch, halved);
    spdlog::warn("{}", event);
    result.events.push_back(std::move(event));
    batch = halved;
  }
  if (projected(batch) > cap) {
    std::string event = fmt::format(
        "memory guard: projected {} bytes exceeds cap even at batch size 1",
        projected(batch));
    spdlog::warn("{}", event);
    result.events.push_back(std::move(event));
  }
  result.batch_size = batch;

  const AdamParams adam{.learning_rate = config.learning_rate};
  const std::size_t batches = (result.instances + batch - 1) / batch;
  Rng shuffle_rng = StreamRng(seed, kShuffleStream, 0);

  auto make_runner = [&](EmbeddingModel* model, int worker) {
    BatchRunner r;
    r.config = &config;
    r.set = &set;
    r.pairs = &pairs;
    r.slots = &slots;
    r.instances = result.instances;
    r.batch_size = batch;
    r.k = k;
    r.adam = adam;
    r.model = model;
    r.optimizer = OptimizerState(vocab_size, static_cast<std::size_t>(config.dim),
                                 config.use_sparse);
    r.grads.Reset(vocab_size, static_cast<std::size_t>(config.dim));
    r.rng = StreamRng(seed, kNegativeStream, static_cast<std::uint32_t>(worker));
    return r;
  };

  auto shuffle = [&] {
    if (config.model == ModelKind::kSkipGram) {
      std::shuffle(pairs.begin(), pairs.end(), shuffle_rng);
    } else {
      std::shuffle(slots.begin(), slots.end(), shuffle_rng);
    }
  };

  if (workers == 1) {
    BatchRunner runner = make_runner(&global, 0);
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
      shuffle();
      double sum = 0.0;
      for (std::size_t b = 0; b < batches; ++b) {
        if (control != nullptr) control->Check();
        sum += runner.Run(b, epoch);
        MarkTouched(runner.grads, global.trained_mask);
      }
      result.epoch_loss.push_back(sum / static_cast<double>(batches));
    }
  } else {
    // Data-parallel replicas. Worker w owns batches w, w + W, ... of each
    // epoch and applies them to its replica; at every sync point the
    // replica deltas of the touched rows are summed into the global model
    // and broadcast back.
    struct Worker {
      EmbeddingModel replica;
      BatchRunner runner;
      std::vector<std::uint8_t> round_mark;
      std::vector<Token> round_rows;
      std::size_t next = 0;
      double loss_sum = 0.0;
      bool exhausted = false;
    };
    std::vector<Worker> pool(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      Worker& wk = pool[w];
      wk.replica = global;
      wk.round_mark.assign(vocab_size, 0);
    }
    for (int w = 0; w < workers; ++w) {
      pool[w].runner = make_runner(&pool[w].replica, w);
    }

    std::atomic<bool> abort{false};
    std::exception_ptr error;
    std::mutex error_mu;
    bool all_done = false;
    auto round_start = std::chrono::steady_clock::now();

    auto merge = [&]() noexcept {
      std::vector<std::uint8_t> seen(vocab_size, 0);
      std::vector<Token> rows;
      for (Worker& wk : pool) {
        for (Token r : wk.round_rows) {
          if (!seen[r]) {
            seen[r] = 1;
            rows.push_back(r);
          }
          wk.round_mark[r] = 0;
        }
        wk.round_rows.clear();
      }
      std::sort(rows.begin(), rows.end());
      for (Matrix EmbeddingModel::*mat :
           {&EmbeddingModel::input, &EmbeddingModel::output}) {
        for (Token r : rows) {
          auto g = (global.*mat).row(r);
          std::vector<Real> merged(g.begin(), g.end());
          for (Worker& wk : pool) {
            auto rep = (wk.replica.*mat).row(r);
            for (std::size_t j = 0; j < g.size(); ++j) {
              merged[j] += rep[j] - g[j];
            }
          }
          std::copy(merged.begin(), merged.end(), g.begin());
          for (Worker& wk : pool) {
            auto rep = (wk.replica.*mat).row(r);
            std::copy(g.begin(), g.end(), rep.begin());
          }
        }
      }
      for (Token r : rows) global.trained_mask[r] = 1;
      all_done = abort.load() ||
                 std::all_of(pool.begin(), pool.end(),
                             [](const Worker& wk) { return wk.exhausted; });
      round_start = std::chrono::steady_clock::now();
    };

    for (int epoch = 1; epoch <= config.epochs && !abort.load(); ++epoch) {
      shuffle();
      for (int w = 0; w < workers; ++w) {
        pool[w].next = static_cast<std::size_t>(w);
        pool[w].loss_sum = 0.0;
        pool[w].exhausted = pool[w].next >= batches;
      }
      all_done = false;
      round_start = std::chrono::steady_clock::now();
      std::barrier sync(workers, merge);

      auto body = [&](int w) {
        Worker& wk = pool[w];
        while (true) {
          int in_round = 0;
          while (!wk.exhausted && !abort.load()) {
            if (config.reproducible) {
              if (in_round >= config.sync_every_batches) break;
            } else if (in_round > 0 &&
                       std::chrono::steady_clock::now() - round_start >=
                           std::chrono::milliseconds(config.sync_interval_ms)) {
              break;
            }
            try {
              if (control != nullptr) control->Check();
              wk.loss_sum += wk.runner.Run(wk.next, epoch);
            } catch (...) {
              std::lock_guard<std::mutex> lock(error_mu);
              if (!error) error = std::current_exception();
              abort.store(true);
              break;
            }
            for (const SparseRows* rows :
                 {&wk.runner.grads.input, &wk.runner.grads.output}) {
              for (Token t : rows->touched()) {
                if (!wk.round_mark[t]) {
                  wk.round_mark[t] = 1;
                  wk.round_rows.push_back(t);
                }
              }
            }
            ++in_round;
            wk.next += static_cast<std::size_t>(workers);
            wk.exhausted = wk.next >= batches;
          }
          sync.arrive_and_wait();
          if (all_done) return;
        }
      };
      {
        std::vector<std::jthread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(body, w);
      }
      if (error) std::rethrow_exception(error);
      double sum = 0.0;
      for (const Worker& wk : pool) sum += wk.loss_sum;
      result.epoch_loss.push_back(sum / static_cast<double>(batches));
    }
  }

  result.model = std::move(global);
  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return result;
}

namespace {

std::string FormatReal(Real x) { return fmt::format("{:.9g}", x); }

}  // namespace

void WriteWord2VecText(std::ostream& out, const Matrix& vectors,
                       std::span<const std::string> lexicals) {
  if (lexicals.size() != vectors.rows()) {
    throw DataError("lexical count does not match embedding rows");
  }
  out << vectors.rows() << ' ' << vectors.cols() << '\n';
  for (std::size_t r = 0; r < vectors.rows(); ++r) {
    out << lexicals[r];
    for (Real x : vectors.row(r)) out << ' ' << FormatReal(x);
    out << '\n';
  }
}

LoadedEmbeddings ReadWord2VecText(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("missing word2vec header");
  std::size_t rows = 0;
  std::size_t dim = 0;
  {
    std::istringstream header(line);
    if (!(header >> rows >> dim)) throw ParseError(1, "bad word2vec header");
  }
  LoadedEmbeddings out;
  out.vectors = Matrix(rows, dim);
  out.lexicals.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw ParseError(r + 2, "missing row");
    // The last `dim` space-separated fields are values; the rest is the key.
    std::size_t end = line.size();
    auto row = out.vectors.row(r);
    for (std::size_t j = dim; j-- > 0;) {
      std::size_t sp = line.rfind(' ', end - 1);
      if (sp == std::string::npos) throw ParseError(r + 2, "too few values");
      std::string field = line.substr(sp + 1, end - sp - 1);
      try {
        row[j] = std::stod(field);
      } catch (const std::exception&) {
        throw ParseError(r + 2, fmt::format("bad value '{}'", field));
      }
      end = sp;
    }
    out.lexicals.push_back(line.substr(0, end));
  }
  return out;
}

void WriteEmbeddingsTsv(std::ostream& out, const Matrix& vectors,
                        std::span<const std::string> lexicals) {
  if (lexicals.size() != vectors.rows()) {
    throw DataError("lexical count does not match embedding rows");
  }
  for (std::size_t r = 0; r < vectors.rows(); ++r) {
    out << lexicals[r];
    for (Real x : vectors.row(r)) out << '\t' << FormatReal(x);
    out << '\n';
  }
}

void WriteLossCsv(std::ostream& out, std::span<const double> losses) {
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out << (i + 1) << ',' << FormatReal(losses[i]) << '\n';
  }
}

}  // namespace rdf2vec
