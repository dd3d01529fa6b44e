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

#ifndef RDF2VEC_PARALLEL_H_
#define RDF2VEC_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rdf2vec {

// Runs fn(task) for task in [0, task_count) on up to `workers` threads.
// Tasks are claimed dynamically; callers that need deterministic output
// write into per-task slots. The first exception thrown by any task is
// rethrown after all threads join.
template <typename Fn>
void ParallelFor(std::size_t task_count, int workers, Fn&& fn) {
  const std::size_t threads = std::min<std::size_t>(
      task_count, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t t = 0; t < task_count; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    while (true) {
      std::size_t t = next.fetch_add(1);
      if (t >= task_count) return;
      try {
        fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(task_count);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(body);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace rdf2vec

#endif  // RDF2VEC_PARALLEL_H_
