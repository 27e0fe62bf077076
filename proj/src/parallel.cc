// Copyright 2026 The MLIC Codec Authors. All Rights Reserved.
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

#include "mlic/parallel.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mlic {
namespace {

std::atomic<int> g_thread_override{0};

int DefaultThreadCount() {
  if (const char* env = std::getenv("MLIC_THREADS")) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int ThreadCount() {
  const int forced = g_thread_override.load();
  if (forced > 0) return forced;
  static const int kDefault = DefaultThreadCount();
  return kDefault;
}

void SetThreadCount(int threads) { g_thread_override.store(threads); }

void ParallelFor(size_t n, const std::function<void(size_t)>& fn,
                 size_t min_items_per_thread) {
  const size_t max_workers =
      std::max<size_t>(1, n / std::max<size_t>(1, min_items_per_thread));
  const size_t workers =
      std::min<size_t>(static_cast<size_t>(ThreadCount()), max_workers);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mlic
