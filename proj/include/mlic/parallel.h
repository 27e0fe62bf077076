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

#ifndef MLIC_PARALLEL_H_
#define MLIC_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace mlic {

// Worker count: MLIC_THREADS if set and positive, else hardware concurrency.
int ThreadCount();

// Overrides the worker count for the current process (0 restores default).
void SetThreadCount(int threads);

// Calls fn(i) for every i in [0, n). Items are independent outputs; the
// per-item computation never depends on how items are distributed.
void ParallelFor(size_t n, const std::function<void(size_t)>& fn,
                 size_t min_items_per_thread = 1);

}  // namespace mlic

#endif  // MLIC_PARALLEL_H_
