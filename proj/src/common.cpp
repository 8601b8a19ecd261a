// Copyright 2026 The sqzt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sqzt/common.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>

namespace sqzt {

namespace {

int initial_thread_count() {
  if (const char *env = std::getenv("SQZTOMO_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return omp_get_max_threads();
}

std::atomic<int> g_threads{initial_thread_count()};

}  // namespace

int thread_count() { return g_threads.load(std::memory_order_relaxed); }

void set_thread_count(int n) {
  g_threads.store(n >= 1 ? n : 1, std::memory_order_relaxed);
}

}  // namespace sqzt
