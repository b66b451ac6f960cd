// Copyright 2026 The ifaa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IFAA_PARALLEL_HPP
#define IFAA_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace ifaa {

// Worker count resolution: explicit value if > 0, else IFAA_THREADS from the
// environment, else hardware concurrency.
unsigned resolve_threads(unsigned requested);

// Runs body(i) for i in [0, n) on up to `threads` workers. Tasks must write
// only to their own output slots; the loop itself imposes no ordering, so
// callers get thread-count-independent results for free as long as each task
// is a pure function of i. The first exception (by lowest index) is rethrown
// after all workers join.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace ifaa

#endif  // IFAA_PARALLEL_HPP
