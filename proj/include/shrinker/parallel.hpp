#pragma once

#include <cstddef>
#include <functional>

namespace shrinker {

// Worker cap shared by all parallel loops. 0 means hardware concurrency.
void set_thread_count(int n);
int thread_count();

// Runs body(b) for b in [0, nblocks). Blocks are independent; callers
// store per-block results and reduce them in block order, so results do
// not depend on the number of workers.
void parallel_blocks(std::size_t nblocks, const std::function<void(std::size_t)>& body);

}  // namespace shrinker
