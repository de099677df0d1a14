#pragma once

#include <functional>

#include "eer/dense.hpp"

namespace eer {

// Process-wide worker cap: --threads / EE_RESPONSE_THREADS / hardware.
Index max_threads();
void set_max_threads(Index n);

// Runs fn(begin, end) over contiguous chunks of [0, n), one thread per
// chunk. Chunking depends only on n and the thread cap, so writes into
// per-index slots stay deterministic.
void parallel_for(Index n, const std::function<void(Index, Index)>& fn);

}  // namespace eer
