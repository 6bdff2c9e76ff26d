#pragma once

#include <cstddef>
#include <functional>

namespace rsmm {

// Runs f(i) for i in [0, n) on up to `threads` workers in contiguous chunks.
// threads <= 0 uses the hardware concurrency. Rethrows the first exception.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

}  // namespace rsmm
