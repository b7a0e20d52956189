#pragma once

#include <cstddef>
#include <functional>

namespace typicality {

/// Calls fn(i) for i in [0, n) on up to `jobs` threads in contiguous blocks.
/// jobs <= 1 runs inline. The first exception thrown by any call is rethrown.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace typicality
