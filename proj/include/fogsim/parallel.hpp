#pragma once

#include <cstddef>

namespace fogsim {

/// Indexed loop that optionally fans out across OpenMP threads. Every
/// parallel site in the solver keeps results identical to the serial path:
/// loop bodies only touch their own index and draw from per-index RNG
/// streams, so thread count never changes the outcome.
template <typename Fn>
void for_each_index(std::size_t n, bool parallel, Fn&& fn) {
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      fn(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) fn(i);
  }
}

}  // namespace fogsim
