#pragma once

#include <cstddef>
#include <vector>

#include "dk/vec.hpp"

namespace dk {

// Fixed-order chunked summation: accumulate each 1024-element chunk
// left-to-right, then the chunk totals left-to-right.  The result is
// independent of how callers might batch the index range, which keeps
// every CSV bitwise reproducible.
template <class T, class F>
T chunked_sum(std::size_t n, F&& term) {
  constexpr std::size_t kChunk = 1024;
  T total{};
  for (std::size_t b = 0; b < n; b += kChunk) {
    T partial{};
    const std::size_t e = (b + kChunk < n) ? b + kChunk : n;
    for (std::size_t i = b; i < e; ++i) partial += term(i);
    total += partial;
  }
  return total;
}

// Parallel map over independent output slots.  On this build target the
// hardware is single-core, so this is a plain loop; the contract (each
// index writes only its own slot) is what matters for determinism.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace dk
