#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gaussbv {

// Samples are processed in fixed-size blocks; each block is reduced on its
// own and the partial results are merged in block order. The result is
// therefore identical for any thread count.
inline constexpr std::size_t kBlockSize = 1024;

void set_thread_count(int n);
int thread_count();

template <class Acc, class BlockFn>
Acc reduce_blocks(std::size_t n, BlockFn&& fn, const Acc& init = Acc{}) {
  const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<Acc> partial(blocks, init);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (long long b = 0; b < static_cast<long long>(blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t end = begin + kBlockSize < n ? begin + kBlockSize : n;
    try {
      fn(begin, end, partial[static_cast<std::size_t>(b)]);
    } catch (...) {
#pragma omp critical(gaussbv_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  Acc total = init;
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace gaussbv
