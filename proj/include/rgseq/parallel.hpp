#pragma once

#include <atomic>
#include <cstdint>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rgseq {

namespace detail {
inline std::atomic<int>& worker_count_slot() {
  static std::atomic<int> n{0};  // 0 = library default (all hardware threads)
  return n;
}
}  // namespace detail

/// Requested worker count for parallel kernels (0 = default).
inline int worker_count() { return detail::worker_count_slot().load(); }

/// Set the worker count used by parallel kernels. Outputs are required to be
/// byte-identical for every setting; this only trades wall time.
inline void set_worker_count(int n) { detail::worker_count_slot().store(n < 0 ? 0 : n); }

inline int effective_workers() {
  int w = worker_count();
#ifdef _OPENMP
  if (w <= 0) w = omp_get_max_threads();
#else
  w = 1;
#endif
  return w < 1 ? 1 : w;
}

/// Parallel loop over i in [0, n). `fn(i)` must write only to slot i of
/// pre-sized output storage (or otherwise touch disjoint state), which keeps
/// the result independent of scheduling.
template <class F>
void parallel_for(std::int64_t n, F&& fn) {
  if (n <= 0) return;
#ifdef _OPENMP
  const int w = effective_workers();
  if (w > 1 && n > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(w)
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
#endif
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

/// Contiguous chunk bounds for deterministic partitioned reductions.
///
/// The chunk count depends only on `n` and `max_chunks`, never on the worker
/// count, so per-chunk partial results can be combined in chunk order and the
/// combined value is identical for any number of threads.
inline std::vector<std::pair<std::int64_t, std::int64_t>> fixed_chunks(std::int64_t n,
                                                                       int max_chunks = 64) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  if (n <= 0) return out;
  const std::int64_t k = n < max_chunks ? n : max_chunks;
  const std::int64_t base = n / k, rem = n % k;
  std::int64_t lo = 0;
  for (std::int64_t c = 0; c < k; ++c) {
    const std::int64_t len = base + (c < rem ? 1 : 0);
    out.emplace_back(lo, lo + len);
    lo += len;
  }
  return out;
}

}  // namespace rgseq
