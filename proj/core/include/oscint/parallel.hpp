#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>

namespace oscint {

// Global worker count for parallel_for. Defaults to OSCINT_THREADS if set,
// otherwise std::thread::hardware_concurrency().
int thread_count();
void set_thread_count(int n);

// Runs fn(i) for i in [0, n) on the worker pool. Each index is processed by
// exactly one thread; fn must only write to per-index slots so the result is
// independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Chunked variant: fn(begin, end) over disjoint ranges.
void parallel_for_chunked(std::size_t n, std::size_t chunk,
                          const std::function<void(std::size_t, std::size_t)>& fn);

// Fixed-order pairwise (binary tree) summation. Deterministic for a given
// input ordering regardless of thread count; used for every norm/dot
// reduction so repeated runs produce identical bytes.
double pairwise_sum(std::span<const double> v);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> v);

}  // namespace oscint
