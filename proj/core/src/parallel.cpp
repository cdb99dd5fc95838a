#include "oscint/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace oscint {

namespace {

int initial_thread_count() {
    if (const char* env = std::getenv("OSCINT_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int> g_threads{0};

}  // namespace

int thread_count() {
    int n = g_threads.load(std::memory_order_relaxed);
    if (n == 0) {
        n = initial_thread_count();
        g_threads.store(n, std::memory_order_relaxed);
    }
    return n;
}

void set_thread_count(int n) { g_threads.store(n < 1 ? 1 : n, std::memory_order_relaxed); }

void parallel_for_chunked(std::size_t n, std::size_t chunk,
                          const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (chunk == 0) chunk = 1;
    const int workers = thread_count();
    if (workers <= 1 || n <= chunk) {
        fn(0, n);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t begin = next.fetch_add(chunk, std::memory_order_relaxed);
            if (begin >= n) return;
            std::size_t end = begin + chunk < n ? begin + chunk : n;
            fn(begin, end);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    parallel_for_chunked(n, 16, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) fn(i);
    });
}

namespace {

template <class T>
T pairwise_sum_impl(std::span<const T> v) {
    // Serial recursion with a small base case; the summation tree depends only
    // on the length, never on threading.
    if (v.size() <= 8) {
        T s{};
        for (const T& x : v) s += x;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum_impl(v.first(half)) + pairwise_sum_impl(v.subspan(half));
}

}  // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_sum_impl(v); }

std::complex<double> pairwise_sum(std::span<const std::complex<double>> v) {
    return pairwise_sum_impl(v);
}

}  // namespace oscint
