#include "pshlab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace pshlab {

namespace {

int g_threads = [] {
    if (const char* env = std::getenv("PSHLAB_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}();

}  // namespace

void set_thread_count(int n) { g_threads = std::max(1, n); }

int thread_count() { return g_threads; }

void parallel_chunks(std::size_t n_chunks, const std::function<void(std::size_t)>& fn) {
    int workers = std::min<std::size_t>(g_threads, n_chunks);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_chunks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n_chunks) break;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace pshlab
