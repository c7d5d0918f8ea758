#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace almi {

/// Run f(0..n-1) on up to `jobs` threads. Tasks are claimed from a shared
/// counter; callers that need deterministic output must store results by
/// index, never by completion order.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& f) {
    if (jobs == 0) jobs = 1;
    if (jobs == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
    };
    std::vector<std::thread> threads;
    const unsigned extra = static_cast<unsigned>(std::min<std::size_t>(jobs, n)) - 1;
    threads.reserve(extra);
    for (unsigned t = 0; t < extra; ++t) threads.emplace_back(worker);
    worker();
    for (std::thread& t : threads) t.join();
}

inline unsigned default_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace almi
