#include "afire/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace afire {

std::size_t thread_count() {
    static const std::size_t n = [] {
        if (const char* env = std::getenv("AFIRE_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v >= 1) return static_cast<std::size_t>(v);
            return std::size_t{1};
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? static_cast<std::size_t>(hw) : std::size_t{1};
    }();
    return n;
}

void parallel_for_chunks(std::size_t n, std::size_t grain,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    grain = std::max<std::size_t>(grain, 1);
    const std::size_t n_chunks = (n + grain - 1) / grain;
    const std::size_t workers = std::min(thread_count(), n_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c * grain, std::min(n, (c + 1) * grain));
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t c = w; c < n_chunks; c += workers)
                fn(c * grain, std::min(n, (c + 1) * grain));
        });
    }
    for (auto& t : pool) t.join();
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    const std::size_t workers = std::max<std::size_t>(thread_count(), 1);
    parallel_for_chunks(n, (n + workers - 1) / workers, fn);
}

} // namespace afire
