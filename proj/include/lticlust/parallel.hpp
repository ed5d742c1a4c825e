#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace lticlust {

/// Runs body(i) for i in [0, count) on up to `threads` workers.
/// Results must be written to slot i by the body; if any calls throw, the
/// exception from the lowest index is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body)
{
    const std::size_t workers =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }

    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(run);
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

}  // namespace lticlust
