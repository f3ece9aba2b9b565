#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace spreadcast::util {

/// Runs task(i) for i in [0, n) on `threads` workers. Worker w takes
/// i = w, w + threads, ... so the assignment never depends on timing; tasks
/// write to their own slots and the caller reduces in index order. The first
/// exception (lowest worker) is rethrown after every worker has joined.
inline void parallel_for(int n, int threads, const std::function<void(int)>& task) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) task(i);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int i = w; i < n; i += workers) task(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace spreadcast::util
