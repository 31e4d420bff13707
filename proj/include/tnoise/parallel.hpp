#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tnoise {

/// Runs make_worker() once per thread, then worker(i) for i in [0, n).
/// Results must be written by index so the thread count never changes output.
template <typename MakeWorker>
void parallel_for(std::size_t n, int threads, MakeWorker&& make_worker)
{
    threads = std::max(1, std::min<int>(threads, int(n)));
    if (threads == 1) {
        auto w = make_worker();
        for (std::size_t i = 0; i < n; ++i)
            w(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mtx;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            try {
                auto w = make_worker();
                for (std::size_t i; (i = next++) < n;)
                    w(i);
            } catch (...) {
                std::lock_guard lock(err_mtx);
                if (!err)
                    err = std::current_exception();
            }
        });
    for (auto& th : pool)
        th.join();
    if (err)
        std::rethrow_exception(err);
}

} // namespace tnoise
