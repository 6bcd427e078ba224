//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace wavelut {

/// Fixed-size worker pool fed through a bounded FIFO queue. submit() blocks
/// while the queue is full. A pool of one worker runs tasks inline on the
/// calling thread.
class ThreadPool {
public:
    explicit ThreadPool(int threads, std::size_t queue_capacity = 0);
    ~ThreadPool();

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    int size() const noexcept { return threads_; }

    void submit(std::function<void()> task);

    /// Block until every submitted task has finished. Rethrows the first
    /// exception raised by a task, if any.
    void wait();

    /// Run fn(begin, end) over [0, count) in chunks of at most `grain`
    /// indices and wait for completion.
    void parallel_for(std::size_t count, std::size_t grain,
                      const std::function<void(std::size_t, std::size_t)>& fn);

private:
    void worker_loop();

    int threads_;
    std::size_t capacity_;
    std::vector<std::jthread> workers_;
    std::deque<std::function<void()>> queue_;
    std::mutex mutex_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::condition_variable idle_;
    std::size_t in_flight_ = 0;
    bool stopping_ = false;
    std::exception_ptr first_error_;
};

/// WAVELUT_THREADS if set to a positive integer, otherwise the hardware
/// thread count (at least 1).
int default_thread_count();

}  // namespace wavelut
