//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/thread_pool.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <utility>

namespace wavelut {

ThreadPool::ThreadPool(int threads, std::size_t queue_capacity)
    : threads_(std::max(1, threads)),
      capacity_(queue_capacity == 0 ? static_cast<std::size_t>(2 * std::max(1, threads)) : queue_capacity) {
    if (threads_ > 1) {
        workers_.reserve(static_cast<std::size_t>(threads_));
        for (int i = 0; i < threads_; ++i) {
            workers_.emplace_back([this] { worker_loop(); });
        }
    }
}

ThreadPool::~ThreadPool() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    not_empty_.notify_all();
    not_full_.notify_all();
    workers_.clear();  // joins
}

void ThreadPool::submit(std::function<void()> task) {
    if (workers_.empty()) {
        try {
            task();
        } catch (...) {
            if (!first_error_) {
                first_error_ = std::current_exception();
            }
        }
        return;
    }
    std::unique_lock lock(mutex_);
    not_full_.wait(lock, [this] { return queue_.size() < capacity_ || stopping_; });
    queue_.push_back(std::move(task));
    ++in_flight_;
    lock.unlock();
    not_empty_.notify_one();
}

void ThreadPool::worker_loop() {
    for (;;) {
        std::function<void()> task;
        {
            std::unique_lock lock(mutex_);
            not_empty_.wait(lock, [this] { return !queue_.empty() || stopping_; });
            if (queue_.empty()) {
                return;
            }
            task = std::move(queue_.front());
            queue_.pop_front();
        }
        not_full_.notify_one();
        std::exception_ptr error;
        try {
            task();
        } catch (...) {
            error = std::current_exception();
        }
        {
            std::lock_guard lock(mutex_);
            if (error && !first_error_) {
                first_error_ = error;
            }
            if (--in_flight_ == 0) {
                idle_.notify_all();
            }
        }
    }
}

void ThreadPool::wait() {
    std::exception_ptr error;
    {
        std::unique_lock lock(mutex_);
        idle_.wait(lock, [this] { return in_flight_ == 0; });
        error = std::exchange(first_error_, nullptr);
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

void ThreadPool::parallel_for(std::size_t count, std::size_t grain,
                              const std::function<void(std::size_t, std::size_t)>& fn) {
    grain = std::max<std::size_t>(1, grain);
    for (std::size_t begin = 0; begin < count; begin += grain) {
        const std::size_t end = std::min(count, begin + grain);
        submit([&fn, begin, end] { fn(begin, end); });
    }
    wait();
}

int default_thread_count() {
    if (const char* env = std::getenv("WAVELUT_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) {
                return n;
            }
        } catch (const std::exception&) {
            // fall through to hardware detection
        }
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace wavelut
