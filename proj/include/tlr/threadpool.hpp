#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

namespace tlr {

/// Fixed-size worker pool. parallel_for hands out task indices; results must be
/// written to pre-sized slots so the reduction order stays deterministic.
class ThreadPool {
public:
    explicit ThreadPool(std::size_t threads) {
        if (threads == 0) threads = 1;
        for (std::size_t i = 0; i < threads; ++i) {
            workers_.emplace_back([this] { run(); });
        }
    }

    ~ThreadPool() {
        {
            std::lock_guard lock(mutex_);
            done_ = true;
        }
        cv_.notify_all();
        for (auto& w : workers_) w.join();
    }

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    std::size_t size() const { return workers_.size(); }

    /// Runs fn(i) for i in [0, count), blocking until all complete.
    /// Exceptions from tasks are rethrown (first one wins).
    void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
        if (count == 0) return;

        // shared state owns everything the helpers touch, so a helper that is
        // still winding down after the last task cannot dangle
        struct State {
            std::atomic<std::size_t> next{0};
            std::atomic<std::size_t> finished{0};
            std::exception_ptr error;
            std::mutex error_mutex;
            std::condition_variable done_cv;
            std::mutex done_mutex;
            std::size_t count = 0;
            const std::function<void(std::size_t)>* fn = nullptr;
        };
        auto state = std::make_shared<State>();
        state->count = count;
        state->fn = &fn;

        auto worker = [state] {
            for (;;) {
                const std::size_t i = state->next.fetch_add(1);
                if (i >= state->count) break;
                try {
                    (*state->fn)(i);
                } catch (...) {
                    std::lock_guard lock(state->error_mutex);
                    if (!state->error) state->error = std::current_exception();
                }
                if (state->finished.fetch_add(1) + 1 == state->count) {
                    std::lock_guard lock(state->done_mutex);
                    state->done_cv.notify_all();
                }
            }
        };

        {
            std::lock_guard lock(mutex_);
            for (std::size_t i = 0; i + 1 < workers_.size() && i + 1 < count; ++i) {
                tasks_.push(worker);
            }
        }
        cv_.notify_all();
        worker();  // caller participates

        std::unique_lock lock(state->done_mutex);
        state->done_cv.wait(lock, [&] { return state->finished.load() >= count; });
        if (state->error) std::rethrow_exception(state->error);
    }

private:
    void run() {
        for (;;) {
            std::function<void()> task;
            {
                std::unique_lock lock(mutex_);
                cv_.wait(lock, [this] { return done_ || !tasks_.empty(); });
                if (done_ && tasks_.empty()) return;
                task = std::move(tasks_.front());
                tasks_.pop();
            }
            task();
        }
    }

    std::vector<std::thread> workers_;
    std::queue<std::function<void()>> tasks_;
    std::mutex mutex_;
    std::condition_variable cv_;
    bool done_ = false;
};

}  // namespace tlr
