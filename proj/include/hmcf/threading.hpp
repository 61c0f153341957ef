#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace hmcf {

// Worker count: HMCF_THREADS environment variable, 0 or unset means one worker
// per hardware thread.  Parsed once.
inline int worker_count() {
    static const int n = [] {
        int want = 0;
        if (const char* env = std::getenv("HMCF_THREADS")) {
            want = std::atoi(env);
        }
        if (want <= 0) {
            want = static_cast<int>(std::thread::hardware_concurrency());
        }
        return want > 0 ? want : 1;
    }();
    return n;
}

namespace detail {

// Minimal persistent pool.  Each parallel_for call partitions [0, n) into one
// contiguous block per worker, so writes never overlap and the work assignment
// is independent of scheduling.  All reductions in the library run serially
// over the results, which keeps outputs byte-stable for a fixed config.
class Pool {
  public:
    static Pool& instance() {
        static Pool pool(worker_count());
        return pool;
    }

    void run(int n, const std::function<void(int, int)>& body) {
        if (n <= 0) return;
        const int workers = static_cast<int>(threads_.size()) + 1;
        if (workers == 1 || n == 1) {
            body(0, n);
            return;
        }
        std::unique_lock<std::mutex> lock(mutex_);
        body_ = &body;
        total_ = n;
        pending_ = static_cast<int>(threads_.size());
        ++generation_;
        start_.notify_all();
        // The calling thread takes the first block.
        lock.unlock();
        body(block_begin(0, n, workers), block_begin(1, n, workers));
        lock.lock();
        done_.wait(lock, [this] { return pending_ == 0; });
        body_ = nullptr;
    }

    ~Pool() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            stop_ = true;
            ++generation_;
        }
        start_.notify_all();
        for (auto& t : threads_) t.join();
    }

  private:
    explicit Pool(int workers) {
        for (int i = 1; i < workers; ++i) {
            threads_.emplace_back([this, i] { worker(i); });
        }
    }

    static int block_begin(int k, int n, int workers) {
        return static_cast<int>(static_cast<long long>(n) * k / workers);
    }

    void worker(int index) {
        long long seen = 0;
        for (;;) {
            const std::function<void(int, int)>* body = nullptr;
            int n = 0;
            {
                std::unique_lock<std::mutex> lock(mutex_);
                start_.wait(lock, [&] { return generation_ != seen; });
                seen = generation_;
                if (stop_) return;
                body = body_;
                n = total_;
            }
            const int workers = static_cast<int>(threads_.size()) + 1;
            (*body)(block_begin(index, n, workers), block_begin(index + 1, n, workers));
            {
                std::lock_guard<std::mutex> lock(mutex_);
                if (--pending_ == 0) done_.notify_all();
            }
        }
    }

    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable start_, done_;
    const std::function<void(int, int)>* body_ = nullptr;
    int total_ = 0;
    int pending_ = 0;
    long long generation_ = 0;
    bool stop_ = false;
};

}  // namespace detail

// Runs body(begin, end) over a partition of [0, n).
template <class Body>
void parallel_for(int n, Body&& body) {
    const std::function<void(int, int)> fn = std::forward<Body>(body);
    detail::Pool::instance().run(n, fn);
}

}  // namespace hmcf
