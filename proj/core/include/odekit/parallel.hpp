#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "odekit/algebra.hpp"

namespace odekit {

/// Half-open index range [begin, end).
struct chunk {
    std::size_t begin;
    std::size_t end;
    friend bool operator==(const chunk&, const chunk&) = default;
};

/// Chunk c covers [c*w, min((c+1)*w, n)) with w = ceil(n/p). Empty trailing
/// chunks are dropped, so at most p chunks are returned.
std::vector<chunk> chunk_bounds(std::size_t n, std::size_t p);

/// Worker count from the ODEKIT_WORKERS environment variable, falling back to
/// std::thread::hardware_concurrency() (and to 1 if that is unknown).
std::size_t default_worker_count();

/// Fixed set of threads that executes task indices 0..count-1 with a static
/// assignment: task t runs on thread t, the calling thread taking task 0.
class thread_pool {
public:
    explicit thread_pool(std::size_t threads);
    ~thread_pool();

    thread_pool(const thread_pool&) = delete;
    thread_pool& operator=(const thread_pool&) = delete;

    std::size_t size() const noexcept { return m_workers.size() + 1; }

    /// Runs task(0..count-1) and blocks until all finish; count <= size().
    /// The first exception thrown by any task is rethrown here.
    void run(std::size_t count, const std::function<void(std::size_t)>& task);

private:
    void worker_loop(std::size_t index);

    std::vector<std::thread> m_workers;
    std::mutex m_run_mutex;  // serializes concurrent run() callers
    std::mutex m_mutex;
    std::condition_variable m_start;
    std::condition_variable m_done;
    const std::function<void(std::size_t)>* m_task = nullptr;
    std::size_t m_count = 0;
    std::size_t m_pending = 0;
    std::size_t m_generation = 0;
    bool m_stop = false;
    std::exception_ptr m_error;
};

/// Deterministic chunked parallel backend. Chunk boundaries are a pure
/// function of (n, workers), and every element is computed by the same
/// arithmetic as the serial backend, so results are bitwise identical.
class parallel_algebra : public algebra_base<parallel_algebra> {
public:
    static constexpr backend_kind kind = backend_kind::parallel;

    explicit parallel_algebra(std::size_t workers = default_worker_count());

    std::size_t workers() const noexcept { return m_workers; }

    template <class Body>
    void for_range(std::size_t n, Body&& body) const {
        if (n == 0) return;
        if (m_workers == 1) {
            body(std::size_t{0}, n);
            return;
        }
        const auto chunks = chunk_bounds(n, m_workers);
        const std::function<void(std::size_t)> task = [&](std::size_t c) {
            body(chunks[c].begin, chunks[c].end);
        };
        m_pool->run(chunks.size(), task);
    }

private:
    std::size_t m_workers;
    // Shared so the algebra stays a copyable configuration object.
    std::shared_ptr<thread_pool> m_pool;
};

}  // namespace odekit
