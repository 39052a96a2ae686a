#include "odekit/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace odekit {

backend_kind parse_backend(std::string_view name) {
    if (name == "serial") return backend_kind::serial;
    if (name == "parallel") return backend_kind::parallel;
    if (name == "fused") return backend_kind::fused;
    throw std::invalid_argument("unknown backend '" + std::string(name) + "'");
}

std::vector<chunk> chunk_bounds(std::size_t n, std::size_t p) {
    if (p == 0) throw std::invalid_argument("chunk_bounds: worker count must be >= 1");
    std::vector<chunk> out;
    if (n == 0) return out;
    const std::size_t width = (n + p - 1) / p;
    for (std::size_t b = 0; b < n; b += width) out.push_back({b, std::min(b + width, n)});
    return out;
}

std::size_t default_worker_count() {
    if (const char* env = std::getenv("ODEKIT_WORKERS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
        throw std::invalid_argument(std::string("ODEKIT_WORKERS must be a positive integer, got '") +
                                    env + "'");
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

thread_pool::thread_pool(std::size_t threads) {
    if (threads == 0) throw std::invalid_argument("thread_pool: need at least one thread");
    m_workers.reserve(threads - 1);
    for (std::size_t i = 1; i < threads; ++i) m_workers.emplace_back([this, i] { worker_loop(i); });
}

thread_pool::~thread_pool() {
    {
        std::lock_guard lock(m_mutex);
        m_stop = true;
    }
    m_start.notify_all();
    for (auto& t : m_workers) t.join();
}

void thread_pool::run(std::size_t count, const std::function<void(std::size_t)>& task) {
    if (count == 0) return;
    if (count > size()) throw std::invalid_argument("thread_pool::run: more tasks than threads");
    std::lock_guard run_lock(m_run_mutex);
    {
        std::lock_guard lock(m_mutex);
        m_task = &task;
        m_count = count;
        m_pending = count - 1;
        m_error = nullptr;
        ++m_generation;
    }
    if (count > 1) m_start.notify_all();

    std::exception_ptr local;
    try {
        task(0);
    } catch (...) {
        local = std::current_exception();
    }

    std::unique_lock lock(m_mutex);
    m_done.wait(lock, [this] { return m_pending == 0; });
    m_task = nullptr;
    if (local) std::rethrow_exception(local);
    if (m_error) std::rethrow_exception(m_error);
}

void thread_pool::worker_loop(std::size_t index) {
    std::size_t seen = 0;
    for (;;) {
        const std::function<void(std::size_t)>* task = nullptr;
        {
            std::unique_lock lock(m_mutex);
            m_start.wait(lock, [&] { return m_stop || m_generation != seen; });
            if (m_stop) return;
            seen = m_generation;
            if (index >= m_count) continue;
            task = m_task;
        }
        std::exception_ptr err;
        try {
            (*task)(index);
        } catch (...) {
            err = std::current_exception();
        }
        std::lock_guard lock(m_mutex);
        if (err && !m_error) m_error = err;
        if (--m_pending == 0) m_done.notify_one();
    }
}

parallel_algebra::parallel_algebra(std::size_t workers) : m_workers(workers) {
    if (workers == 0) throw std::invalid_argument("parallel_algebra: worker count must be >= 1");
    if (workers > 1) m_pool = std::make_shared<thread_pool>(workers);
}

}  // namespace odekit
