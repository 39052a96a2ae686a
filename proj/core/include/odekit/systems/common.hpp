#pragma once

#include <cstddef>

#include "odekit/algebra.hpp"

namespace odekit {

/// How a system evaluates its right-hand side: one loop per vector
/// assignment, or all assignments fused into one loop.
enum class evaluation { unfused, fused };

constexpr evaluation default_evaluation(backend_kind k) noexcept {
    return k == backend_kind::fused ? evaluation::fused : evaluation::unfused;
}

/// Instrumentation shared by all systems: how many right-hand-side calls were
/// made and how many full passes over the state they performed in total.
struct rhs_counters {
    std::size_t evaluations = 0;
    std::size_t passes = 0;
};

}  // namespace odekit
