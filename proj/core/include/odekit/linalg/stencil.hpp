#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "odekit/algebra.hpp"
#include "odekit/state.hpp"

namespace odekit {

/// Nearest-neighbour coupling of the phase-oscillator chain:
/// sin(right - center) + sin(center - left).
struct phase_coupling_kernel {
    scalar operator()(scalar left, scalar center, scalar right) const {
        return std::sin(right - center) + std::sin(center - left);
    }
};

/// Radius-1 stencil with clamped ends: the missing neighbour of an end element
/// is the end element itself (x[-1] := x[0], x[n] := x[n-1]).
template <class Kernel>
class stencil1d {
public:
    static constexpr std::size_t radius = 1;

    explicit stencil1d(Kernel kernel = Kernel{}) : m_kernel(kernel) {}

    template <class Algebra = serial_algebra>
    void apply(std::span<const scalar> x, std::span<scalar> y, const Algebra& algebra = {}) const {
        detail::check_equal_lengths("stencil1d::apply", x.size(), y.size());
        const std::size_t n = x.size();
        algebra.for_range(n, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                const scalar left = x[i == 0 ? 0 : i - 1];
                const scalar right = x[i + 1 == n ? i : i + 1];
                y[i] = m_kernel(left, x[i], right);
            }
        });
    }

    state_vector apply(std::span<const scalar> x) const {
        state_vector y(x.size());
        apply(x, std::span<scalar>(y));
        return y;
    }

    const Kernel& kernel() const noexcept { return m_kernel; }

private:
    Kernel m_kernel;
};

using phase_stencil = stencil1d<phase_coupling_kernel>;

}  // namespace odekit
