#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "odekit/state.hpp"

namespace odekit {

enum class backend_kind { serial, parallel, fused };

constexpr std::string_view to_string(backend_kind k) noexcept {
    switch (k) {
        case backend_kind::serial: return "serial";
        case backend_kind::parallel: return "parallel";
        case backend_kind::fused: return "fused";
    }
    return "?";
}

backend_kind parse_backend(std::string_view name);

class dimension_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

template <class... Sizes>
void check_equal_lengths(const char* what, std::size_t n, Sizes... rest) {
    if (((rest != n) || ...)) {
        std::string msg = std::string(what) + ": length mismatch (" + std::to_string(n);
        ((msg += ", " + std::to_string(rest)), ...);
        throw dimension_error(msg + ")");
    }
}

}  // namespace detail

/// The for_each family shared by every backend. Derived classes supply
///
///     template <class Body> void for_range(std::size_t n, Body&& body) const;
///
/// which must call body(begin, end) on a set of disjoint ranges covering
/// [0, n) and return once all of them are done. for_eachN applies op exactly
/// once per index to the i-th elements of its arguments; only the first
/// argument is written. The first argument may alias any of the others.
template <class Derived>
class algebra_base {
public:
    template <class S1, class S2, class Op>
    void for_each2(S1& s1, const S2& s2, Op op) const {
        apply("for_each2", op, flat(s1), flat(s2));
    }

    template <class S1, class S2, class S3, class Op>
    void for_each3(S1& s1, const S2& s2, const S3& s3, Op op) const {
        apply("for_each3", op, flat(s1), flat(s2), flat(s3));
    }

    template <class S1, class S2, class S3, class S4, class Op>
    void for_each4(S1& s1, const S2& s2, const S3& s3, const S4& s4, Op op) const {
        apply("for_each4", op, flat(s1), flat(s2), flat(s3), flat(s4));
    }

    template <class S1, class S2, class S3, class S4, class S5, class Op>
    void for_each5(S1& s1, const S2& s2, const S3& s3, const S4& s4, const S5& s5, Op op) const {
        apply("for_each5", op, flat(s1), flat(s2), flat(s3), flat(s4), flat(s5));
    }

    template <class S1, class S2, class S3, class S4, class S5, class S6, class Op>
    void for_each6(S1& s1, const S2& s2, const S3& s3, const S4& s4, const S5& s5, const S6& s6,
                   Op op) const {
        apply("for_each6", op, flat(s1), flat(s2), flat(s3), flat(s4), flat(s5), flat(s6));
    }

    /// True when every element is finite. Chunks are reduced with a logical
    /// and, so the answer does not depend on the schedule.
    template <class S>
    bool all_finite(const S& s) const {
        const std::span<const scalar> v = flat(s);
        std::atomic<bool> ok{true};
        static_cast<const Derived&>(*this).for_range(v.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                if (!std::isfinite(v[i])) {
                    ok.store(false, std::memory_order_relaxed);
                    return;
                }
            }
        });
        return ok.load();
    }

private:
    template <class Op, class... Rest>
    void apply(const char* what, Op& op, std::span<scalar> s1, Rest... rest) const {
        detail::check_equal_lengths(what, s1.size(), rest.size()...);
        static_cast<const Derived&>(*this).for_range(s1.size(), [&](std::size_t b, std::size_t e) {
            scalar* t = s1.data();
            for (std::size_t i = b; i < e; ++i) op(t[i], rest[i]...);
        });
    }
};

/// Index order 0..N-1 on the calling thread.
class serial_algebra : public algebra_base<serial_algebra> {
public:
    static constexpr backend_kind kind = backend_kind::serial;

    template <class Body>
    void for_range(std::size_t n, Body&& body) const {
        if (n > 0) body(std::size_t{0}, n);
    }
    std::size_t workers() const noexcept { return 1; }
};

/// Serial iteration tagged as the fused backend: every for_eachN is already a
/// single pass, and systems bound to it evaluate their right-hand sides as
/// fused expression groups.
class fused_algebra : public algebra_base<fused_algebra> {
public:
    static constexpr backend_kind kind = backend_kind::fused;

    template <class Body>
    void for_range(std::size_t n, Body&& body) const {
        if (n > 0) body(std::size_t{0}, n);
    }
    std::size_t workers() const noexcept { return 1; }
};

}  // namespace odekit
