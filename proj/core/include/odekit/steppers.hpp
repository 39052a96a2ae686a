#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

#include "odekit/algebra.hpp"
#include "odekit/operations.hpp"
#include "odekit/state.hpp"

namespace odekit {

/// A step that produced (or was fed) non-finite values. integrate_n_steps
/// attaches the index of the failing step.
class step_error : public std::runtime_error {
public:
    explicit step_error(const std::string& what, std::optional<std::size_t> step = std::nullopt)
        : std::runtime_error(what), m_step(step) {}

    std::optional<std::size_t> step_index() const noexcept { return m_step; }

private:
    std::optional<std::size_t> m_step;
};

namespace detail {

template <class S>
void poison(S& s) {
    for (auto& v : flat(s)) v = std::numeric_limits<scalar>::quiet_NaN();
}

template <class Algebra, class S>
void require_finite(const Algebra& algebra, const S& s, const char* stepper, const char* what) {
    if (!algebra.all_finite(s))
        throw step_error(std::string(stepper) + ": non-finite values in " + what);
}

}  // namespace detail

/// Explicit Euler: x <- 1*x + dt*f(x, t), one for_each3 pass.
template <class State, class Algebra = serial_algebra>
class euler {
public:
    using state_type = State;
    using algebra_type = Algebra;

    explicit euler(Algebra algebra = Algebra{}, bool check_finite = true)
        : m_algebra(std::move(algebra)), m_check(check_finite) {}

    template <class System>
    void do_step(System&& system, State& x, scalar t, scalar dt) {
        resize_like(m_dxdt, x);
        system(std::as_const(x), m_dxdt, t);
        if (m_check) detail::require_finite(m_algebra, m_dxdt, "euler", "right-hand side");
        m_algebra.for_each3(x, x, m_dxdt, scale_sum2{1.0, dt});
    }

    /// Overwrites scratch with NaN; a correct step never reads it.
    void poison_scratch() { detail::poison(m_dxdt); }

    const Algebra& algebra() const noexcept { return m_algebra; }

private:
    Algebra m_algebra;
    State m_dxdt;
    bool m_check;
};

/// Classical fourth-order Runge-Kutta (weights 1/6, 1/3, 1/3, 1/6). Each stage
/// combination is a single for_eachN pass; the final update folds all four
/// stages into one for_each6 with scale_sum5.
template <class State, class Algebra = serial_algebra>
class runge_kutta4 {
public:
    using state_type = State;
    using algebra_type = Algebra;

    explicit runge_kutta4(Algebra algebra = Algebra{}, bool check_finite = true)
        : m_algebra(std::move(algebra)), m_check(check_finite) {}

    template <class System>
    void do_step(System&& system, State& x, scalar t, scalar dt) {
        resize_like(m_k1, x);
        resize_like(m_k2, x);
        resize_like(m_k3, x);
        resize_like(m_k4, x);
        resize_like(m_tmp, x);

        const scalar dt2 = dt / 2;
        const scalar dt3 = dt / 3;
        const scalar dt6 = dt / 6;

        system(std::as_const(x), m_k1, t);
        check(m_k1);
        m_algebra.for_each3(m_tmp, x, m_k1, scale_sum2{1.0, dt2});

        system(std::as_const(m_tmp), m_k2, t + dt2);
        check(m_k2);
        m_algebra.for_each3(m_tmp, x, m_k2, scale_sum2{1.0, dt2});

        system(std::as_const(m_tmp), m_k3, t + dt2);
        check(m_k3);
        m_algebra.for_each3(m_tmp, x, m_k3, scale_sum2{1.0, dt});

        system(std::as_const(m_tmp), m_k4, t + dt);
        check(m_k4);
        m_algebra.for_each6(x, x, m_k1, m_k2, m_k3, m_k4, scale_sum5{1.0, dt6, dt3, dt3, dt6});
    }

    void poison_scratch() {
        detail::poison(m_k1);
        detail::poison(m_k2);
        detail::poison(m_k3);
        detail::poison(m_k4);
        detail::poison(m_tmp);
    }

    const Algebra& algebra() const noexcept { return m_algebra; }

private:
    void check(const State& k) const {
        if (m_check) detail::require_finite(m_algebra, k, "runge_kutta4", "right-hand side");
    }

    Algebra m_algebra;
    State m_k1, m_k2, m_k3, m_k4, m_tmp;
    bool m_check;
};

/// Stoermer-Verlet for separable Hamiltonians with qdot = p. The system only
/// supplies the momentum derivative:
///
///     system(std::span<const scalar> q, std::span<scalar> dpdt)
///
/// One step: p += dt/2 f(q); q += dt p; p += dt/2 f(q). The phase-space
/// point is passed either as std::tie(q, p) or as a two-component
/// multi_state. The time argument is ignored; the system is autonomous.
template <class Algebra = serial_algebra>
class stormer_verlet {
public:
    using algebra_type = Algebra;

    explicit stormer_verlet(Algebra algebra = Algebra{}, bool check_finite = true)
        : m_algebra(std::move(algebra)), m_check(check_finite) {}

    template <class System, class Q, class P>
    void do_step(System&& system, std::tuple<Q&, P&> qp, scalar /*t*/, scalar dt) {
        std::span<scalar> q = flat(std::get<0>(qp));
        std::span<scalar> p = flat(std::get<1>(qp));
        detail::check_equal_lengths("stormer_verlet", q.size(), p.size());
        if (m_dpdt.size() != q.size()) m_dpdt.resize(q.size());
        const scalar half = dt / 2;

        evaluate(system, q);
        m_algebra.for_each3(p, p, m_dpdt, scale_sum2{1.0, half});
        m_algebra.for_each3(q, q, p, scale_sum2{1.0, dt});
        evaluate(system, q);
        m_algebra.for_each3(p, p, m_dpdt, scale_sum2{1.0, half});
    }

    template <class System>
    void do_step(System&& system, multi_state& qp, scalar t, scalar dt) {
        if (qp.components() != 2)
            throw dimension_error("stormer_verlet: phase-space state needs exactly 2 components");
        auto q = qp.component(0);
        auto p = qp.component(1);
        do_step(system, std::tie(q, p), t, dt);
    }

    void poison_scratch() { detail::poison(m_dpdt); }

    const Algebra& algebra() const noexcept { return m_algebra; }

private:
    template <class System>
    void evaluate(System& system, std::span<scalar> q) {
        system(std::span<const scalar>(q), std::span<scalar>(m_dpdt));
        if (m_check) detail::require_finite(m_algebra, m_dpdt, "stormer_verlet", "momentum derivative");
    }

    Algebra m_algebra;
    state_vector m_dpdt;
    bool m_check;
};

/// Applies the stepper n times starting at t0 with a fixed step. The observer,
/// if given, is called after every step as observer(state, t). Returns
/// t0 + n*dt. Step failures are rethrown with the failing step index.
template <class Stepper, class System, class State, class Observer>
scalar integrate_n_steps(Stepper& stepper, System&& system, State& x, scalar t0, scalar dt,
                         std::size_t n, Observer&& observer) {
    for (std::size_t k = 0; k < n; ++k) {
        const scalar t = t0 + static_cast<scalar>(k) * dt;
        try {
            stepper.do_step(system, x, t, dt);
        } catch (const step_error& e) {
            throw step_error("step " + std::to_string(k) + ": " + e.what(), k);
        }
        observer(std::as_const(x), t0 + static_cast<scalar>(k + 1) * dt);
    }
    return t0 + static_cast<scalar>(n) * dt;
}

template <class Stepper, class System, class State>
scalar integrate_n_steps(Stepper& stepper, System&& system, State& x, scalar t0, scalar dt,
                         std::size_t n) {
    return integrate_n_steps(stepper, std::forward<System>(system), x, t0, dt, n,
                             [](const State&, scalar) {});
}

}  // namespace odekit
