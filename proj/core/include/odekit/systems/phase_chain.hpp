#pragma once

#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "odekit/expr/expression.hpp"
#include "odekit/linalg/stencil.hpp"
#include "odekit/state.hpp"
#include "odekit/systems/common.hpp"
#include "odekit/systems/disorder.hpp"

namespace odekit {

struct phase_chain_params {
    state_vector omega;  // per-oscillator phase velocity
};

/// Chain of nearest-neighbour coupled phase oscillators,
///
///     dphi_i = omega_i + sin(phi_{i+1} - phi_i) + sin(phi_i - phi_{i-1}),
///
/// with clamped (free) ends. Unfused evaluation is a stencil pass into a
/// scratch vector followed by the omega addition; fused evaluation is the
/// single statement dphi = omega + S(phi).
template <class Algebra>
class phase_chain {
public:
    phase_chain(phase_chain_params params, Algebra algebra,
                evaluation mode = default_evaluation(Algebra::kind))
        : m_params(std::move(params)), m_algebra(std::move(algebra)), m_mode(mode),
          m_fused(fused_statements()), m_add(expr::program({{0, expr::arg(0) + expr::arg(1)}})) {
        if (m_params.omega.empty()) throw std::invalid_argument("phase_chain: need at least one oscillator");
    }

    std::size_t size() const noexcept { return m_params.omega.size(); }
    const phase_chain_params& params() const noexcept { return m_params; }
    const rhs_counters& counters() const noexcept { return m_counters; }
    evaluation mode() const noexcept { return m_mode; }

    void operator()(const state_vector& phi, state_vector& dphidt, scalar /*t*/) {
        detail::check_equal_lengths("phase_chain", size(), phi.size());
        if (dphidt.size() != phi.size()) dphidt.resize(phi.size());
        ++m_counters.evaluations;
        if (m_mode == evaluation::fused) {
            expr::fused_group g(m_fused, {phi, m_params.omega}, {dphidt});
            g.execute(m_algebra);
            m_counters.passes += g.pass_count();
        } else {
            if (m_coupling.size() != phi.size()) m_coupling.resize(phi.size());
            m_stencil.apply(phi, m_coupling, m_algebra);
            ++m_counters.passes;
            expr::unfused_group g(m_add, {m_params.omega, m_coupling}, {dphidt});
            g.execute(m_algebra);
            m_counters.passes += g.pass_count();
        }
    }

    /// Argument slots: 0=phi, 1=omega. Target 0=dphi.
    static expr::program fused_statements() {
        using namespace expr;
        const auto phi = arg(0);
        const auto coupling = sin(shift(0, +1) - phi) + sin(phi - shift(0, -1));
        return program({{0, arg(1) + coupling}});
    }

private:
    phase_chain_params m_params;
    Algebra m_algebra;
    evaluation m_mode;
    phase_stencil m_stencil;
    expr::program m_fused;
    expr::program m_add;
    state_vector m_coupling;
    rhs_counters m_counters;
};

/// Default benchmark setup: omega uniform in [0, 1) and initial phases uniform
/// in [0, 2 pi), both drawn from one stream seeded with `seed`.
inline std::pair<phase_chain_params, state_vector> random_phase_chain(std::size_t n, std::uint64_t seed) {
    uniform_stream rng(seed);
    phase_chain_params p{state_vector(n)};
    state_vector phi(n);
    for (auto& w : p.omega) w = rng.unit();
    for (auto& v : phi) v = rng.next(0.0, 2 * std::numbers::pi);
    return {std::move(p), std::move(phi)};
}

}  // namespace odekit
