#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "odekit/expr/expression.hpp"
#include "odekit/linalg/sparse.hpp"
#include "odekit/state.hpp"
#include "odekit/systems/common.hpp"
#include "odekit/systems/disorder.hpp"

namespace odekit {

struct lattice_params {
    std::size_t nx = 1;
    std::size_t ny = 1;
    scalar beta = 1.0;
    state_vector omega2;  // per-node squared frequency, row-major
    std::uint64_t seed = 0;
    scalar w_lo = 0.5;
    scalar w_hi = 1.5;
};

/// Parameters with omega2 drawn from make_disorder(seed, nx, ny, w_lo, w_hi).
inline lattice_params make_lattice_params(std::size_t nx, std::size_t ny, scalar beta,
                                          std::uint64_t seed, scalar w_lo = 0.5, scalar w_hi = 1.5) {
    return {nx, ny, beta, make_disorder(seed, nx, ny, w_lo, w_hi), seed, w_lo, w_hi};
}

enum class sparse_format { csr, ell };

constexpr std::string_view to_string(sparse_format f) noexcept {
    return f == sparse_format::csr ? "csr" : "ell";
}

/// Nonlinear disordered Hamiltonian lattice. Only the momentum derivative is
/// provided (qdot = p is implicit):
///
///     dp = A q - beta q^3,   A = diag(-omega2 - 4) + adjacency
///
/// The product A q is one sparse pass into scratch. The cubic term is one
/// fused elementwise pass, or two when unfused (cube, then combine).
template <class Algebra>
class disordered_lattice {
public:
    disordered_lattice(lattice_params params, Algebra algebra,
                       evaluation mode = default_evaluation(Algebra::kind),
                       sparse_format format = sparse_format::csr)
        : m_params(std::move(params)), m_algebra(std::move(algebra)), m_mode(mode), m_format(format),
          m_op(std::make_shared<const lattice_operator>(
              build_lattice_operator(m_params.nx, m_params.ny, m_params.omega2))),
          m_fused(expr::program({{0, expr::arg(0) - m_params.beta * expr::pow3(expr::arg(1))}})),
          m_unfused(expr::program({{1, expr::pow3(expr::arg(1))},
                                   {0, expr::arg(0) - m_params.beta * expr::arg(2)}})) {}

    std::size_t size() const noexcept { return m_params.nx * m_params.ny; }
    const lattice_params& params() const noexcept { return m_params; }
    const lattice_operator& op() const noexcept { return *m_op; }
    const rhs_counters& counters() const noexcept { return m_counters; }
    evaluation mode() const noexcept { return m_mode; }
    sparse_format format() const noexcept { return m_format; }

    void operator()(std::span<const scalar> q, std::span<scalar> dp) {
        detail::check_equal_lengths("disordered_lattice", size(), q.size(), dp.size());
        if (m_aq.size() != q.size()) m_aq.resize(q.size());
        ++m_counters.evaluations;
        if (m_format == sparse_format::csr)
            spmv(m_op->csr, q, std::span<scalar>(m_aq), m_algebra);
        else
            spmv(m_op->ell, q, std::span<scalar>(m_aq), m_algebra);
        ++m_counters.passes;
        if (m_mode == evaluation::fused) {
            expr::fused_group g(m_fused, {m_aq, q}, {dp});
            g.execute(m_algebra);
            m_counters.passes += g.pass_count();
        } else {
            if (m_cube.size() != q.size()) m_cube.resize(q.size());
            expr::unfused_group g(m_unfused, {m_aq, q, m_cube}, {dp, m_cube});
            g.execute(m_algebra);
            m_counters.passes += g.pass_count();
        }
    }

    /// H = sum p^2/2 - q.A q/2 + beta/4 sum q^4.
    scalar energy(std::span<const scalar> q, std::span<const scalar> p) const {
        detail::check_equal_lengths("disordered_lattice::energy", size(), q.size(), p.size());
        state_vector aq(q.size());
        spmv(m_op->csr, q, std::span<scalar>(aq));
        scalar h = 0;
        for (std::size_t k = 0; k < q.size(); ++k) {
            const scalar q2 = q[k] * q[k];
            h += 0.5 * p[k] * p[k] - 0.5 * q[k] * aq[k] + 0.25 * m_params.beta * q2 * q2;
        }
        return h;
    }

private:
    lattice_params m_params;
    Algebra m_algebra;
    evaluation m_mode;
    sparse_format m_format;
    std::shared_ptr<const lattice_operator> m_op;
    expr::program m_fused;
    expr::program m_unfused;
    state_vector m_aq;
    state_vector m_cube;
    rhs_counters m_counters;
};

/// Initial (q, p) as a two-component state, both uniform in [-1, 1] from a
/// stream seeded with seed + 1 (the disorder uses `seed` itself).
inline multi_state random_lattice_state(std::size_t nodes, std::uint64_t seed) {
    uniform_stream rng(seed + 1);
    multi_state s(2, nodes);
    for (auto& v : s.flat()) v = rng.next(-1.0, 1.0);
    return s;
}

}  // namespace odekit
