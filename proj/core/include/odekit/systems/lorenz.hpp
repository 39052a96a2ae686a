#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>

#include "odekit/expr/expression.hpp"
#include "odekit/state.hpp"
#include "odekit/systems/common.hpp"

namespace odekit {

struct lorenz_params {
    scalar sigma = 10.0;
    scalar b = 8.0 / 3.0;
    state_vector R;  // one Rayleigh parameter per ensemble member
};

/// m values spread evenly over [lo, hi]; a single member gets the midpoint.
inline state_vector sweep_parameter(std::size_t m, scalar lo, scalar hi) {
    state_vector r(m);
    if (m == 1) {
        r[0] = lo + (hi - lo) / 2;
        return r;
    }
    for (std::size_t i = 0; i < m; ++i)
        r[i] = lo + (hi - lo) * static_cast<scalar>(i) / static_cast<scalar>(m - 1);
    return r;
}

inline lorenz_params default_lorenz_params(std::size_t members) {
    return {10.0, 8.0 / 3.0, sweep_parameter(members, 0.0, 56.0)};
}

/// Ensemble of independent Lorenz systems, X/Y/Z stored as the three
/// components of a multi_state:
///
///     dX = sigma (Y - X),  dY = R X - Y - X Z,  dZ = X Y - b Z
///
/// Unfused evaluation makes three passes (one per component), fused
/// evaluation one.
template <class Algebra>
class lorenz_ensemble {
public:
    lorenz_ensemble(lorenz_params params, Algebra algebra,
                    evaluation mode = default_evaluation(Algebra::kind))
        : m_params(std::move(params)), m_algebra(std::move(algebra)), m_mode(mode),
          m_program(statements(m_params)) {
        if (m_params.R.empty()) throw std::invalid_argument("lorenz_ensemble: need at least one member");
    }

    std::size_t members() const noexcept { return m_params.R.size(); }
    const lorenz_params& params() const noexcept { return m_params; }
    const rhs_counters& counters() const noexcept { return m_counters; }
    evaluation mode() const noexcept { return m_mode; }

    /// Initial state with every member at (x0, y0, z0).
    multi_state initial_state(scalar x0 = 10, scalar y0 = 10, scalar z0 = 10) const {
        multi_state s(3, members());
        for (auto& v : s.component(0)) v = x0;
        for (auto& v : s.component(1)) v = y0;
        for (auto& v : s.component(2)) v = z0;
        return s;
    }

    void operator()(const multi_state& x, multi_state& dxdt, scalar /*t*/) {
        if (x.components() != 3 || x.length() != members())
            throw dimension_error("lorenz_ensemble: state must be 3 x " + std::to_string(members()));
        resize_like(dxdt, x);
        std::vector<std::span<const scalar>> args{x.component(0), x.component(1), x.component(2),
                                                  m_params.R};
        std::vector<std::span<scalar>> targets{dxdt.component(0), dxdt.component(1),
                                               dxdt.component(2)};
        ++m_counters.evaluations;
        if (m_mode == evaluation::fused) {
            expr::fused_group g(m_program, std::move(args), std::move(targets));
            g.execute(m_algebra);
            m_counters.passes += g.pass_count();
        } else {
            expr::unfused_group g(m_program, std::move(args), std::move(targets));
            g.execute(m_algebra);
            m_counters.passes += g.pass_count();
        }
    }

    /// Argument slots: 0=X, 1=Y, 2=Z, 3=R. Targets: 0=dX, 1=dY, 2=dZ.
    static expr::program statements(const lorenz_params& p) {
        using namespace expr;
        const auto X = arg(0), Y = arg(1), Z = arg(2), R = arg(3);
        return program({
            {0, p.sigma * (Y - X)},
            {1, R * X - Y - X * Z},
            {2, X * Y - p.b * Z},
        });
    }

private:
    lorenz_params m_params;
    Algebra m_algebra;
    evaluation m_mode;
    expr::program m_program;
    rhs_counters m_counters;
};

}  // namespace odekit
