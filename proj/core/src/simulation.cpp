#include "odekit/systems/simulation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "odekit/parallel.hpp"
#include "odekit/steppers.hpp"
#include "odekit/systems/lattice.hpp"
#include "odekit/systems/lorenz.hpp"
#include "odekit/systems/phase_chain.hpp"

namespace odekit {

system_kind parse_system(std::string_view name) {
    if (name == "lorenz") return system_kind::lorenz;
    if (name == "phase") return system_kind::phase;
    if (name == "lattice") return system_kind::lattice;
    throw std::invalid_argument("unknown system '" + std::string(name) + "'");
}

std::size_t lattice_side(std::size_t n) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    return side == 0 ? 1 : side;
}

std::size_t problem_size(system_kind system, std::size_t n) {
    if (system == system_kind::lattice) {
        const std::size_t side = lattice_side(n);
        return side * side;
    }
    return n;
}

namespace {

template <class Stepper, class System, class State>
class simulation_impl final : public simulation {
public:
    simulation_impl(simulation_config c, Stepper stepper, System system, State initial,
                    std::size_t size, std::size_t evals_per_step)
        : simulation(std::move(c)), m_stepper(std::move(stepper)), m_system(std::move(system)),
          m_initial(std::move(initial)), m_state(m_initial), m_size(size), m_evals(evals_per_step) {}

    void reset() override {
        m_state = m_initial;
        m_steps = 0;
    }

    void advance(std::size_t steps) override {
        const scalar dt = m_config.dt;
        for (std::size_t k = 0; k < steps; ++k) {
            const scalar t = static_cast<scalar>(m_steps) * dt;
            try {
                m_stepper.do_step(m_system, m_state, t, dt);
            } catch (const step_error& e) {
                throw step_error("step " + std::to_string(m_steps) + ": " + e.what(), m_steps);
            }
            ++m_steps;
        }
    }

    std::span<const scalar> state() const override { return flat(m_state); }
    scalar time() const override { return static_cast<scalar>(m_steps) * m_config.dt; }
    std::size_t size() const override { return m_size; }
    rhs_counters counters() const override { return m_system.counters(); }
    evaluation mode() const override { return m_system.mode(); }
    std::size_t evaluations_per_step() const override { return m_evals; }

private:
    Stepper m_stepper;
    System m_system;
    State m_initial;
    State m_state;
    std::size_t m_size;
    std::size_t m_evals;
    std::size_t m_steps = 0;
};

template <class Algebra>
std::unique_ptr<simulation> build(const simulation_config& c, Algebra algebra) {
    if (c.size == 0) throw std::invalid_argument("simulation: size must be >= 1");
    if (!std::isfinite(c.dt)) throw std::invalid_argument("simulation: dt must be finite");
    const evaluation mode = c.mode.value_or(default_evaluation(Algebra::kind));

    switch (c.system) {
        case system_kind::lorenz: {
            auto params = default_lorenz_params(c.size);
            if (c.lorenz_R) params.R.assign(c.size, *c.lorenz_R);
            lorenz_ensemble<Algebra> sys(std::move(params), algebra, mode);
            auto x0 = sys.initial_state();
            runge_kutta4<multi_state, Algebra> stepper(algebra, c.check_finite);
            return std::make_unique<simulation_impl<decltype(stepper), decltype(sys), multi_state>>(
                c, std::move(stepper), std::move(sys), std::move(x0), c.size, 4);
        }
        case system_kind::phase: {
            auto [params, phi0] = random_phase_chain(c.size, c.seed);
            if (c.omega) params.omega.assign(c.size, *c.omega);
            if (c.phase0) phi0.assign(c.size, *c.phase0);
            phase_chain<Algebra> sys(std::move(params), algebra, mode);
            runge_kutta4<state_vector, Algebra> stepper(algebra, c.check_finite);
            return std::make_unique<simulation_impl<decltype(stepper), decltype(sys), state_vector>>(
                c, std::move(stepper), std::move(sys), std::move(phi0), c.size, 4);
        }
        case system_kind::lattice: {
            const std::size_t side = lattice_side(c.size);
            auto params = make_lattice_params(side, side, c.beta, c.seed, c.w_lo, c.w_hi);
            disordered_lattice<Algebra> sys(std::move(params), algebra, mode, c.format);
            auto qp0 = random_lattice_state(side * side, c.seed);
            stormer_verlet<Algebra> stepper(algebra, c.check_finite);
            return std::make_unique<simulation_impl<decltype(stepper), decltype(sys), multi_state>>(
                c, std::move(stepper), std::move(sys), std::move(qp0), side * side, 2);
        }
    }
    throw std::invalid_argument("simulation: unknown system");
}

}  // namespace

std::unique_ptr<simulation> make_simulation(const simulation_config& c) {
    switch (c.backend) {
        case backend_kind::serial: return build(c, serial_algebra{});
        case backend_kind::fused: return build(c, fused_algebra{});
        case backend_kind::parallel:
            return build(c, parallel_algebra(c.workers == 0 ? default_worker_count() : c.workers));
    }
    throw std::invalid_argument("simulation: unknown backend");
}

}  // namespace odekit
