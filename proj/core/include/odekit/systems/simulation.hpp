#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "odekit/algebra.hpp"
#include "odekit/state.hpp"
#include "odekit/systems/common.hpp"
#include "odekit/systems/lattice.hpp"

namespace odekit {

enum class system_kind { lorenz, phase, lattice };

constexpr std::string_view to_string(system_kind s) noexcept {
    switch (s) {
        case system_kind::lorenz: return "lorenz";
        case system_kind::phase: return "phase";
        case system_kind::lattice: return "lattice";
    }
    return "?";
}

system_kind parse_system(std::string_view name);

/// Side length of the square grid used for a lattice of roughly n nodes.
std::size_t lattice_side(std::size_t n);

/// Problem size actually simulated for a requested size n: ensemble members
/// for Lorenz, oscillators for the chain, side^2 nodes for the lattice.
std::size_t problem_size(system_kind system, std::size_t n);

struct simulation_config {
    system_kind system = system_kind::lorenz;
    backend_kind backend = backend_kind::serial;
    std::size_t size = 1000;
    scalar dt = 0.01;
    std::uint64_t seed = 42;
    std::size_t workers = 0;  // parallel backend only; 0 = default_worker_count()
    std::optional<evaluation> mode;  // default follows the backend
    sparse_format format = sparse_format::csr;
    bool check_finite = true;

    std::optional<scalar> lorenz_R;  // same R for every member instead of the sweep
    std::optional<scalar> omega;     // constant phase velocity instead of random
    std::optional<scalar> phase0;    // constant initial phase instead of random
    scalar beta = 1.0;
    scalar w_lo = 0.5;
    scalar w_hi = 1.5;
};

/// One benchmark system bound to a backend and its stepper (RK4 for Lorenz
/// and the phase chain, Stoermer-Verlet for the lattice). Construction does
/// all allocation and setup; advance() only integrates.
class simulation {
public:
    virtual ~simulation() = default;

    /// Restores the initial condition and t = 0. Counters keep running.
    virtual void reset() = 0;
    /// Integrates `steps` fixed steps. A step_error carries the absolute step
    /// index since the last reset.
    virtual void advance(std::size_t steps) = 0;

    /// Flat state: X|Y|Z for Lorenz, phi for the chain, q|p for the lattice.
    virtual std::span<const scalar> state() const = 0;
    virtual scalar time() const = 0;
    virtual std::size_t size() const = 0;
    virtual rhs_counters counters() const = 0;
    virtual evaluation mode() const = 0;
    /// Right-hand-side evaluations per step (4 for RK4, 2 for Verlet).
    virtual std::size_t evaluations_per_step() const = 0;

    const simulation_config& config() const noexcept { return m_config; }

protected:
    explicit simulation(simulation_config c) : m_config(std::move(c)) {}
    simulation_config m_config;
};

std::unique_ptr<simulation> make_simulation(const simulation_config& config);

}  // namespace odekit
