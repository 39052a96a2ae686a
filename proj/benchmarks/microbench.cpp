#include <benchmark/benchmark.h>

#include "odekit/parallel.hpp"
#include "odekit/steppers.hpp"
#include "odekit/systems/lattice.hpp"
#include "odekit/systems/lorenz.hpp"
#include "odekit/systems/phase_chain.hpp"

using namespace odekit;

namespace {

void set_bytes(benchmark::State& state, std::size_t per_iteration) {
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * per_iteration));
}

template <evaluation Mode>
void lorenz_rhs(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    lorenz_ensemble sys(default_lorenz_params(m), serial_algebra{}, Mode);
    const auto x = sys.initial_state();
    multi_state d(3, m);
    for (auto _ : state) {
        sys(x, d, 0);
        benchmark::DoNotOptimize(d.flat().data());
    }
    set_bytes(state, 8 * m * (Mode == evaluation::fused ? 7 : 12));
}
BENCHMARK(lorenz_rhs<evaluation::unfused>)->Name("lorenz_rhs/unfused")->RangeMultiplier(10)->Range(1000, 1'000'000);
BENCHMARK(lorenz_rhs<evaluation::fused>)->Name("lorenz_rhs/fused")->RangeMultiplier(10)->Range(1000, 1'000'000);

template <evaluation Mode>
void phase_rhs(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto [params, phi] = random_phase_chain(n, 1);
    phase_chain sys(params, serial_algebra{}, Mode);
    state_vector d(n);
    for (auto _ : state) {
        sys(phi, d, 0);
        benchmark::DoNotOptimize(d.data());
    }
    set_bytes(state, 8 * n * (Mode == evaluation::fused ? 3 : 5));
}
BENCHMARK(phase_rhs<evaluation::unfused>)->Name("phase_rhs/unfused")->RangeMultiplier(10)->Range(1000, 1'000'000);
BENCHMARK(phase_rhs<evaluation::fused>)->Name("phase_rhs/fused")->RangeMultiplier(10)->Range(1000, 1'000'000);

template <bool Ell>
void lattice_spmv(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto op = build_lattice_operator(side, side, make_disorder(3, side, side, 0.5, 1.5));
    const state_vector x(side * side, 1.0);
    state_vector y(side * side);
    for (auto _ : state) {
        if constexpr (Ell)
            spmv(op.ell, x, std::span<scalar>(y));
        else
            spmv(op.csr, x, std::span<scalar>(y));
        benchmark::DoNotOptimize(y.data());
    }
    const std::size_t nnz = op.csr.nnz();
    set_bytes(state, 20 * nnz + 8 * side * side);
}
BENCHMARK(lattice_spmv<false>)->Name("spmv/csr")->Arg(32)->Arg(316)->Arg(1000);
BENCHMARK(lattice_spmv<true>)->Name("spmv/ell")->Arg(32)->Arg(316)->Arg(1000);

template <class Algebra>
void rk4_lorenz(benchmark::State& state, Algebra algebra) {
    const auto m = static_cast<std::size_t>(state.range(0));
    lorenz_ensemble sys(default_lorenz_params(m), algebra);
    auto x = sys.initial_state();
    runge_kutta4<multi_state, Algebra> rk(algebra, false);
    for (auto _ : state) {
        rk.do_step(sys, x, 0.0, 1e-4);
        benchmark::DoNotOptimize(x.flat().data());
    }
}
BENCHMARK_CAPTURE(rk4_lorenz, serial, serial_algebra{})->RangeMultiplier(10)->Range(1000, 1'000'000);
BENCHMARK_CAPTURE(rk4_lorenz, fused, fused_algebra{})->RangeMultiplier(10)->Range(1000, 1'000'000);
BENCHMARK_CAPTURE(rk4_lorenz, parallel, parallel_algebra{})->RangeMultiplier(10)->Range(1000, 1'000'000);

}  // namespace

BENCHMARK_MAIN();
