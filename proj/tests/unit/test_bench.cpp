#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "odekit/bench/bench.hpp"
#include "odekit/expr/expression.hpp"
#include "odekit/systems/lattice.hpp"
#include "odekit/systems/lorenz.hpp"
#include "odekit/systems/phase_chain.hpp"

using namespace odekit;
using namespace odekit::bench;

namespace {

/// Clock whose consecutive start/stop pairs are `durations` apart.
clock_fn scripted_clock(std::vector<double> durations) {
    auto state = std::make_shared<std::pair<std::vector<double>, std::size_t>>(std::move(durations), 0);
    return [state] {
        const std::size_t call = state->second++;
        const std::size_t rep = call / 2;
        const double start = 100.0 * static_cast<double>(rep);
        return call % 2 == 0 ? start : start + state->first.at(rep);
    };
}

bench_config small_config(system_kind s, backend_kind b, std::size_t reps = 3) {
    bench_config c;
    c.system = s;
    c.backend = b;
    c.sizes = {100};
    c.steps = 5;
    c.repetitions = reps;
    c.workers = 2;
    return c;
}

}  // namespace

TEST(Median, Definition) {
    EXPECT_EQ(median({3, 1, 2, 5, 4, 9, 8, 7, 6, 10}), 5.5);
    EXPECT_EQ(median({2.5}), 2.5);
    EXPECT_EQ(median({3, 1, 2}), 2);
    EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(RunBenchmark, FakeClockMedian) {
    auto c = small_config(system_kind::lorenz, backend_kind::serial, 10);
    const auto recs = run_benchmark(c, {scripted_clock({3, 1, 2, 5, 4, 9, 8, 7, 6, 10}), {}});
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].median_s, 5.5);
    EXPECT_EQ(recs[0].min_s, 1);
    EXPECT_EQ(recs[0].max_s, 10);
    EXPECT_EQ(recs[0].times.size(), 10u);
    EXPECT_DOUBLE_EQ(recs[0].gbps, static_cast<double>(recs[0].bytes) / 5.5 / 1e9);
}

TEST(RunBenchmark, SingleRepetition) {
    auto c = small_config(system_kind::phase, backend_kind::serial, 1);
    const auto recs = run_benchmark(c, {scripted_clock({0.25}), {}});
    EXPECT_EQ(recs[0].median_s, 0.25);
    EXPECT_EQ(recs[0].min_s, 0.25);
    EXPECT_EQ(recs[0].max_s, 0.25);
}

TEST(RunBenchmark, SetupExcludedFromTiming) {
    // A virtual clock that the setup hook advances by a large jump.
    auto now = std::make_shared<double>(0.0);
    clock_fn clock = [now] { return *now += 1.0; };  // integral ticks keep differences exact
    auto c = small_config(system_kind::lattice, backend_kind::serial, 4);
    c.sizes = {100, 400};
    const auto plain = run_benchmark(c, {clock, {}});
    const auto delayed = run_benchmark(c, {clock, [now](std::size_t) { *now += 1000.0; }});
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(plain[i].median_s, delayed[i].median_s);
}

TEST(RunBenchmark, RealDelayInSetupDoesNotReachMedian) {
    auto c = small_config(system_kind::phase, backend_kind::serial, 3);
    const auto recs = run_benchmark(
        c, {{}, [](std::size_t) { std::this_thread::sleep_for(std::chrono::milliseconds(300)); }});
    EXPECT_LT(recs[0].max_s, 0.1);
}

TEST(RunBenchmark, SerialAndParallelAgree) {
    auto c = small_config(system_kind::lorenz, backend_kind::serial, 2);
    c.sizes = {10'000};
    c.steps = 100;
    const auto s = run_benchmark(c);
    c.backend = backend_kind::parallel;
    const auto p = run_benchmark(c);
    ASSERT_FALSE(s[0].failed);
    ASSERT_FALSE(p[0].failed);
    EXPECT_EQ(s[0].state_digest, p[0].state_digest);
    EXPECT_EQ(s[0].passes, p[0].passes);
    EXPECT_EQ(s[0].passes, 3u);
}

TEST(RunBenchmark, PassesPerEvaluation) {
    struct expected { system_kind s; backend_kind b; std::size_t passes; bool fused; };
    for (auto e : {expected{system_kind::lorenz, backend_kind::fused, 1, true},
                   expected{system_kind::phase, backend_kind::serial, 2, false},
                   expected{system_kind::phase, backend_kind::fused, 1, true},
                   expected{system_kind::lattice, backend_kind::parallel, 3, false},
                   expected{system_kind::lattice, backend_kind::fused, 2, true}}) {
        auto c = small_config(e.s, e.b, 1);
        c.sizes = {100, 1000};
        for (const auto& r : run_benchmark(c)) {
            EXPECT_EQ(r.passes, e.passes) << to_string(e.s) << " " << to_string(e.b);
            EXPECT_EQ(r.fused, e.fused);
        }
    }
}

TEST(RunBenchmark, FailedSizeDoesNotAbortSweep) {
    auto c = small_config(system_kind::lorenz, backend_kind::serial, 1);
    c.sizes = {10, 20};
    c.dt = 0.5;  // diverges
    c.steps = 2000;
    const auto recs = run_benchmark(c);
    ASSERT_EQ(recs.size(), 2u);
    for (const auto& r : recs) {
        EXPECT_TRUE(r.failed);
        EXPECT_FALSE(r.error.empty());
    }
    std::ostringstream os;
    write_csv(os, recs);
    EXPECT_EQ(os.str(), std::string(csv_header) + "\n");
}

TEST(BenchConfig, Validation) {
    bench_config c;
    EXPECT_NO_THROW(c.validate());
    c.repetitions = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.sizes = {100, 100};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.sizes = {};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.peak_gbps = -1;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    EXPECT_EQ(default_sizes().front(), 100u);
    EXPECT_EQ(default_sizes().back(), 10'000'000u);
}

TEST(BytesModel, LorenzFusedSingleEvaluation) {
    EXPECT_EQ(rhs_bytes(system_kind::lorenz, 1000, true), 56'000u);
    EXPECT_GT(rhs_bytes(system_kind::lorenz, 1000, false), 56'000u);
}

TEST(BytesModel, ZeroStepsZeroBytes) {
    for (auto s : {system_kind::lorenz, system_kind::phase, system_kind::lattice})
        for (bool f : {false, true}) EXPECT_EQ(bytes_moved(s, 1000, 0, f), 0u);
}

TEST(BytesModel, LatticeSpmvSingleNode) {
    // 8 (value) + 4 (index) + 8 (x) + 8 (y) = 28 for the spmv, plus 3 or 5 scalars elementwise.
    EXPECT_EQ(rhs_bytes(system_kind::lattice, 1, true), 28u + 24u);
    EXPECT_EQ(rhs_bytes(system_kind::lattice, 1, false), 28u + 40u);
    EXPECT_EQ(lattice_nnz(1), 1u);
    EXPECT_EQ(lattice_nnz(3), 33u);
}

TEST(BytesModel, UnknownSystemName) {
    EXPECT_THROW(bytes_moved("pendulum", 10, 1, true), std::invalid_argument);
    EXPECT_EQ(bytes_moved("lorenz", 10, 3, true), bytes_moved(system_kind::lorenz, 10, 3, true));
}

TEST(BytesModel, AgreesWithExpressionAccessCounters) {
    const std::size_t n = 1000;
    {
        std::vector<state_vector> in(4, state_vector(n)), out(3, state_vector(n));
        const auto prog = lorenz_ensemble<serial_algebra>::statements(default_lorenz_params(n));
        expr::fused_group f(prog, {in[0], in[1], in[2], in[3]}, {out[0], out[1], out[2]});
        expr::unfused_group u(prog, {in[0], in[1], in[2], in[3]}, {out[0], out[1], out[2]});
        EXPECT_EQ(rhs_bytes(system_kind::lorenz, n, true), 8 * f.scalars_moved());
        EXPECT_EQ(rhs_bytes(system_kind::lorenz, n, false), 8 * u.scalars_moved());
    }
    {
        state_vector phi(n), omega(n), out(n);
        const auto prog = phase_chain<serial_algebra>::fused_statements();
        expr::fused_group f(prog, {phi, omega}, {out});
        EXPECT_EQ(rhs_bytes(system_kind::phase, n, true), 8 * f.scalars_moved());
        // Unfused: stencil pass (phi -> tmp) is 2n, the add pass 3n.
        expr::program add({{0, expr::arg(0) + expr::arg(1)}});
        expr::unfused_group u(add, {omega, phi}, {out});
        EXPECT_EQ(rhs_bytes(system_kind::phase, n, false), 8 * (2 * n + u.scalars_moved()));
    }
}

TEST(BytesModel, PureFunctionAndMonotone) {
    for (auto s : {system_kind::lorenz, system_kind::phase, system_kind::lattice}) {
        EXPECT_EQ(bytes_moved(s, 4096, 7, true), bytes_moved(s, 4096, 7, true));
        EXPECT_LT(bytes_moved(s, 4096, 7, true), bytes_moved(s, 4096, 7, false));
        EXPECT_EQ(bytes_moved(s, 4096, 14, true), 2 * bytes_moved(s, 4096, 7, true));
    }
}

TEST(RelativePerformance, ReferenceIsOneAndRatiosDivide) {
    std::vector<bench_record> recs(3);
    recs[0].backend = backend_kind::serial;
    recs[0].median_s = 1.0;
    recs[1].backend = backend_kind::parallel;
    recs[1].median_s = 2.0;
    recs[2].backend = backend_kind::fused;
    recs[2].median_s = 0.5;
    for (auto& r : recs) r.n = 100;
    const auto cells = relative_performance(recs, backend_kind::serial);
    ASSERT_EQ(cells.size(), 3u);
    EXPECT_EQ(cells[0].ratio, 1.0);
    EXPECT_EQ(cells[1].ratio, 2.0);
    EXPECT_EQ(cells[2].ratio, 0.5);
}

TEST(RelativePerformance, MissingReferenceDiagnostic) {
    std::vector<bench_record> recs(2);
    recs[0].backend = backend_kind::parallel;
    recs[0].n = 100;
    recs[0].median_s = 1;
    recs[1].backend = backend_kind::serial;
    recs[1].n = 1000;
    recs[1].median_s = 1;
    const auto cells = relative_performance(recs, backend_kind::serial);
    EXPECT_FALSE(cells[0].ratio.has_value());
    EXPECT_NE(cells[0].diagnostic.find("no serial reference"), std::string::npos);
    EXPECT_EQ(cells[1].ratio, 1.0);
}

TEST(Csv, RoundTripAndThroughputConsistency) {
    std::vector<bench_record> recs;
    for (auto s : {system_kind::lorenz, system_kind::lattice}) {
        auto c = small_config(s, backend_kind::serial, 2);
        c.sizes = {100, 1000};
        c.peak_gbps = 20;
        for (auto& r : run_benchmark(c)) recs.push_back(r);
    }
    std::stringstream ss;
    write_csv(ss, recs);
    const auto back = read_csv(ss);
    ASSERT_EQ(back.size(), recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        EXPECT_EQ(back[i].system, recs[i].system);
        EXPECT_EQ(back[i].n, recs[i].n);
        EXPECT_EQ(back[i].median_s, recs[i].median_s);
        EXPECT_EQ(back[i].gbps, recs[i].gbps);
        EXPECT_EQ(back[i].peak_frac, recs[i].peak_frac);
        EXPECT_EQ(back[i].bytes, bytes_moved(back[i].system, back[i].n, back[i].steps, back[i].fused));
        EXPECT_NEAR(back[i].gbps, static_cast<double>(back[i].bytes) / back[i].median_s / 1e9,
                    1e-12 * back[i].gbps);
        EXPECT_NEAR(back[i].peak_frac, back[i].gbps / 20, 1e-15);
    }
}

TEST(Csv, ErrorsCarryLineNumbers) {
    std::stringstream bad_header("system,backend\n");
    try {
        read_csv(bad_header);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_EQ(std::string(e.what()).rfind("line 1:", 0), 0u);
    }
    std::stringstream bad_row(std::string(csv_header) + "\nlorenz,serial,0,100,5,1,1,1,10,1,0,3\nlorenz,serial,0,abc,5,1,1,1,10,1,0,3\n");
    try {
        read_csv(bad_row);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_EQ(std::string(e.what()).rfind("line 3:", 0), 0u) << e.what();
    }
    std::stringstream short_row(std::string(csv_header) + "\nlorenz,serial\n");
    EXPECT_THROW(read_csv(short_row), std::invalid_argument);
    std::stringstream empty;
    EXPECT_THROW(read_csv(empty), std::invalid_argument);
}

TEST(Table, GroupsSystemsAndBackends) {
    std::vector<bench_record> recs;
    for (auto s : {system_kind::lorenz, system_kind::phase})
        for (auto b : {backend_kind::serial, backend_kind::fused}) {
            bench_record r;
            r.system = s;
            r.backend = b;
            r.n = 1000;
            r.median_s = 0.5;
            r.gbps = 1.25;
            recs.push_back(r);
        }
    const auto t = render_table(recs);
    EXPECT_NE(t.find("N = 1000"), std::string::npos);
    EXPECT_NE(t.find("lorenz"), std::string::npos);
    EXPECT_NE(t.find("phase"), std::string::npos);
    EXPECT_NE(t.find("\nserial"), std::string::npos);
    EXPECT_NE(t.find("\nfused"), std::string::npos);
    EXPECT_NE(t.find("5.0000e-01"), std::string::npos);
}
