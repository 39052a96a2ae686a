#include "odekit/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <map>
#include <new>
#include <sstream>
#include <stdexcept>

#include "odekit/steppers.hpp"

namespace odekit::bench {

std::vector<std::size_t> default_sizes() {
    return {100, 1'000, 10'000, 100'000, 1'000'000, 10'000'000};
}

void bench_config::validate() const {
    if (repetitions == 0) throw std::invalid_argument("repetitions must be >= 1");
    if (sizes.empty()) throw std::invalid_argument("at least one problem size is required");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] == 0) throw std::invalid_argument("problem sizes must be >= 1");
        if (i > 0 && sizes[i] <= sizes[i - 1])
            throw std::invalid_argument("problem sizes must be strictly increasing");
    }
    if (!std::isfinite(dt)) throw std::invalid_argument("dt must be finite");
    if (!std::isfinite(peak_gbps) || peak_gbps < 0)
        throw std::invalid_argument("peak bandwidth must be a finite non-negative number");
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of an empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2;
}

std::size_t lattice_nnz(std::size_t side) { return 5 * side * side - 4 * side; }

std::uint64_t rhs_bytes(system_kind system, std::size_t n, bool fused) {
    switch (system) {
        case system_kind::lorenz:
            // fused: read X, Y, Z, R; write dX, dY, dZ.
            // unfused: (X, Y -> dX) + (R, X, Y, Z -> dY) + (X, Y, Z -> dZ).
            return 8ull * (fused ? 7 : 12) * n;
        case system_kind::phase:
            // fused: read phi, omega; write dphi.
            // unfused: stencil (phi -> tmp) + add (omega, tmp -> dphi).
            return 8ull * (fused ? 3 : 5) * n;
        case system_kind::lattice: {
            const std::size_t side = lattice_side(n);
            const std::uint64_t nodes = side * side;
            const std::uint64_t nnz = lattice_nnz(side);
            const std::uint64_t spmv = 8 * nnz + 4 * nnz + 8 * nnz + 8 * nodes;
            // fused: read Aq, q; write dp. unfused: (q -> cube) + (Aq, cube -> dp).
            return spmv + 8 * (fused ? 3 : 5) * nodes;
        }
    }
    throw std::invalid_argument("rhs_bytes: unknown system");
}

std::uint64_t stepper_bytes(system_kind system, std::size_t n) {
    switch (system) {
        // RK4: three for_each3 stage combinations plus one for_each6.
        case system_kind::lorenz: return 8ull * 15 * 3 * n;
        case system_kind::phase: return 8ull * 15 * n;
        // Verlet: three for_each3 updates over the nodes.
        case system_kind::lattice: {
            const std::size_t side = lattice_side(n);
            return 8ull * 9 * side * side;
        }
    }
    throw std::invalid_argument("stepper_bytes: unknown system");
}

std::uint64_t bytes_moved(system_kind system, std::size_t n, std::size_t steps, bool fused) {
    const std::uint64_t evals = system == system_kind::lattice ? 2 : 4;
    return steps * (evals * rhs_bytes(system, n, fused) + stepper_bytes(system, n));
}

std::uint64_t bytes_moved(std::string_view system, std::size_t n, std::size_t steps, bool fused) {
    return bytes_moved(parse_system(system), n, steps, fused);
}

namespace {

std::uint64_t fnv1a(std::span<const scalar> v) {
    std::uint64_t h = 1469598103934665603ull;
    for (scalar x : v) {
        unsigned char bytes[sizeof(scalar)];
        std::memcpy(bytes, &x, sizeof x);
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 1099511628211ull;
        }
    }
    return h;
}

double steady_seconds() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace

std::vector<bench_record> run_benchmark(const bench_config& config, const bench_hooks& hooks) {
    config.validate();
    const clock_fn clock = hooks.clock ? hooks.clock : clock_fn(steady_seconds);

    std::vector<bench_record> out;
    for (std::size_t size : config.sizes) {
        bench_record rec;
        rec.system = config.system;
        rec.backend = config.backend;
        rec.n = problem_size(config.system, size);
        rec.steps = config.steps;
        try {
            simulation_config sc;
            sc.system = config.system;
            sc.backend = config.backend;
            sc.size = size;
            sc.dt = config.dt;
            sc.seed = config.seed;
            sc.workers = config.workers;
            sc.format = config.format;
            sc.check_finite = false;
            auto sim = make_simulation(sc);
            rec.fused = sim->mode() == evaluation::fused;
            if (hooks.after_setup) hooks.after_setup(size);

            for (std::size_t w = 0; w < config.warmup; ++w) {
                sim->reset();
                sim->advance(config.steps);
            }

            const rhs_counters before = sim->counters();
            rec.times.reserve(config.repetitions);
            for (std::size_t r = 0; r < config.repetitions; ++r) {
                sim->reset();
                const double t0 = clock();
                sim->advance(config.steps);
                const double t1 = clock();
                rec.times.push_back(t1 - t0);
            }
            const rhs_counters after = sim->counters();
            const std::size_t evals = after.evaluations - before.evaluations;
            rec.passes = evals == 0 ? 0 : (after.passes - before.passes) / evals;

            const auto final_state = sim->state();
            if (!std::all_of(final_state.begin(), final_state.end(),
                             [](scalar v) { return std::isfinite(v); }))
                throw step_error("non-finite values in final state");
            rec.state_digest = fnv1a(final_state);

            rec.median_s = median(rec.times);
            rec.min_s = *std::min_element(rec.times.begin(), rec.times.end());
            rec.max_s = *std::max_element(rec.times.begin(), rec.times.end());
            rec.bytes = bytes_moved(config.system, rec.n, config.steps, rec.fused);
            rec.gbps = rec.median_s > 0 ? static_cast<double>(rec.bytes) / rec.median_s / 1e9 : 0.0;
            rec.peak_frac = config.peak_gbps > 0 ? rec.gbps / config.peak_gbps : 0.0;
        } catch (const std::bad_alloc&) {
            rec.failed = true;
            rec.error = "out of memory";
        } catch (const std::length_error& e) {
            rec.failed = true;
            rec.error = e.what();
        } catch (const step_error& e) {
            rec.failed = true;
            rec.error = e.what();
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<relative_cell> relative_performance(const std::vector<bench_record>& records,
                                                backend_kind reference) {
    std::map<std::pair<system_kind, std::size_t>, const bench_record*> refs;
    for (const auto& r : records)
        if (r.backend == reference && !r.failed) refs[{r.system, r.n}] = &r;

    std::vector<relative_cell> cells;
    for (const auto& r : records) {
        relative_cell c{r.system, r.backend, r.n, std::nullopt, {}};
        const auto it = refs.find({r.system, r.n});
        if (r.failed) {
            c.diagnostic = "record failed: " + r.error;
        } else if (it == refs.end()) {
            c.diagnostic = "no " + std::string(to_string(reference)) + " reference for " +
                           std::string(to_string(r.system)) + " N=" + std::to_string(r.n);
        } else if (!(it->second->median_s > 0)) {
            c.diagnostic = "reference time is zero";
        } else {
            c.ratio = r.median_s / it->second->median_s;
        }
        cells.push_back(std::move(c));
    }
    return cells;
}

std::string render_table(const std::vector<bench_record>& records) {
    std::vector<system_kind> systems;
    std::vector<backend_kind> backends;
    std::vector<std::size_t> sizes;
    for (const auto& r : records) {
        if (r.failed) continue;
        if (std::find(systems.begin(), systems.end(), r.system) == systems.end()) systems.push_back(r.system);
        if (std::find(backends.begin(), backends.end(), r.backend) == backends.end())
            backends.push_back(r.backend);
        if (std::find(sizes.begin(), sizes.end(), r.n) == sizes.end()) sizes.push_back(r.n);
    }
    std::sort(sizes.begin(), sizes.end());

    auto find = [&](system_kind s, backend_kind b, std::size_t n) -> const bench_record* {
        for (const auto& r : records)
            if (!r.failed && r.system == s && r.backend == b && r.n == n) return &r;
        return nullptr;
    };

    constexpr int label_w = 10;
    constexpr int time_w = 12, gbps_w = 9, peak_w = 8;
    const int group_w = time_w + gbps_w + peak_w;
    std::ostringstream os;
    for (std::size_t n : sizes) {
        os << "N = " << n << '\n';
        os << std::left << std::setw(label_w) << "";
        for (auto s : systems) os << " | " << std::left << std::setw(group_w) << to_string(s);
        os << '\n' << std::left << std::setw(label_w) << "backend";
        for (std::size_t i = 0; i < systems.size(); ++i)
            os << " | " << std::right << std::setw(time_w) << "time (s)" << std::setw(gbps_w) << "GB/s"
               << std::setw(peak_w) << "% peak";
        os << '\n' << std::string(label_w, '-');
        for (std::size_t i = 0; i < systems.size(); ++i) os << "-+-" << std::string(group_w, '-');
        os << '\n';
        for (auto b : backends) {
            os << std::left << std::setw(label_w) << to_string(b);
            for (auto s : systems) {
                os << " | " << std::right;
                if (const auto* r = find(s, b, n)) {
                    os << std::setw(time_w) << std::scientific << std::setprecision(4) << r->median_s
                       << std::setw(gbps_w) << std::fixed << std::setprecision(2) << r->gbps
                       << std::setw(peak_w) << std::setprecision(1) << 100 * r->peak_frac;
                } else {
                    os << std::setw(time_w) << "-" << std::setw(gbps_w) << "-" << std::setw(peak_w) << "-";
                }
                os.unsetf(std::ios::floatfield);
            }
            os << '\n';
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace odekit::bench
