#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "odekit/algebra.hpp"
#include "odekit/systems/simulation.hpp"

namespace odekit::bench {

/// 10^2, 10^3, ..., 10^7.
std::vector<std::size_t> default_sizes();

struct bench_config {
    system_kind system = system_kind::lorenz;
    backend_kind backend = backend_kind::serial;
    std::vector<std::size_t> sizes = default_sizes();
    std::size_t steps = 100;
    std::size_t repetitions = 10;
    scalar dt = 0.01;
    std::size_t warmup = 1;
    std::uint64_t seed = 42;
    std::size_t workers = 0;  // 0 = default_worker_count()
    double peak_gbps = 0;     // 0 = unknown, peak_frac reported as 0
    sparse_format format = sparse_format::csr;

    /// Throws std::invalid_argument on repetitions == 0, empty or
    /// non-increasing sizes, or non-finite/negative dt and peak.
    void validate() const;
};

struct bench_record {
    system_kind system = system_kind::lorenz;
    backend_kind backend = backend_kind::serial;
    bool fused = false;
    std::size_t n = 0;  // problem size actually simulated
    std::size_t steps = 0;
    double median_s = 0;
    double min_s = 0;
    double max_s = 0;
    std::vector<double> times;
    std::uint64_t bytes = 0;
    double gbps = 0;
    double peak_frac = 0;
    std::size_t passes = 0;  // full passes per right-hand-side evaluation
    std::uint64_t state_digest = 0;  // FNV-1a of the final state bytes (not in the CSV)
    bool failed = false;
    std::string error;
};

/// Monotonic time source in seconds.
using clock_fn = std::function<double()>;

/// Test seams. `clock` replaces the steady clock; `after_setup` runs once per
/// size after all allocation and construction, outside the timed region.
struct bench_hooks {
    clock_fn clock;
    std::function<void(std::size_t n)> after_setup;
};

/// Median of a non-empty sample (mean of the two middle values for even sizes).
double median(std::vector<double> values);

/// One record per size. Only the integration loop is timed; warmup runs are
/// discarded. A size that fails (allocation failure, non-finite state) yields
/// a record with failed = true and the sweep continues.
std::vector<bench_record> run_benchmark(const bench_config& config, const bench_hooks& hooks = {});

/// Bytes of one right-hand-side evaluation under the accounting rule: 8 bytes
/// per scalar read or written per pass, distinct vectors counted once per
/// pass. Sparse products count 8 bytes per stored value, 4 per column index
/// and 8 per gathered x element, plus 8 per row written.
std::uint64_t rhs_bytes(system_kind system, std::size_t n, bool fused);

/// Bytes of the stepper's own combination passes for one step.
std::uint64_t stepper_bytes(system_kind system, std::size_t n);

/// Total for `steps` steps: steps * (evaluations * rhs_bytes + stepper_bytes).
/// n is the simulated problem size (see problem_size()).
std::uint64_t bytes_moved(system_kind system, std::size_t n, std::size_t steps, bool fused);

/// Same, with the system named as in the CSV; throws on an unknown name.
std::uint64_t bytes_moved(std::string_view system, std::size_t n, std::size_t steps, bool fused);

/// Nonzeros of the lattice operator on a side x side grid.
std::size_t lattice_nnz(std::size_t side);

struct relative_cell {
    system_kind system;
    backend_kind backend;
    std::size_t n;
    std::optional<double> ratio;  // time(backend) / time(reference)
    std::string diagnostic;       // set when ratio is empty
};

/// Ratio of each record's median time to the reference backend's median for
/// the same (system, n). Failed records and missing references produce a
/// cell with a diagnostic instead of a ratio.
std::vector<relative_cell> relative_performance(const std::vector<bench_record>& records,
                                                backend_kind reference);

inline constexpr const char* csv_header =
    "system,backend,fused,N,steps,median_s,min_s,max_s,bytes,gbps,peak_frac,passes";

/// Header plus one line per successful record; decimals with 17 significant digits.
void write_csv(std::ostream& os, const std::vector<bench_record>& records);

/// Parses the CSV written above. Errors carry the 1-based line number.
std::vector<bench_record> read_csv(std::istream& is);

/// Aligned text table: one block per problem size, backends as rows, systems
/// as column groups of (time s, GB/s, % of peak).
std::string render_table(const std::vector<bench_record>& records);

}  // namespace odekit::bench
