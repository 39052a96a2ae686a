#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "odekit/bench/bench.hpp"

namespace odekit::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_runtime = 2;

/// Entry point behind the odekit executable. args[0] is the program name.
/// Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct plot_options {
    backend_kind reference = backend_kind::serial;
    std::string title = "odekit benchmark";
};

/// Standalone SVG: for each system a log-log panel of median time against N
/// (one line per backend) and a panel of time relative to the reference
/// backend. Failed records are skipped.
std::string render_svg(const std::vector<bench::bench_record>& records, const plot_options& options);

/// Decades [10^lo, 10^hi] that enclose [min, max] (both > 0).
std::pair<int, int> log_decades(double min, double max);

}  // namespace odekit::cli
