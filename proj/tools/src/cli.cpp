#include "odekit_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "odekit/steppers.hpp"
#include "odekit/systems/simulation.hpp"

namespace odekit::cli {

namespace {

// Raised for bad flag values discovered after CLI11 has parsed the line.
struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split(const std::string& s, char sep = ',') {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

std::size_t parse_size(const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || !(v >= 1) || v != std::floor(v) || v > 1e15)
        throw usage_error("invalid problem size '" + s + "'");
    return static_cast<std::size_t>(v);
}

template <class F>
auto parse_or_usage(F&& f) {
    try {
        return f();
    } catch (const usage_error&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
}

sparse_format parse_format(const std::string& s) {
    if (s == "csr") return sparse_format::csr;
    if (s == "ell") return sparse_format::ell;
    throw usage_error("unknown matrix format '" + s + "' (expected csr or ell)");
}

std::string fmt17(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// Output sink: the given stream, or a file when a path is set.
class sink {
public:
    sink(const std::string& path, std::ostream& fallback) : m_out(&fallback) {
        if (path.empty() || path == "-") return;
        m_file.open(path, std::ios::binary);
        if (!m_file) throw std::runtime_error("cannot open '" + path + "' for writing");
        m_out = &m_file;
    }
    std::ostream& stream() { return *m_out; }
    void finish() {
        m_out->flush();
        if (!*m_out) throw std::runtime_error("write failed");
    }

private:
    std::ofstream m_file;
    std::ostream* m_out;
};

// ---- bench ---------------------------------------------------------------

struct bench_options {
    std::string systems = "lorenz";
    std::string backends = "serial";
    std::string sizes;
    std::size_t steps = 100;
    std::size_t reps = 10;
    std::size_t warmup = 1;
    double dt = 0.01;
    std::uint64_t seed = 42;
    std::size_t workers = 0;
    double peak_gbps = 0;
    std::string matrix = "csr";
    std::string out;
    std::string config;
    bool table = false;
};

std::string join_json_list(const nlohmann::json& v, const char* key) {
    if (v.is_string()) return v.get<std::string>();
    if (!v.is_array()) throw usage_error(std::string("config: '") + key + "' must be a string or a list");
    std::string s;
    for (const auto& item : v) {
        if (!item.is_string()) throw usage_error(std::string("config: '") + key + "' entries must be strings");
        s += (s.empty() ? "" : ",") + item.get<std::string>();
    }
    return s;
}

// Fills options from a JSON file, leaving values given on the command line alone.
void apply_config(bench_options& o, const CLI::App& cmd) {
    std::ifstream in(o.config);
    if (!in) throw usage_error("cannot read config '" + o.config + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw usage_error("config '" + o.config + "': " + e.what());
    }
    if (!j.is_object()) throw usage_error("config: top level must be an object");
    auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "system" || key == "systems") {
                if (!given("--system")) o.systems = join_json_list(v, "system");
            } else if (key == "backend" || key == "backends") {
                if (!given("--backend")) o.backends = join_json_list(v, "backend");
            } else if (key == "sizes") {
                if (given("--sizes")) continue;
                std::string s;
                for (const auto& n : v) s += (s.empty() ? "" : ",") + (n.is_string() ? n.get<std::string>() : n.dump());
                o.sizes = s;
            } else if (key == "steps") {
                if (!given("--steps")) o.steps = v.get<std::size_t>();
            } else if (key == "reps" || key == "repetitions") {
                if (!given("--reps")) o.reps = v.get<std::size_t>();
            } else if (key == "warmup") {
                if (!given("--warmup")) o.warmup = v.get<std::size_t>();
            } else if (key == "dt") {
                if (!given("--dt")) o.dt = v.get<double>();
            } else if (key == "seed") {
                if (!given("--seed")) o.seed = v.get<std::uint64_t>();
            } else if (key == "workers") {
                if (!given("--workers")) o.workers = v.get<std::size_t>();
            } else if (key == "peak_gbps") {
                if (!given("--peak-gbps")) o.peak_gbps = v.get<double>();
            } else if (key == "matrix") {
                if (!given("--matrix")) o.matrix = v.get<std::string>();
            } else {
                throw usage_error("config: unknown key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw usage_error("config: " + std::string(e.what()));
    }
}

int run_bench(bench_options o, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
    if (!o.config.empty()) apply_config(o, cmd);

    bench::bench_config base;
    if (!o.sizes.empty()) {
        base.sizes.clear();
        for (const auto& s : split(o.sizes)) base.sizes.push_back(parse_size(s));
    }
    base.steps = o.steps;
    base.repetitions = o.reps;
    base.warmup = o.warmup;
    base.dt = o.dt;
    base.seed = o.seed;
    base.workers = o.workers;
    base.peak_gbps = o.peak_gbps;
    base.format = parse_format(o.matrix);

    std::vector<system_kind> systems;
    for (const auto& s : split(o.systems)) systems.push_back(parse_or_usage([&] { return parse_system(s); }));
    std::vector<backend_kind> backends;
    for (const auto& b : split(o.backends)) backends.push_back(parse_or_usage([&] { return parse_backend(b); }));
    if (systems.empty()) throw usage_error("--system: at least one system is required");
    if (backends.empty()) throw usage_error("--backend: at least one backend is required");
    parse_or_usage([&] { base.validate(); return 0; });

    std::vector<bench::bench_record> records;
    for (auto s : systems)
        for (auto b : backends) {
            auto c = base;
            c.system = s;
            c.backend = b;
            for (auto& r : bench::run_benchmark(c)) {
                if (r.failed)
                    err << "warning: " << to_string(r.system) << '/' << to_string(r.backend) << " N=" << r.n
                        << " failed: " << r.error << '\n';
                records.push_back(std::move(r));
            }
        }

    if (o.table && o.out.empty()) {
        out << bench::render_table(records);
    } else {
        sink csv(o.out, out);
        bench::write_csv(csv.stream(), records);
        csv.finish();
        if (o.table) out << bench::render_table(records);
    }
    const bool any_ok = std::any_of(records.begin(), records.end(), [](const auto& r) { return !r.failed; });
    return any_ok ? exit_ok : exit_runtime;
}

// ---- simulate ------------------------------------------------------------

struct simulate_options {
    std::string system = "lorenz";
    std::string backend = "serial";
    std::string size = "1000";
    std::size_t steps = 100;
    double dt = 0.01;
    std::uint64_t seed = 42;
    std::size_t workers = 0;
    std::size_t observe_every = 1;
    std::size_t columns = 8;
    std::optional<double> R, omega, phase0;
    double beta = 1.0;
    std::string matrix = "csr";
    std::string out;
};

int run_simulate(const simulate_options& o, std::ostream& out, std::ostream& err) {
    simulation_config c;
    c.system = parse_or_usage([&] { return parse_system(o.system); });
    c.backend = parse_or_usage([&] { return parse_backend(o.backend); });
    c.size = parse_size(o.size);
    c.dt = o.dt;
    c.seed = o.seed;
    c.workers = o.workers;
    c.format = parse_format(o.matrix);
    c.lorenz_R = o.R;
    c.omega = o.omega;
    c.phase0 = o.phase0;
    c.beta = o.beta;
    if (!std::isfinite(o.dt)) throw usage_error("--dt must be finite");
    if (o.observe_every == 0) throw usage_error("--observe-every must be >= 1");

    auto sim = make_simulation(c);
    sink file(o.out, out);
    auto& os = file.stream();
    const std::size_t cols = std::min(o.columns, sim->state().size());
    os << 't';
    for (std::size_t i = 0; i < cols; ++i) os << ",x" << i;
    os << '\n';
    auto row = [&] {
        const auto x = sim->state();
        os << fmt17(sim->time());
        for (std::size_t i = 0; i < cols; ++i) os << ',' << fmt17(x[i]);
        os << '\n';
    };

    row();
    std::size_t done = 0;
    try {
        while (done < o.steps) {
            const std::size_t chunk = std::min(o.observe_every, o.steps - done);
            sim->advance(chunk);
            done += chunk;
            row();
        }
    } catch (const step_error& e) {
        file.finish();
        err << "error: non-finite state at step " << (e.step_index() ? std::to_string(*e.step_index()) : "?")
            << ": " << e.what() << '\n';
        return exit_runtime;
    }
    file.finish();
    return exit_ok;
}

// ---- plot ----------------------------------------------------------------

struct plot_cli_options {
    std::string input;
    std::string out;
    std::string reference = "serial";
    std::string title = "odekit benchmark";
};

int run_plot(const plot_cli_options& o, std::ostream& out, std::ostream& err) {
    plot_options p;
    p.reference = parse_or_usage([&] { return parse_backend(o.reference); });
    p.title = o.title;
    std::ifstream in(o.input);
    if (!in) throw std::runtime_error("cannot read '" + o.input + "'");
    std::vector<bench::bench_record> records;
    try {
        records = bench::read_csv(in);
    } catch (const std::invalid_argument& e) {
        err << "error: " << o.input << ": " << e.what() << '\n';
        return exit_runtime;
    }
    sink svg(o.out, out);
    svg.stream() << render_svg(records, p);
    svg.finish();
    return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Benchmarks and simulations for vectorised ODE integration backends.", "odekit"};
    app.require_subcommand(1);
    app.footer("Environment: ODEKIT_WORKERS sets the default parallel worker count.\n"
               "Exit codes: 0 success, 1 usage error, 2 runtime failure.");

    bench_options bo;
    auto* bench = app.add_subcommand("bench", "Time integration runs over a size sweep and emit CSV.");
    bench->add_option("--system", bo.systems, "Systems, comma separated: lorenz, phase, lattice")
        ->capture_default_str();
    bench->add_option("--backend", bo.backends, "Backends, comma separated: serial, parallel, fused")
        ->capture_default_str();
    bench->add_option("--sizes", bo.sizes, "Problem sizes, comma separated and increasing (default 1e2..1e7)");
    bench->add_option("--steps", bo.steps, "Integration steps per timed run")->capture_default_str();
    bench->add_option("--reps", bo.reps, "Timed repetitions; the median is reported")->capture_default_str();
    bench->add_option("--warmup", bo.warmup, "Untimed warmup runs per size")->capture_default_str();
    bench->add_option("--dt", bo.dt, "Step size")->capture_default_str();
    bench->add_option("--seed", bo.seed, "Seed for random parameters and initial states")->capture_default_str();
    bench->add_option("--workers", bo.workers, "Parallel worker threads (0 = ODEKIT_WORKERS or hardware)")
        ->capture_default_str();
    bench->add_option("--peak-gbps", bo.peak_gbps, "Peak memory bandwidth for the peak fraction column (0 = unknown)")
        ->capture_default_str();
    bench->add_option("--matrix", bo.matrix, "Lattice sparse format: csr or ell")->capture_default_str();
    bench->add_option("--out", bo.out, "Write the CSV to this file instead of stdout");
    bench->add_flag("--table", bo.table, "Print an aligned table (instead of CSV on stdout unless --out is set)");
    bench->add_option("--config", bo.config, "JSON file with bench settings; flags override its values");

    simulate_options so;
    auto* sim = app.add_subcommand("simulate", "Integrate one system and write a trajectory CSV.");
    sim->add_option("--system", so.system, "System: lorenz, phase or lattice")->capture_default_str();
    sim->add_option("--backend", so.backend, "Backend: serial, parallel or fused")->capture_default_str();
    sim->add_option("-N,--size", so.size, "Problem size (lattice: rounded to a square grid)")->capture_default_str();
    sim->add_option("--steps", so.steps, "Number of steps")->capture_default_str();
    sim->add_option("--dt", so.dt, "Step size")->capture_default_str();
    sim->add_option("--seed", so.seed, "Seed for random parameters and initial states")->capture_default_str();
    sim->add_option("--workers", so.workers, "Parallel worker threads (0 = ODEKIT_WORKERS or hardware)")
        ->capture_default_str();
    sim->add_option("--observe-every", so.observe_every, "Write a row every k steps")->capture_default_str();
    sim->add_option("--columns", so.columns, "Number of leading state entries per row")->capture_default_str();
    sim->add_option("--R", so.R, "Lorenz: use this R for every member instead of the sweep over [0, 56]");
    sim->add_option("--omega", so.omega, "Phase chain: constant phase velocity instead of random");
    sim->add_option("--phase0", so.phase0, "Phase chain: constant initial phase instead of random");
    sim->add_option("--beta", so.beta, "Lattice: nonlinearity")->capture_default_str();
    sim->add_option("--matrix", so.matrix, "Lattice sparse format: csr or ell")->capture_default_str();
    sim->add_option("--out", so.out, "Write the trajectory to this file instead of stdout");

    plot_cli_options po;
    auto* plot = app.add_subcommand("plot", "Render a bench CSV as an SVG of time and relative time against N.");
    plot->add_option("csv", po.input, "Bench CSV file")->required();
    plot->add_option("--out", po.out, "Write the SVG to this file instead of stdout");
    plot->add_option("--reference", po.reference, "Backend the relative panel divides by")->capture_default_str();
    plot->add_option("--title", po.title, "SVG title")->capture_default_str();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("odekit");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*bench) return run_bench(bo, *bench, out, err);
        if (*sim) return run_simulate(so, out, err);
        return run_plot(po, out, err);
    } catch (const usage_error& e) {
        err << "error: " << e.what() << "\nRun with --help for more information.\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}

}  // namespace odekit::cli
