#include <charconv>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "odekit/bench/bench.hpp"

namespace odekit::bench {

void write_csv(std::ostream& os, const std::vector<bench_record>& records) {
    std::ostringstream line;
    line << std::setprecision(17);
    os << csv_header << '\n';
    for (const auto& r : records) {
        if (r.failed) continue;
        line.str({});
        line << to_string(r.system) << ',' << to_string(r.backend) << ',' << (r.fused ? 1 : 0) << ','
             << r.n << ',' << r.steps << ',' << r.median_s << ',' << r.min_s << ',' << r.max_s << ','
             << r.bytes << ',' << r.gbps << ',' << r.peak_frac << ',' << r.passes << '\n';
        os << line.str();
    }
}

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": " + what);
}

template <class T>
T parse_int(const std::string& field, std::size_t line_no, const char* name) {
    T v{};
    const auto* end = field.data() + field.size();
    const auto [p, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || p != end) fail(line_no, std::string("bad integer in column ") + name + ": '" + field + "'");
    return v;
}

double parse_double(const std::string& field, std::size_t line_no, const char* name) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (field.empty() || used != field.size())
        fail(line_no, std::string("bad number in column ") + name + ": '" + field + "'");
    return v;
}

}  // namespace

std::vector<bench_record> read_csv(std::istream& is) {
    std::vector<bench_record> out;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            if (line != csv_header) fail(line_no, "expected header '" + std::string(csv_header) + "'");
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 12) fail(line_no, "expected 12 fields, found " + std::to_string(f.size()));

        bench_record r;
        try {
            r.system = parse_system(f[0]);
            r.backend = parse_backend(f[1]);
        } catch (const std::invalid_argument& e) {
            fail(line_no, e.what());
        }
        const int fused = parse_int<int>(f[2], line_no, "fused");
        if (fused != 0 && fused != 1) fail(line_no, "fused must be 0 or 1");
        r.fused = fused == 1;
        r.n = parse_int<std::size_t>(f[3], line_no, "N");
        r.steps = parse_int<std::size_t>(f[4], line_no, "steps");
        r.median_s = parse_double(f[5], line_no, "median_s");
        r.min_s = parse_double(f[6], line_no, "min_s");
        r.max_s = parse_double(f[7], line_no, "max_s");
        r.bytes = parse_int<std::uint64_t>(f[8], line_no, "bytes");
        r.gbps = parse_double(f[9], line_no, "gbps");
        r.peak_frac = parse_double(f[10], line_no, "peak_frac");
        r.passes = parse_int<std::size_t>(f[11], line_no, "passes");
        out.push_back(std::move(r));
    }
    if (!header) fail(line_no == 0 ? 1 : line_no, "missing header");
    return out;
}

}  // namespace odekit::bench
