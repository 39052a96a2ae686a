#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "odekit_cli/cli.hpp"

namespace odekit::cli {

std::pair<int, int> log_decades(double min, double max) {
    if (!(min > 0) || !(max >= min)) throw std::invalid_argument("log_decades: need 0 < min <= max");
    int lo = static_cast<int>(std::floor(std::log10(min)));
    while (std::pow(10.0, lo) > min) --lo;
    while (std::pow(10.0, lo + 1) <= min) ++lo;
    int hi = static_cast<int>(std::ceil(std::log10(max)));
    while (std::pow(10.0, hi) < max) ++hi;
    while (hi - 1 > lo && std::pow(10.0, hi - 1) >= max) --hi;
    if (hi == lo) ++hi;
    return {lo, hi};
}

namespace {

constexpr double panel_w = 420, panel_h = 260;
constexpr double margin_l = 80, margin_t = 50, gap = 90, row_h = panel_h + 100;

const char* colour(backend_kind b) {
    switch (b) {
        case backend_kind::serial: return "#1f77b4";
        case backend_kind::parallel: return "#d62728";
        case backend_kind::fused: return "#2ca02c";
    }
    return "#000000";
}

std::string escape(std::string_view s) {
    std::string r;
    for (char c : s) {
        switch (c) {
            case '<': r += "&lt;"; break;
            case '>': r += "&gt;"; break;
            case '&': r += "&amp;"; break;
            case '"': r += "&quot;"; break;
            default: r += c;
        }
    }
    return r;
}

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

// Maps data coordinates into one panel's pixel box.
struct axes {
    double x0, y0;  // top-left pixel
    double xlo, xhi, ylo, yhi;  // data range (already log10 for log axes)
    bool ylog;

    double px(double n) const { return x0 + (std::log10(n) - xlo) / (xhi - xlo) * panel_w; }
    double py(double v) const {
        const double t = ylog ? std::log10(v) : v;
        return y0 + panel_h - (t - ylo) / (yhi - ylo) * panel_h;
    }
};

void frame(std::ostringstream& os, const axes& a, std::string_view title, std::string_view ylabel) {
    os << "<rect x=\"" << num(a.x0) << "\" y=\"" << num(a.y0) << "\" width=\"" << num(panel_w)
       << "\" height=\"" << num(panel_h) << "\" fill=\"none\" stroke=\"#000\"/>\n";
    os << "<text x=\"" << num(a.x0 + panel_w / 2) << "\" y=\"" << num(a.y0 - 12)
       << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
    os << "<text x=\"" << num(a.x0 + panel_w / 2) << "\" y=\"" << num(a.y0 + panel_h + 40)
       << "\" text-anchor=\"middle\" font-size=\"12\">N</text>\n";
    os << "<text transform=\"translate(" << num(a.x0 - 58) << ',' << num(a.y0 + panel_h / 2)
       << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << escape(ylabel) << "</text>\n";
    for (int d = static_cast<int>(a.xlo); d <= static_cast<int>(a.xhi); ++d) {
        const double x = a.x0 + (d - a.xlo) / (a.xhi - a.xlo) * panel_w;
        os << "<line class=\"tick-x\" data-value=\"1e" << d << "\" x1=\"" << num(x) << "\" y1=\""
           << num(a.y0 + panel_h) << "\" x2=\"" << num(x) << "\" y2=\"" << num(a.y0 + panel_h + 5)
           << "\" stroke=\"#000\"/>\n";
        os << "<text x=\"" << num(x) << "\" y=\"" << num(a.y0 + panel_h + 20)
           << "\" text-anchor=\"middle\" font-size=\"11\">1e" << d << "</text>\n";
    }
}

void log_y_ticks(std::ostringstream& os, const axes& a) {
    for (int d = static_cast<int>(a.ylo); d <= static_cast<int>(a.yhi); ++d) {
        const double y = a.py(std::pow(10.0, d));
        os << "<line class=\"tick-y\" data-value=\"1e" << d << "\" x1=\"" << num(a.x0 - 5) << "\" y1=\""
           << num(y) << "\" x2=\"" << num(a.x0) << "\" y2=\"" << num(y) << "\" stroke=\"#000\"/>\n";
        os << "<text x=\"" << num(a.x0 - 8) << "\" y=\"" << num(y + 4)
           << "\" text-anchor=\"end\" font-size=\"11\">1e" << d << "</text>\n";
    }
}

void linear_y_ticks(std::ostringstream& os, const axes& a) {
    const double step = a.yhi <= 2.5 ? 0.5 : std::pow(10.0, std::floor(std::log10(a.yhi / 2)));
    for (double v = 0; v <= a.yhi + 1e-12; v += step) {
        const double y = a.py(v);
        os << "<line class=\"tick-y\" data-value=\"" << num(v) << "\" x1=\"" << num(a.x0 - 5) << "\" y1=\""
           << num(y) << "\" x2=\"" << num(a.x0) << "\" y2=\"" << num(y) << "\" stroke=\"#000\"/>\n";
        os << "<text x=\"" << num(a.x0 - 8) << "\" y=\"" << num(y + 4)
           << "\" text-anchor=\"end\" font-size=\"11\">" << num(v) << "</text>\n";
    }
}

using series = std::map<backend_kind, std::vector<std::pair<double, double>>>;

void lines(std::ostringstream& os, const axes& a, const series& s, std::string_view cls) {
    for (const auto& [backend, pts] : s) {
        os << "<g class=\"" << cls << "\" data-backend=\"" << to_string(backend) << "\">\n";
        if (pts.size() > 1) {
            os << "<polyline fill=\"none\" stroke=\"" << colour(backend) << "\" stroke-width=\"2\" points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i)
                os << (i ? " " : "") << num(a.px(pts[i].first)) << ',' << num(a.py(pts[i].second));
            os << "\"/>\n";
        }
        for (const auto& [n, v] : pts)
            os << "<circle data-n=\"" << num(n) << "\" data-v=\"" << num(v) << "\" cx=\"" << num(a.px(n))
               << "\" cy=\"" << num(a.py(v)) << "\" r=\"3\" fill=\"" << colour(backend) << "\"/>\n";
        os << "</g>\n";
    }
}

}  // namespace

std::string render_svg(const std::vector<bench::bench_record>& records, const plot_options& options) {
    std::vector<system_kind> systems;
    std::vector<const bench::bench_record*> ok;
    for (const auto& r : records) {
        if (r.failed || !(r.median_s > 0) || r.n == 0) continue;
        ok.push_back(&r);
        if (std::find(systems.begin(), systems.end(), r.system) == systems.end()) systems.push_back(r.system);
    }

    const double width = margin_l + 2 * panel_w + gap + 40;
    const double height = margin_t + row_h * static_cast<double>(std::max<std::size_t>(systems.size(), 1)) + 40;
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
       << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\">\n"
       << "<title>" << escape(options.title) << "</title>\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    if (systems.empty())
        os << "<text x=\"" << num(width / 2) << "\" y=\"" << num(height / 2)
           << "\" text-anchor=\"middle\">no successful records</text>\n";

    const auto reference = to_string(options.reference);
    for (std::size_t row = 0; row < systems.size(); ++row) {
        const auto sys = systems[row];
        series times, ratios;
        std::map<std::size_t, double> ref_time;
        double nmin = INFINITY, nmax = 0, tmin = INFINITY, tmax = 0;
        for (const auto* r : ok) {
            if (r->system != sys) continue;
            const double n = static_cast<double>(r->n);
            times[r->backend].emplace_back(n, r->median_s);
            nmin = std::min(nmin, n);
            nmax = std::max(nmax, n);
            tmin = std::min(tmin, r->median_s);
            tmax = std::max(tmax, r->median_s);
            if (r->backend == options.reference) ref_time[r->n] = r->median_s;
        }
        double rmax = 1;
        for (const auto* r : ok) {
            if (r->system != sys) continue;
            const auto it = ref_time.find(r->n);
            if (it == ref_time.end()) continue;
            const double ratio = r->median_s / it->second;
            ratios[r->backend].emplace_back(static_cast<double>(r->n), ratio);
            rmax = std::max(rmax, ratio);
        }
        for (auto* s : {&times, &ratios})
            for (auto& [b, pts] : *s) std::sort(pts.begin(), pts.end());

        const auto [xlo, xhi] = log_decades(nmin, nmax);
        const auto [ylo, yhi] = log_decades(tmin, tmax);
        const double top = margin_t + row_h * static_cast<double>(row);
        const axes abs_axes{margin_l, top, double(xlo), double(xhi), double(ylo), double(yhi), true};
        const axes rel_axes{margin_l + panel_w + gap, top, double(xlo), double(xhi), 0, rmax * 1.1, false};

        os << "<g class=\"system\" data-system=\"" << to_string(sys) << "\">\n";
        os << "<g class=\"panel-time\">\n";
        frame(os, abs_axes, std::string(to_string(sys)) + ": median time", "time (s)");
        log_y_ticks(os, abs_axes);
        lines(os, abs_axes, times, "series");
        os << "</g>\n<g class=\"panel-relative\" data-reference=\"" << reference << "\">\n";
        frame(os, rel_axes, std::string(to_string(sys)) + ": time relative to " + std::string(reference),
              "relative time");
        linear_y_ticks(os, rel_axes);
        if (ratios.empty())
            os << "<text x=\"" << num(rel_axes.x0 + panel_w / 2) << "\" y=\"" << num(top + panel_h / 2)
               << "\" text-anchor=\"middle\" font-size=\"12\">no " << reference << " reference</text>\n";
        lines(os, rel_axes, ratios, "series");
        os << "</g>\n</g>\n";
    }

    // Legend.
    std::vector<backend_kind> backends;
    for (const auto* r : ok)
        if (std::find(backends.begin(), backends.end(), r->backend) == backends.end()) backends.push_back(r->backend);
    double lx = margin_l;
    for (auto b : backends) {
        os << "<rect x=\"" << num(lx) << "\" y=\"14\" width=\"14\" height=\"4\" fill=\"" << colour(b) << "\"/>"
           << "<text x=\"" << num(lx + 20) << "\" y=\"20\" font-size=\"12\">" << to_string(b) << "</text>\n";
        lx += 100;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace odekit::cli
