#include "eqlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace eqlab::io {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const HermitianOperator& m) {
    auto out = open_out(path);
    out << "row,col,re,im\n";
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j) {
            const cplx z = m.at(i, j);
            if (z == cplx(0.0, 0.0)) continue;
            out << i << ',' << j << ',' << fmt(z.real()) << ',' << fmt(z.imag()) << '\n';
        }
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s) {
    auto out = open_out(path);
    out << "index,eigenvalue\n";
    for (int k = 0; k < s.dim; ++k) out << k << ',' << fmt(s.eigenvalues[k]) << '\n';
}

void write_eigenvectors_csv(const std::filesystem::path& path, const Spectrum& s) {
    auto out = open_out(path);
    out << "level,component,re,im\n";
    for (int k = 0; k < s.dim; ++k)
        for (int i = 0; i < s.dim; ++i) {
            const cplx z = s.vec(i, k);
            out << k << ',' << i << ',' << fmt(z.real()) << ',' << fmt(z.imag()) << '\n';
        }
}

void write_histogram_csv(const std::filesystem::path& path, const SampledHistogram& h) {
    auto out = open_out(path);
    out << "bin_left,bin_right,density\n";
    for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
        out << fmt(h.edges[b]) << ',' << fmt(h.edges[b + 1]) << ',' << fmt(h.density[b]) << '\n';
}

void write_tail_csv(const std::filesystem::path& path, const TailReport& r) {
    auto out = open_out(path);
    out << "delta,empirical,bound\n";
    for (std::size_t k = 0; k < r.delta_grid.size(); ++k)
        out << fmt(r.delta_grid[k]) << ',' << fmt(r.empirical[k]) << ',' << fmt(r.bound[k]) << '\n';
}

void write_scan_csv(const std::filesystem::path& path, const RecurrenceScan& s) {
    auto out = open_out(path);
    out << "event_index,t_start,duration\n";
    for (std::size_t i = 0; i < s.events.size(); ++i)
        out << (i + 1) << ',' << fmt(s.events[i].t_start) << ',' << fmt(s.events[i].duration) << '\n';
}

void write_violations_csv(const std::filesystem::path& path, const GenericityReport& r) {
    auto out = open_out(path);
    out << "q,set_a,set_b,sum_a,sum_b\n";
    auto join = [](const std::vector<int>& v) {
        std::ostringstream os;
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
        return os.str();
    };
    for (const auto& v : r.violations)
        out << v.q << ',' << join(v.set_a) << ',' << join(v.set_b) << ',' << fmt(v.sum_a) << ','
            << fmt(v.sum_b) << '\n';
}

void write_timeseries_csv(const std::filesystem::path& path, const std::vector<TimePoint>& ts) {
    auto out = open_out(path);
    out << "t,re,im,abs2\n";
    for (const TimePoint& p : ts)
        out << fmt(p.t) << ',' << fmt(p.value.real()) << ',' << fmt(p.value.imag()) << ','
            << fmt(std::norm(p.value)) << '\n';
}

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double x) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    bool ok() const { return lo <= hi; }
    void pad() {
        if (!ok()) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi - lo <= 0.0) {
            lo -= 0.5;
            hi += 0.5;
        } else {
            const double m = 0.05 * (hi - lo);
            lo -= m;
            hi += m;
        }
    }
};

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
                    const PlotOptions& opts) {
    const double mL = 70, mR = 20, mT = 36, mB = 50;
    const double W = opts.width, H = opts.height;

    Range rx, ry;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (opts.logy && y <= 0.0) continue;
            rx.add(x);
            ry.add(opts.logy ? std::log10(y) : y);
        }
    rx.pad();
    ry.pad();

    const auto X = [&](double x) { return mL + (x - rx.lo) / (rx.hi - rx.lo) * (W - mL - mR); };
    const auto Y = [&](double y) {
        const double v = opts.logy ? std::log10(y) : y;
        return H - mB - (v - ry.lo) / (ry.hi - ry.lo) * (H - mT - mB);
    };

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
        << opts.title << "</text>\n";

    // axes
    out << "<line x1=\"" << mL << "\" y1=\"" << H - mB << "\" x2=\"" << W - mR << "\" y2=\"" << H - mB
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << mL << "\" y1=\"" << mT << "\" x2=\"" << mL << "\" y2=\"" << H - mB
        << "\" stroke=\"black\"/>\n";

    const int nticks = 6;
    for (int k = 0; k < nticks; ++k) {
        const double fx = rx.lo + (rx.hi - rx.lo) * k / (nticks - 1);
        const double px = X(fx);
        out << "<line x1=\"" << px << "\" y1=\"" << H - mB << "\" x2=\"" << px << "\" y2=\""
            << H - mB + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << px << "\" y=\"" << H - mB + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(std::round(fx * 1e4) / 1e4)
            << "</text>\n";
        const double fy = ry.lo + (ry.hi - ry.lo) * k / (nticks - 1);
        const double py = H - mB - (fy - ry.lo) / (ry.hi - ry.lo) * (H - mT - mB);
        const double label = opts.logy ? std::pow(10.0, fy) : fy;
        out << "<line x1=\"" << mL - 5 << "\" y1=\"" << py << "\" x2=\"" << mL << "\" y2=\"" << py
            << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << mL - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-size=\"11\">"
            << (opts.logy ? fmt(label) : fmt(std::round(fy * 1e4) / 1e4)) << "</text>\n";
    }
    out << "<text x=\"" << (mL + W - mR) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << opts.xlabel << "</text>\n"
        << "<text x=\"16\" y=\"" << (mT + H - mB) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (mT + H - mB) / 2 << ")\">" << opts.ylabel << "</text>\n";

    // series + legend
    double ly = mT + 8;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : s.points) {
            if (opts.logy && y <= 0.0) continue;
            out << X(x) << ',' << Y(y) << ' ';
        }
        out << "\"/>\n";
        if (!s.label.empty()) {
            out << "<line x1=\"" << W - mR - 150 << "\" y1=\"" << ly << "\" x2=\"" << W - mR - 120
                << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n"
                << "<text x=\"" << W - mR - 114 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
                << s.label << "</text>\n";
            ly += 16;
        }
    }
    out << "</svg>\n";
}

}  // namespace eqlab::io
