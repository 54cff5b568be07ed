#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "eqlab/concentration.hpp"
#include "eqlab/eigensolve.hpp"
#include "eqlab/matrix.hpp"
#include "eqlab/moments.hpp"
#include "eqlab/quench.hpp"

namespace eqlab::io {

// %.17g: shortest exact round-trip for doubles, so emitted files are
// reproducible bit-for-bit from (config, seed).
std::string fmt(double x);

void write_matrix_csv(const std::filesystem::path& path, const HermitianOperator& m);
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s);
void write_eigenvectors_csv(const std::filesystem::path& path, const Spectrum& s);
void write_histogram_csv(const std::filesystem::path& path, const SampledHistogram& h);
void write_tail_csv(const std::filesystem::path& path, const TailReport& r);
void write_scan_csv(const std::filesystem::path& path, const RecurrenceScan& s);
void write_violations_csv(const std::filesystem::path& path, const GenericityReport& r);

struct TimePoint {
    double t;
    cplx value;
};
void write_timeseries_csv(const std::filesystem::path& path, const std::vector<TimePoint>& ts);

// Self-contained SVG line plot (CSV stays the authoritative output).
struct PlotSeries {
    std::vector<std::pair<double, double>> points;
    std::string label;
    std::string color = "#1f77b4";
};

struct PlotOptions {
    std::string title, xlabel, ylabel;
    bool logy = false;
    int width = 840, height = 560;
};

void write_svg_plot(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
                    const PlotOptions& opts);

}  // namespace eqlab::io
