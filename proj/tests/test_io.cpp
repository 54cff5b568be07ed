#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "eqlab/io.hpp"
#include "eqlab/lattice.hpp"

using namespace eqlab;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("fmt round-trips doubles exactly") {
    for (double x : {1.0 / 3.0, 0.1, 123456789.123456, 1e-300, 0.0}) {
        CHECK(std::stod(io::fmt(x)) == x);
    }
}

TEST_CASE("csv writers emit headers and are byte-stable") {
    const auto dir = std::filesystem::temp_directory_path() / "eqlab_io_test";
    const HermitianOperator H = build_spin_chain({4, -1.0, 1.0, 0.0, 0.0, true, 2});
    io::write_matrix_csv(dir / "m.csv", H);
    const std::string first = slurp(dir / "m.csv");
    CHECK(first.rfind("row,col,re,im\n", 0) == 0);
    io::write_matrix_csv(dir / "m.csv", H);
    CHECK(slurp(dir / "m.csv") == first);

    const Spectrum sp = diagonalize(H);
    io::write_spectrum_csv(dir / "s.csv", sp);
    CHECK(slurp(dir / "s.csv").rfind("index,eigenvalue\n", 0) == 0);
}

TEST_CASE("svg plot is a well-formed self-contained file") {
    const auto dir = std::filesystem::temp_directory_path() / "eqlab_io_test";
    io::PlotSeries s;
    s.label = "x^2";
    for (int i = 0; i <= 20; ++i) s.points.emplace_back(i * 0.1, i * i * 0.01 + 1e-4);
    io::PlotOptions po;
    po.title = "test";
    po.xlabel = "x";
    po.ylabel = "y";
    io::write_svg_plot(dir / "p.svg", {s}, po);
    const std::string svg = slurp(dir / "p.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);  // no external references

    po.logy = true;
    io::write_svg_plot(dir / "plog.svg", {s}, po);
    CHECK(slurp(dir / "plog.svg").find("polyline") != std::string::npos);
}
