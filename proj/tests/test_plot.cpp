#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "cslab/errors.hpp"
#include "cslab/plot.hpp"

using namespace cslab;
using namespace cslab::plot;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

std::vector<TheoryRow> theory_rows() {
    const std::vector<double> grid{0.001, 0.05, 0.2, 0.5, 0.8};
    std::vector<TheoryRow> rows;
    for (auto p : {replica::PNorm::L0, replica::PNorm::L1, replica::PNorm::L2}) {
        const auto r = curve_rows(replica::threshold_curve(p, grid, replica::CurveMethod::replica));
        rows.insert(rows.end(), r.begin(), r.end());
    }
    const auto wc = curve_rows(replica::threshold_curve(replica::PNorm::L1, grid, replica::CurveMethod::worst_case));
    rows.insert(rows.end(), wc.begin(), wc.end());
    return rows;
}

}  // namespace

TEST_CASE("theory CSV round trip keeps gaps") {
    const auto rows = theory_rows();
    std::stringstream ss;
    write_theory_csv(ss, rows);
    CHECK(ss.str().rfind("p,method,rho,alpha_c\n", 0) == 0);
    CHECK(ss.str().find("1,worst_case,0.5,nan") != std::string::npos);
    const auto back = read_theory_csv(ss);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].p == rows[i].p);
        CHECK(back[i].method == rows[i].method);
        CHECK(back[i].rho == rows[i].rho);
        CHECK((back[i].alpha_c == rows[i].alpha_c || (std::isnan(back[i].alpha_c) && std::isnan(rows[i].alpha_c))));
    }
    std::stringstream empty("p,method,rho,alpha_c\n");
    CHECK_THROWS_AS(read_theory_csv(empty), ParseError);
    std::stringstream bad("p,method,rho,alpha_c\n7,replica,0.5,0.5\n");
    CHECK_THROWS_AS(read_theory_csv(bad), ParseError);
}

TEST_CASE("threshold figure has one series per norm and a worst-case inset") {
    const auto spec = figure_2a(theory_rows());
    CHECK(spec.main.series.size() == 3);
    REQUIRE(spec.inset.has_value());
    const auto svg = render_svg(spec);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count(svg, "class=\"series\"") == 3);
    CHECK(count(svg, "class=\"inset-series\"") >= 1);
}

TEST_CASE("extrapolation figure shows estimates, fits and intercepts") {
    std::vector<CriticalPointEstimate> est;
    for (int n : {10, 14, 18, 22, 26, 30}) {
        CriticalPointEstimate e;
        e.rho = 0.5;
        e.n = n;
        e.alpha_c_n = 0.83 - 0.7 / n;
        e.std_error = 0.003;
        est.push_back(e);
    }
    std::vector<EstimateSet> sets{{"gaussian", est}, {"orthogonal", est}};
    const auto svg = render_svg(figure_2b(sets));
    CHECK(count(svg, "class=\"marker\"") == 2);
    CHECK(svg.find("(gaussian)\"") != std::string::npos);
    CHECK(svg.find("(orthogonal)\"") != std::string::npos);
    est.resize(3);
    CHECK_THROWS_AS(figure_2b(est), InvalidArgument);
}

TEST_CASE("renderer rejects unusable input") {
    PlotSpec spec;
    spec.main.series.push_back({"empty", {}, "#000", SeriesStyle::line});
    CHECK_THROWS_AS(render_svg(spec), InvalidArgument);
    spec.main.series[0].points.push_back({0.5, 0.5});
    spec.main.axes.x_max = spec.main.axes.x_min;
    CHECK_THROWS_AS(render_svg(spec), InvalidArgument);
}

TEST_CASE("labels are escaped") {
    PlotSpec spec;
    spec.title = "a < b & c";
    spec.main.series.push_back({"x\"y", {{0.1, 0.2}, {0.3, 0.4}}, "#000", SeriesStyle::line});
    const auto svg = render_svg(spec);
    CHECK(svg.find("a &lt; b &amp; c") != std::string::npos);
    CHECK(svg.find("x&quot;y") != std::string::npos);
}
