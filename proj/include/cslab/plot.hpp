#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cslab/experiment.hpp"
#include "cslab/replica.hpp"

namespace cslab::plot {

struct Point {
    double x;
    double y;
};

enum class SeriesStyle { line, dashed, markers };

struct Series {
    std::string label;
    std::vector<Point> points;
    std::string color = "#1f77b4";
    SeriesStyle style = SeriesStyle::line;
};

struct Axes {
    std::string x_label;
    std::string y_label;
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
};

/// A labelled point drawn on top of the series (e.g. an extrapolated intercept).
struct Marker {
    std::string label;
    Point at;
};

struct Panel {
    std::vector<Series> series;
    Axes axes;
    std::vector<Marker> markers;
};

struct PlotSpec {
    std::string title;
    Panel main;
    std::optional<Panel> inset;  // drawn in the upper-left corner of the main panel
};

/// Self-contained SVG 1.1. Each main-panel series is one element with
/// class="series" and a data-label attribute; inset series use class
/// "inset-series"; markers use class="marker" with data-x / data-y.
/// Throws InvalidArgument for an empty series or non-finite / empty axis ranges.
std::string render_svg(const PlotSpec& spec);

// ---------------------------------------------------------------------------
// Theory tables: header `p,method,rho,alpha_c`; gaps are written with alpha_c = nan.

inline constexpr std::string_view kTheoryHeader = "p,method,rho,alpha_c";

struct TheoryRow {
    replica::PNorm p = replica::PNorm::L1;
    replica::CurveMethod method = replica::CurveMethod::replica;
    double rho = 0.0;
    double alpha_c = 0.0;  // NaN marks a gap
};

std::vector<TheoryRow> curve_rows(const replica::ThresholdCurve& curve);
void write_theory_csv(std::ostream& out, std::span<const TheoryRow> rows);
/// Throws ParseError with line/field diagnostics, including for input without data rows.
std::vector<TheoryRow> read_theory_csv(std::istream& in, std::string_view source = "theory");

/// Typical-limit curves for each norm found in `rows`, with the L1 worst-case
/// bound (if present) in an inset next to the L1 curve.
PlotSpec figure_2a(std::span<const TheoryRow> rows);

struct EstimateSet {
    std::string label;
    std::vector<CriticalPointEstimate> estimates;
};

/// alpha_c(rho, N) against 1/N for each set, with its fitted quadratic and a
/// marker at the intercept. Each set needs at least four distinct N.
PlotSpec figure_2b(std::span<const EstimateSet> sets);
PlotSpec figure_2b(std::span<const CriticalPointEstimate> estimates);

}  // namespace cslab::plot
