#include "cslab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "cslab/errors.hpp"
#include "cslab/numerics.hpp"

namespace cslab::plot {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void check_panel(const Panel& panel) {
    const Axes& ax = panel.axes;
    for (double v : {ax.x_min, ax.x_max, ax.y_min, ax.y_max}) {
        if (!std::isfinite(v)) throw InvalidArgument("render_svg: axis range must be finite");
    }
    if (!(ax.x_max > ax.x_min) || !(ax.y_max > ax.y_min)) {
        throw InvalidArgument("render_svg: axis range must be non-empty");
    }
    for (const auto& s : panel.series) {
        if (s.points.empty()) throw InvalidArgument("render_svg: series '" + s.label + "' is empty");
    }
}

struct Frame {
    double left, top, width, height;
    const Axes* axes;

    [[nodiscard]] double px(double x) const {
        return left + (x - axes->x_min) / (axes->x_max - axes->x_min) * width;
    }
    [[nodiscard]] double py(double y) const {
        return top + height - (y - axes->y_min) / (axes->y_max - axes->y_min) * height;
    }
};

std::vector<double> ticks(double lo, double hi) {
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + 1e-9 * step; t += step) {
        out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return out;
}

void draw_panel(std::ostream& svg, const Panel& panel, const Frame& f, bool inset) {
    const Axes& ax = panel.axes;
    const int font = inset ? 9 : 12;
    svg << "<rect x=\"" << num(f.left) << "\" y=\"" << num(f.top) << "\" width=\"" << num(f.width)
        << "\" height=\"" << num(f.height) << "\" fill=\"white\" stroke=\"black\"/>\n";
    for (double t : ticks(ax.x_min, ax.x_max)) {
        const double x = f.px(t);
        svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(f.top + f.height) << "\" x2=\"" << num(x)
            << "\" y2=\"" << num(f.top + f.height - 4) << "\" stroke=\"black\"/>"
            << "<text x=\"" << num(x) << "\" y=\"" << num(f.top + f.height + font + 2)
            << "\" font-size=\"" << font << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
    }
    for (double t : ticks(ax.y_min, ax.y_max)) {
        const double y = f.py(t);
        svg << "<line x1=\"" << num(f.left) << "\" y1=\"" << num(y) << "\" x2=\"" << num(f.left + 4)
            << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>"
            << "<text x=\"" << num(f.left - 4) << "\" y=\"" << num(y + font / 3.0) << "\" font-size=\""
            << font << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
    }
    svg << "<text class=\"axis-label\" x=\"" << num(f.left + f.width / 2) << "\" y=\""
        << num(f.top + f.height + 2.6 * font + 2) << "\" font-size=\"" << font
        << "\" text-anchor=\"middle\">" << escape(ax.x_label) << "</text>\n";
    svg << "<text class=\"axis-label\" x=\"" << num(f.left - 3.5 * font) << "\" y=\""
        << num(f.top + f.height / 2) << "\" font-size=\"" << font << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
        << num(f.left - 3.5 * font) << ' ' << num(f.top + f.height / 2) << ")\">" << escape(ax.y_label)
        << "</text>\n";

    const char* cls = inset ? "inset-series" : "series";
    svg << "<g clip-path=\"url(#" << (inset ? "clip-inset" : "clip-main") << ")\">\n";
    for (const auto& s : panel.series) {
        if (s.style == SeriesStyle::markers) {
            svg << "<g class=\"" << cls << "\" data-label=\"" << escape(s.label) << "\" fill=\"" << s.color
                << "\">";
            for (const auto& p : s.points) {
                svg << "<circle cx=\"" << num(f.px(p.x)) << "\" cy=\"" << num(f.py(p.y)) << "\" r=\"3\"/>";
            }
            svg << "</g>\n";
            continue;
        }
        svg << "<polyline class=\"" << cls << "\" data-label=\"" << escape(s.label)
            << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << (inset ? 1.2 : 1.8) << "\"";
        if (s.style == SeriesStyle::dashed) svg << " stroke-dasharray=\"6 4\"";
        svg << " points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            svg << (i ? " " : "") << num(f.px(s.points[i].x)) << ',' << num(f.py(s.points[i].y));
        }
        svg << "\"/>\n";
    }
    svg << "</g>\n";
    for (const auto& m : panel.markers) {
        svg << "<circle class=\"marker\" data-label=\"" << escape(m.label) << "\" data-x=\"" << num(m.at.x)
            << "\" data-y=\"" << num(m.at.y) << "\" cx=\"" << num(f.px(m.at.x)) << "\" cy=\""
            << num(f.py(m.at.y)) << "\" r=\"5\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    }

    // Legend, top right.
    double ly = f.top + font + 4;
    for (const auto& s : panel.series) {
        const double lx = f.left + f.width - 8 * font;
        svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - font / 3.0) << "\" x2=\"" << num(lx + 18)
            << "\" y2=\"" << num(ly - font / 3.0) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>"
            << "<text x=\"" << num(lx + 22) << "\" y=\"" << num(ly) << "\" font-size=\"" << font << "\">"
            << escape(s.label) << "</text>\n";
        ly += font + 4;
    }
    for (const auto& m : panel.markers) {
        const double lx = f.left + f.width - 8 * font;
        svg << "<text x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" font-size=\"" << font
            << "\" fill=\"#d62728\">" << escape(m.label) << "</text>\n";
        ly += font + 4;
    }
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    check_panel(spec.main);
    if (spec.inset) check_panel(*spec.inset);
    constexpr double kWidth = 640, kHeight = 480;
    const Frame main{70, 40, kWidth - 100, kHeight - 100, &spec.main.axes};
    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\">\n"
        << "<defs><clipPath id=\"clip-main\"><rect x=\"" << num(main.left) << "\" y=\"" << num(main.top)
        << "\" width=\"" << num(main.width) << "\" height=\"" << num(main.height) << "\"/></clipPath>";
    Frame inset{};
    if (spec.inset) {
        inset = Frame{main.left + 60, main.top + 14, main.width * 0.36, main.height * 0.34, &spec.inset->axes};
        svg << "<clipPath id=\"clip-inset\"><rect x=\"" << num(inset.left) << "\" y=\"" << num(inset.top)
            << "\" width=\"" << num(inset.width) << "\" height=\"" << num(inset.height) << "\"/></clipPath>";
    }
    svg << "</defs>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty()) {
        svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">"
            << escape(spec.title) << "</text>\n";
    }
    draw_panel(svg, spec.main, main, false);
    if (spec.inset) {
        svg << "<g class=\"inset\">\n";
        draw_panel(svg, *spec.inset, inset, true);
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::vector<TheoryRow> curve_rows(const replica::ThresholdCurve& curve) {
    std::vector<TheoryRow> rows;
    for (const auto& pt : curve.points) rows.push_back({curve.p, curve.method, pt.rho, pt.alpha_c});
    for (const auto& gap : curve.gaps) {
        rows.push_back({curve.p, curve.method, gap.rho, std::numeric_limits<double>::quiet_NaN()});
    }
    std::sort(rows.begin(), rows.end(), [](const TheoryRow& a, const TheoryRow& b) { return a.rho < b.rho; });
    return rows;
}

void write_theory_csv(std::ostream& out, std::span<const TheoryRow> rows) {
    out << kTheoryHeader << '\n';
    for (const auto& r : rows) {
        char buf[96];
        if (std::isnan(r.alpha_c)) {
            std::snprintf(buf, sizeof buf, "%.17g,nan", r.rho);
        } else {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", r.rho, r.alpha_c);
        }
        out << replica::to_string(r.p) << ',' << replica::to_string(r.method) << ',' << buf << '\n';
    }
}

std::vector<TheoryRow> read_theory_csv(std::istream& in, std::string_view source) {
    auto fail = [&](int line, std::string_view field, const std::string& what) {
        std::ostringstream msg;
        msg << source << ": line " << line;
        if (!field.empty()) msg << ", field '" << field << "'";
        msg << ": " << what;
        throw ParseError(msg.str());
    };
    std::string line;
    if (!std::getline(in, line)) fail(1, {}, "empty input, expected header '" + std::string(kTheoryHeader) + "'");
    if (line != kTheoryHeader) fail(1, {}, "header mismatch: got '" + line + "'");
    std::vector<TheoryRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 4) fail(lineno, {}, "expected 4 fields, got " + std::to_string(cells.size()));
        TheoryRow row;
        try {
            row.p = replica::parse_pnorm(cells[0]);
        } catch (const InvalidArgument& e) {
            fail(lineno, "p", e.what());
        }
        if (cells[1] == "replica") {
            row.method = replica::CurveMethod::replica;
        } else if (cells[1] == "worst_case") {
            row.method = replica::CurveMethod::worst_case;
        } else {
            fail(lineno, "method", "expected replica or worst_case, got '" + cells[1] + "'");
        }
        for (int k : {2, 3}) {
            char* end = nullptr;
            const double v = std::strtod(cells[k].c_str(), &end);
            if (cells[k].empty() || *end != '\0') {
                fail(lineno, k == 2 ? "rho" : "alpha_c", "expected a real number, got '" + cells[k] + "'");
            }
            (k == 2 ? row.rho : row.alpha_c) = v;
        }
        rows.push_back(row);
    }
    if (rows.empty()) fail(lineno, {}, "no data rows");
    return rows;
}

PlotSpec figure_2a(std::span<const TheoryRow> rows) {
    using replica::CurveMethod;
    using replica::PNorm;
    std::map<std::pair<int, int>, std::vector<Point>> curves;
    for (const auto& r : rows) {
        if (!std::isnan(r.alpha_c)) {
            curves[{static_cast<int>(r.p), static_cast<int>(r.method)}].push_back({r.rho, r.alpha_c});
        }
    }
    if (curves.empty()) throw InvalidArgument("figure_2a: no finite theory points");
    static const char* colors[] = {"#2ca02c", "#1f77b4", "#ff7f0e"};

    PlotSpec spec;
    spec.title = "Typical reconstruction limit";
    spec.main.axes = {"rho", "alpha_c", 0.0, 1.0, 0.0, 1.05};
    for (auto& [key, pts] : curves) {
        std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
        const auto p = static_cast<PNorm>(key.first);
        if (static_cast<CurveMethod>(key.second) != CurveMethod::replica) continue;
        spec.main.series.push_back(
            {"p=" + std::string(replica::to_string(p)), pts, colors[key.first], SeriesStyle::line});
    }
    const auto worst = curves.find({static_cast<int>(PNorm::L1), static_cast<int>(CurveMethod::worst_case)});
    if (worst != curves.end()) {
        Panel inset;
        double x_max = 0.0, y_max = 0.0;
        for (const auto& pt : worst->second) {
            x_max = std::max(x_max, pt.x);
            y_max = std::max(y_max, pt.y);
        }
        inset.axes = {"rho", "alpha", 0.0, x_max * 1.05, 0.0, y_max * 1.05};
        inset.series.push_back({"worst case", worst->second, "#d62728", SeriesStyle::dashed});
        const auto typical = curves.find({static_cast<int>(PNorm::L1), static_cast<int>(CurveMethod::replica)});
        if (typical != curves.end()) {
            std::vector<Point> clipped;
            for (const auto& pt : typical->second) {
                if (pt.x <= x_max) clipped.push_back(pt);
            }
            if (!clipped.empty()) inset.series.push_back({"p=1", clipped, colors[1], SeriesStyle::line});
        }
        spec.inset = std::move(inset);
    }
    if (spec.main.series.empty()) throw InvalidArgument("figure_2a: no typical-limit curves");
    return spec;
}

PlotSpec figure_2b(std::span<const EstimateSet> sets) {
    if (sets.empty()) throw InvalidArgument("figure_2b: no estimates");
    static const char* colors[][2] = {{"#1f77b4", "#aec7e8"}, {"#ff7f0e", "#ffbb78"},
                                      {"#2ca02c", "#98df8a"}, {"#9467bd", "#c5b0d5"}};
    PlotSpec spec;
    spec.title = "Empirical critical rate";
    double x_max = 0.0, y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
    std::vector<std::vector<double>> fits;
    for (const auto& set : sets) {
        fits.push_back(finite_size_fit(set.estimates));
        for (const auto& e : set.estimates) x_max = std::max(x_max, 1.0 / e.n);
    }
    for (std::size_t k = 0; k < sets.size(); ++k) {
        const auto& set = sets[k];
        const auto& coeffs = fits[k];
        const auto* color = colors[k % 4];
        const std::string suffix = set.label.empty() ? "" : " (" + set.label + ")";
        Series data{"alpha_c(N)" + suffix, {}, color[0], SeriesStyle::markers};
        for (const auto& e : set.estimates) {
            data.points.push_back({1.0 / e.n, e.alpha_c_n});
            y_lo = std::min(y_lo, e.alpha_c_n - e.std_error);
            y_hi = std::max(y_hi, e.alpha_c_n + e.std_error);
        }
        std::sort(data.points.begin(), data.points.end(),
                  [](const Point& a, const Point& b) { return a.x < b.x; });
        Series fit{"quadratic fit" + suffix, {}, color[0], SeriesStyle::dashed};
        constexpr int kSamples = 100;
        for (int i = 0; i <= kSamples; ++i) {
            const double x = x_max * 1.05 * i / kSamples;
            const double y = numerics::eval_polynomial(coeffs, x);
            fit.points.push_back({x, y});
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
        spec.main.series.push_back(std::move(data));
        spec.main.series.push_back(std::move(fit));
        spec.main.markers.push_back({"N -> inf" + suffix + ": " + num(coeffs[0]), {0.0, coeffs[0]}});
    }
    const double pad = std::max(1e-3, 0.08 * (y_hi - y_lo));
    spec.main.axes = {"1/N", "alpha_c(rho, N)", 0.0, x_max * 1.1, y_lo - pad, y_hi + pad};
    return spec;
}

PlotSpec figure_2b(std::span<const CriticalPointEstimate> estimates) {
    const EstimateSet set{"", {estimates.begin(), estimates.end()}};
    return figure_2b(std::span<const EstimateSet>(&set, 1));
}

}  // namespace cslab::plot
