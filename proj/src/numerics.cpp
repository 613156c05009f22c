#include "cslab/numerics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cslab/errors.hpp"

namespace cslab::numerics {

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_central_mass(double x) { return 0.5 * std::erf(x / std::numbers::sqrt2); }

namespace {

// Orthonormal Hermite polynomials for Dz: p_0 = 1,
// p_{k+1} = (x p_k - sqrt(k) p_{k-1}) / sqrt(k+1).
// Returns p_n(x), p_n'(x) and sum_{k<n} p_k(x)^2.
struct HermiteEval {
    double value;
    double derivative;
    double christoffel_sum;
};

HermiteEval hermite_orthonormal(int n, double x) {
    double p_prev = 0.0, p = 1.0;
    double d_prev = 0.0, d = 0.0;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        sum += p * p;
        const double sk = std::sqrt(static_cast<double>(k));
        const double sk1 = std::sqrt(static_cast<double>(k + 1));
        const double p_next = (x * p - sk * p_prev) / sk1;
        const double d_next = (p + x * d - sk * d_prev) / sk1;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    return {p, d, sum};
}

}  // namespace

QuadratureRule gaussian_quadrature(int order) {
    if (order < 2) {
        throw InvalidArgument("gaussian_quadrature: order must be >= 2");
    }
    // Golub-Welsch for the initial nodes, then Newton polishing on the
    // three-term recurrence and Christoffel weights.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(order - 1);
    for (int k = 1; k < order; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        double x = eig.eigenvalues()(i);
        for (int it = 0; it < 3; ++it) {
            const auto h = hermite_orthonormal(order, x);
            if (h.derivative == 0.0) break;
            x -= h.value / h.derivative;
        }
        rule.nodes[i] = x;
    }
    // Exact symmetry about the origin.
    for (int i = 0; i < order / 2; ++i) {
        const double a = 0.5 * (rule.nodes[order - 1 - i] - rule.nodes[i]);
        rule.nodes[i] = -a;
        rule.nodes[order - 1 - i] = a;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;

    double total = 0.0;
    for (int i = 0; i < order; ++i) {
        rule.weights[i] = 1.0 / hermite_orthonormal(order, rule.nodes[i]).christoffel_sum;
        total += rule.weights[i];
    }
    for (auto& w : rule.weights) w /= total;
    return rule;
}

QuadratureRule gauss_legendre(int order) {
    if (order < 1) throw InvalidArgument("gauss_legendre: order must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (order == 1) p0 = 1.0;
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute derivative at the polished node.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        if (order == 1) p0 = 1.0;
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

double gaussian_expectation(const std::function<double(double)>& f,
                            std::span<const double> breakpoints) {
    constexpr double kCut = 12.0;
    constexpr double kPanel = 1.0;
    static const QuadratureRule panel_rule = gauss_legendre(20);

    std::vector<double> cuts{-kCut};
    for (double b : breakpoints) {
        if (std::isfinite(b) && b > -kCut && b < kCut) cuts.push_back(b);
    }
    cuts.push_back(kCut);
    std::sort(cuts.begin(), cuts.end());

    double acc = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        if (b - a <= 0.0) continue;
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / kPanel)));
        const double width = (b - a) / panels;
        for (int k = 0; k < panels; ++k) {
            const double lo = a + k * width;
            const double mid = lo + 0.5 * width;
            const double half = 0.5 * width;
            double part = 0.0;
            for (int i = 0; i < panel_rule.order(); ++i) {
                const double z = mid + half * panel_rule.nodes[i];
                part += panel_rule.weights[i] * f(z) * normal_pdf(z);
            }
            acc += half * part;
        }
    }
    return acc;
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                 int max_iterations) {
    if (!(lo < hi)) throw InvalidArgument("find_root: requires lo < hi");
    if (!(tol > 0.0)) throw InvalidArgument("find_root: requires tol > 0");

    auto eval = [&](double x) {
        const double v = f(x);
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "find_root: non-finite function value at x=" << x;
            throw NonFinite(msg.str());
        }
        return v;
    };

    double a = lo, b = hi;
    double fa = eval(a), fb = eval(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) {
        std::ostringstream msg;
        msg << "find_root: f(" << lo << ")=" << fa << " and f(" << hi << ")=" << fb
            << " have the same sign";
        throw NoBracket(msg.str());
    }

    // Brent's zeroin. b is the best estimate, c the contrapoint.
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 0; it < max_iterations; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol1 || fb == 0.0) return b;

        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (m > 0.0 ? tol1 : -tol1);
        fb = eval(b);
    }
    std::ostringstream msg;
    msg << "find_root: no convergence after " << max_iterations << " iterations, bracket ["
        << std::min(b, c) << ", " << std::max(b, c) << "]";
    throw ConvergenceFailure(msg.str());
}

std::vector<double> fit_polynomial(std::span<const double> xs, std::span<const double> ys,
                                   int degree) {
    if (degree < 0) throw InvalidArgument("fit_polynomial: degree must be >= 0");
    if (xs.size() != ys.size()) throw InvalidArgument("fit_polynomial: xs and ys differ in length");
    const auto n = static_cast<Eigen::Index>(xs.size());
    if (n < degree + 1) throw InvalidArgument("fit_polynomial: need at least degree+1 points");

    Eigen::MatrixXd design(n, degree + 1);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double power = 1.0;
        for (int k = 0; k <= degree; ++k) {
            design(i, k) = power;
            power *= xs[i];
        }
        rhs(i) = ys[i];
    }
    // Column scaling keeps the rank decision independent of the x units.
    Eigen::VectorXd scale = design.colwise().norm().transpose();
    for (int k = 0; k <= degree; ++k) {
        if (scale(k) == 0.0) throw RankDeficient("fit_polynomial: zero column in design matrix");
        design.col(k) /= scale(k);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-12);
    if (qr.rank() < degree + 1) {
        std::ostringstream msg;
        msg << "fit_polynomial: design matrix has rank " << qr.rank() << " < " << degree + 1;
        throw RankDeficient(msg.str());
    }
    Eigen::VectorXd c = qr.solve(rhs);
    std::vector<double> out(degree + 1);
    for (int k = 0; k <= degree; ++k) out[k] = c(k) / scale(k);
    return out;
}

double eval_polynomial(std::span<const double> coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

}  // namespace cslab::numerics
