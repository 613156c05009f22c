#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "cslab/errors.hpp"
#include "cslab/numerics.hpp"

using namespace cslab;
using namespace cslab::numerics;

namespace {

// Adaptive Simpson, used as an independent reference for the Gaussian integrals.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

double adaptive(const std::function<double(double)>& f, double a, double b, double eps = 1e-14) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, 50);
}

}  // namespace

TEST_CASE("normal density and tail") {
    CHECK(normal_pdf(0.0) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-15));
    CHECK(q_function(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // Reference by direct integration of the density over [1, 12].
    const double ref = adaptive(normal_pdf, 1.0, 12.0);
    CHECK(q_function(1.0) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(q_function(1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-14));
    CHECK(q_function(-2.0) == doctest::Approx(1.0 - q_function(2.0)).epsilon(1e-15));
    // Far tail keeps relative precision where 1 - Phi(x) would underflow to 0.
    CHECK(q_function(30.0) > 0.0);
    CHECK(q_function(30.0) == doctest::Approx(4.906713927148187e-198).epsilon(1e-10));
    CHECK(normal_central_mass(1e-9) == doctest::Approx(1e-9 * kInvSqrt2Pi).epsilon(1e-12));
    CHECK(normal_central_mass(1.5) == doctest::Approx(0.5 - q_function(1.5)).epsilon(1e-14));
}

TEST_CASE("Gauss-Hermite rule integrates Gaussian moments") {
    const auto rule = gaussian_quadrature();
    CHECK(rule.order() == kDefaultGaussianOrder);
    double wsum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        CHECK(rule.weights[i] > 0.0);
        if (i > 0) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
        wsum += rule.weights[i];
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));
    // E z^{2k} = (2k-1)!!
    double dfact = 1.0;
    for (int k = 1; k <= 8; ++k) {
        dfact *= 2 * k - 1;
        const double m = rule.integrate([k](double z) { return std::pow(z, 2 * k); });
        CHECK(m == doctest::Approx(dfact).epsilon(1e-10));
    }
    CHECK(rule.integrate([](double z) { return z * z * z; }) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(gaussian_quadrature(1), InvalidArgument);
}

TEST_CASE("Gauss-Legendre rule") {
    const auto rule = gauss_legendre(12);
    CHECK(rule.integrate([](double) { return 1.0; }) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rule.integrate([](double x) { return std::pow(x, 22); }) == doctest::Approx(2.0 / 23.0).epsilon(1e-13));
}

TEST_CASE("piecewise Gaussian expectation of a kinked integrand") {
    // E|z| = sqrt(2/pi); trapezoid reference on a fine grid.
    double trap = 0.0;
    const int n = 400000;
    const double h = 24.0 / n;
    for (int i = 0; i <= n; ++i) {
        const double z = -12.0 + i * h;
        trap += (i == 0 || i == n ? 0.5 : 1.0) * std::abs(z) * normal_pdf(z);
    }
    trap *= h;
    const double brk[] = {0.0};
    const double e = gaussian_expectation([](double z) { return std::abs(z); }, brk);
    CHECK(e == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-13));
    CHECK(e == doctest::Approx(trap).epsilon(1e-9));

    // Soft-threshold energy E (|z| - 1)_+^2 = 2[(2) Q(1) - phi(1)].
    const double cuts[] = {-1.0, 1.0};
    const double soft = gaussian_expectation(
        [](double z) { const double a = std::abs(z) - 1.0; return a > 0 ? a * a : 0.0; }, cuts);
    CHECK(soft == doctest::Approx(2.0 * (2.0 * q_function(1.0) - normal_pdf(1.0))).epsilon(1e-12));
}

TEST_CASE("bracketed root finding") {
    const double r = find_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0, 1e-14);
    CHECK(r == doctest::Approx(0.7390851332151607).epsilon(1e-13));
    CHECK(find_root([](double x) { return x * x * x; }, -1.0, 2.0, 1e-12) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12), NoBracket);
    CHECK_THROWS_AS(find_root([](double x) { return x > 0.3 ? NAN : x - 0.5; }, 0.0, 1.0, 1e-12),
                    NonFinite);
}

TEST_CASE("least-squares polynomial fit") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 10; ++i) {
        const double x = 1.0 / (10 + 2 * i);
        xs.push_back(x);
        ys.push_back(0.83 - 0.7 * x + 0.2 * x * x);
    }
    const auto c = fit_polynomial(xs, ys, 2);
    REQUIRE(c.size() == 3);
    CHECK(c[0] == doctest::Approx(0.83).epsilon(1e-10));
    CHECK(c[1] == doctest::Approx(-0.7).epsilon(1e-8));
    CHECK(c[2] == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(eval_polynomial(c, 0.1) == doctest::Approx(0.83 - 0.07 + 0.002).epsilon(1e-10));

    const std::vector<double> same{0.5, 0.5, 0.5, 0.5}, y4{1, 2, 3, 4};
    CHECK_THROWS_AS(fit_polynomial(same, y4, 2), RankDeficient);
}

TEST_CASE("tail symmetry and monotonicity") {
    double prev = 1.0;
    for (double x = -8.0; x <= 8.0; x += 0.01) {
        CHECK(std::abs(q_function(x) + q_function(-x) - 1.0) <= 1e-12);
        // Below x = -5, 1 - Q(x) falls under half an ulp of 1.
        if (x > -5.0) CHECK(q_function(x) < prev); else CHECK(q_function(x) <= prev);
        prev = q_function(x);
    }
}

TEST_CASE("exact polynomial data") {
    const std::vector<double> x1{1, 2, 3}, y1{2, 4, 6};
    const auto line = fit_polynomial(x1, y1, 1);
    CHECK(line[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(line[1] == doctest::Approx(2.0).epsilon(1e-10));
    const std::vector<double> x2{0.1, 0.05, 0.025};
    std::vector<double> y2;
    for (double x : x2) y2.push_back(1 + 3 * x + 2 * x * x);
    const auto quad = fit_polynomial(x2, y2, 2);
    CHECK(std::abs(quad[0] - 1.0) <= 1e-10);
    CHECK(std::abs(quad[1] - 3.0) <= 1e-10);
    CHECK(std::abs(quad[2] - 2.0) <= 1e-10);
}
