#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "channel.hpp"
#include "cslab/errors.hpp"
#include "cslab/numerics.hpp"
#include "cslab/replica.hpp"
#include "cslab/rng.hpp"

using namespace cslab;
using namespace cslab::replica;

namespace {

double objective(PNorm p, double x, double h, double q_hat) {
    double pen = 0.0;
    switch (p) {
        case PNorm::L0: pen = x != 0.0 ? 1.0 : 0.0; break;
        case PNorm::L1: pen = std::abs(x); break;
        case PNorm::L2: pen = x * x; break;
    }
    return 0.5 * q_hat * x * x - h * x + pen;
}

// Grid search followed by golden-section polishing; x = 0 is always a candidate.
std::pair<double, double> brute_minimize(PNorm p, double h, double q_hat) {
    const double lo = -std::abs(h) / q_hat - 2.0, hi = std::abs(h) / q_hat + 2.0;
    const int n = 20000;
    double best_x = 0.0, best_f = objective(p, 0.0, h, q_hat);
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double f = objective(p, x, h, q_hat);
        if (f < best_f) best_f = f, best_x = x;
    }
    if (best_x != 0.0) {
        const double step = (hi - lo) / n;
        double a = best_x - step, b = best_x + step;
        // The piece containing best_x is smooth once x = 0 is excluded.
        if (a < 0.0 && b > 0.0) (best_x > 0 ? a : b) = 0.0;
        // Bisect on the sign of a central-difference slope: sharper than comparing
        // objective values, which cannot resolve x below sqrt(machine epsilon).
        auto slope = [&](double x) {
            const double d = 1e-6;
            return objective(p, x + d, h, q_hat) - objective(p, x - d, h, q_hat);
        };
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
            const double mid = 0.5 * (a + b);
            if (slope(mid) > 0.0) b = mid; else a = mid;
        }
        const double x = 0.5 * (a + b);
        const double f = objective(p, x, h, q_hat);
        if (f < best_f) best_f = f, best_x = x;
    }
    return {best_x, best_f};
}

}  // namespace

TEST_CASE("minimizers and minima match brute-force minimization") {
    Rng rng(2024);
    for (PNorm p : {PNorm::L0, PNorm::L1, PNorm::L2}) {
        CAPTURE(to_string(p));
        for (int i = 0; i < 100; ++i) {
            const double h = 6.0 * rng.uniform() - 3.0;
            const double q_hat = 0.2 + 3.0 * rng.uniform();
            CAPTURE(h);
            CAPTURE(q_hat);
            if (p == PNorm::L0 && std::abs(std::abs(h) - std::sqrt(2.0 * q_hat)) < 1e-6) continue;
            const auto [bx, bf] = brute_minimize(p, h, q_hat);
            CHECK(phi_p(p, h, q_hat) == doctest::Approx(bf).epsilon(1e-10).scale(1.0));
            CHECK(x_star(p, h, q_hat) == doctest::Approx(bx).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("closed-form minimizers") {
    CHECK(x_star(PNorm::L1, 3.0, 2.0) == doctest::Approx(1.0));
    CHECK(x_star(PNorm::L1, -3.0, 2.0) == doctest::Approx(-1.0));
    CHECK(x_star(PNorm::L1, 0.9, 2.0) == 0.0);
    CHECK(x_star(PNorm::L2, 3.0, 1.0) == doctest::Approx(1.0));
    CHECK(x_star(PNorm::L0, 2.1, 2.0) == doctest::Approx(1.05));
    CHECK(x_star(PNorm::L0, 1.9, 2.0) == 0.0);
    CHECK(threshold_field(PNorm::L0, 2.0) == doctest::Approx(2.0));
    CHECK(threshold_field(PNorm::L1, 2.0) == 1.0);
    CHECK(threshold_field(PNorm::L2, 2.0) == 0.0);
    CHECK_THROWS_AS(x_star(PNorm::L1, 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(phi_p(PNorm::L2, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("L0 discontinuity sits at sqrt(2 Q_hat)") {
    for (double q_hat : {0.5, 1.0, 2.5}) {
        // Scan h on a grid and locate the first h where the brute-force minimizer jumps off zero.
        const double step = 1e-4;
        double jump = NAN;
        for (double h = 0.0; h < 5.0; h += step) {
            if (brute_minimize(PNorm::L0, h, q_hat).first != 0.0) {
                jump = h;
                break;
            }
        }
        CHECK(std::abs(jump - std::sqrt(2.0 * q_hat)) <= 2.0 * step);
        CHECK(std::abs(threshold_field(PNorm::L0, q_hat) - jump) <= 2.0 * step);
    }
}

TEST_CASE("channel averages agree with direct Gaussian quadrature") {
    for (PNorm p : {PNorm::L0, PNorm::L1, PNorm::L2}) {
        for (double sigma : {0.3, 1.0, 2.7}) {
            for (double k : {0.4, 1.5, 6.0}) {
                CAPTURE(to_string(p));
                CAPTURE(sigma);
                CAPTURE(k);
                const double t = threshold_field(p, k) / sigma;
                const double cuts[] = {-t, t};
                const std::span<const double> brk = p == PNorm::L2 ? std::span<const double>{}
                                                                   : std::span<const double>(cuts);
                const double m2 = numerics::gaussian_expectation(
                    [&](double z) { const double x = x_star(p, sigma * z, k); return x * x; }, brk);
                const double pot = numerics::gaussian_expectation(
                    [&](double z) { return phi_p(p, sigma * z, k); }, brk);
                const double act = k / sigma * numerics::gaussian_expectation(
                    [&](double z) { return z * x_star(p, sigma * z, k); }, brk);
                CHECK(channel::second_moment(p, sigma, k) == doctest::Approx(m2).epsilon(1e-10).scale(1e-6));
                CHECK(channel::mean_potential(p, sigma, k) == doctest::Approx(pot).epsilon(1e-10).scale(1e-6));
                CHECK(channel::activity(p, sigma, k) == doctest::Approx(act).epsilon(1e-10).scale(1e-6));
            }
        }
    }
}

TEST_CASE("soft threshold energy") {
    for (double sigma : {0.1, 1.0, 10.0}) {
        const double cuts[] = {-1.0 / sigma, 1.0 / sigma};
        const double ref = numerics::gaussian_expectation(
            [&](double z) { const double a = std::abs(sigma * z) - 1.0; return a > 0 ? a * a : 0.0; }, cuts);
        CHECK(channel::soft_threshold_energy(sigma) == doctest::Approx(ref).epsilon(1e-11).scale(1e-12));
    }
}
