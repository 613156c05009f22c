#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cslab::numerics {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)

/// Standard normal density.
double normal_pdf(double x);

/// Gaussian upper tail Q(x) = P(Z > x) for Z ~ N(0, 1).
double q_function(double x);

/// Integral of the standard normal density over [0, x]; equals 1/2 - Q(x)
/// but keeps full relative precision for small |x|.
double normal_central_mass(double x);

/// Nodes and weights of an n-point Gaussian rule. Nodes are strictly
/// increasing; weights are positive.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] int order() const { return static_cast<int>(nodes.size()); }

    /// Sum of w_i f(x_i).
    template <class F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

inline constexpr int kDefaultGaussianOrder = 200;

/// Gauss-Hermite rule for the standard Gaussian measure Dz (weights sum to 1).
/// Exact for polynomials of degree <= 2*order - 1. Throws InvalidArgument for order < 2.
QuadratureRule gaussian_quadrature(int order = kDefaultGaussianOrder);

/// Gauss-Legendre rule on [-1, 1] (weights sum to 2).
QuadratureRule gauss_legendre(int order);

/// E[f(Z)] for Z ~ N(0, 1), for integrands that are smooth except at the
/// listed breakpoints. The line is cut at the breakpoints and each piece is
/// integrated with Gauss-Legendre panels; tails beyond |z| = 12 are dropped.
double gaussian_expectation(const std::function<double(double)>& f,
                            std::span<const double> breakpoints = {});

/// Brent-style bracketed root finder with a bisection guarantee.
/// Requires f(lo) * f(hi) <= 0 (NoBracket otherwise) and finite values of f
/// inside the bracket (NonFinite otherwise). The final bracket is narrower than `tol`.
double find_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                 int max_iterations = 500);

/// Least-squares polynomial coefficients c_0..c_degree minimizing
/// sum (y - sum c_k x^k)^2. Throws RankDeficient if the design matrix is singular.
std::vector<double> fit_polynomial(std::span<const double> xs, std::span<const double> ys,
                                   int degree);

/// Evaluate sum c_k x^k.
double eval_polynomial(std::span<const double> coeffs, double x);

}  // namespace cslab::numerics
