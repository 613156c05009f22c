#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "channel.hpp"
#include "cslab/errors.hpp"
#include "cslab/numerics.hpp"
#include "cslab/replica.hpp"

// Stationarity of the RS objective
//   S = alpha (Q - 2m + rho) / (2 chi) + m_hat m - Q_hat Q / 2 + chi_hat chi / 2
//       + (1-rho) <phi(sqrt(chi_hat) z; Q_hat)> + rho <phi(sqrt(chi_hat + m_hat^2) z; Q_hat)>
//
// dS/dQ = 0 and dS/dm = 0 give Q_hat = m_hat = alpha / chi =: K. The remaining
// conditions, with sigma0^2 = chi_hat and sigma1^2 = chi_hat + K^2, are
//   dS/dchi_hat = 0:  (1-rho) act(sigma0) + rho act(sigma1) = alpha
//   dS/dchi     = 0:  alpha chi_hat = K^2 (Q - 2m + rho)
//   dS/dQ_hat   = 0:  Q = (1-rho) <x*^2>(sigma0) + rho <x*^2>(sigma1)
//   dS/dm_hat   = 0:  m = rho act(sigma1)
// where act is K <z x*(sigma z)> / sigma. The failure branch is a finite root
// of the first two. The successful branch is the boundary point chi = 0
// (K = infinity) where dS/dchi_hat vanishes through its factor chi and dS/dchi
// reduces to alpha chi_hat = lim K^2 (Q - 2m + rho).

namespace cslab::replica {

using numerics::find_root;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_problem(double alpha, double rho, const char* op) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw InvalidArgument(std::string(op) + ": alpha must be positive and finite");
    }
    if (!(rho > 0.0 && rho < 1.0)) {
        throw InvalidArgument(std::string(op) + ": rho must lie in (0, 1)");
    }
}

void require_finite_params(const RsOrderParams& prm, const char* op) {
    const double values[] = {prm.self_overlap,     prm.susceptibility,       prm.overlap,
                             prm.self_overlap_hat, prm.susceptibility_hat, prm.overlap_hat};
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument(std::string(op) + ": non-finite order parameter");
    }
    if (!(prm.susceptibility > 0.0)) throw InvalidArgument(std::string(op) + ": requires chi > 0");
    if (!(prm.self_overlap_hat > 0.0)) throw InvalidArgument(std::string(op) + ": requires Q_hat > 0");
    if (prm.susceptibility_hat < 0.0) throw InvalidArgument(std::string(op) + ": requires chi_hat >= 0");
}

double gaussian_mean_potential(PNorm p, double sigma, double q_hat) {
    if (sigma == 0.0) return phi_p(p, 0.0, q_hat);
    const double kink = threshold_field(p, q_hat) / sigma;
    const double cuts[] = {-kink, kink};
    return numerics::gaussian_expectation([&](double z) { return phi_p(p, sigma * z, q_hat); },
                                          p == PNorm::L2 ? std::span<const double>{} : cuts);
}

// lim_{K->inf} K^2 (Q - 2m + rho) as a function of chi_hat.
double limit_scaled_error(PNorm p, double rho, double chi_hat) {
    return (1.0 - rho) * channel::noise_error_scaled(p, chi_hat, kInf) +
           rho * channel::truth_error_scaled(p, chi_hat, kInf);
}

double scaled_error(PNorm p, double rho, double chi_hat, double k) {
    return (1.0 - rho) * channel::noise_error_scaled(p, chi_hat, k) +
           rho * channel::truth_error_scaled(p, chi_hat, k);
}

double max_abs(const std::array<double, 6>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::optional<SaddleSolution> solve_successful(PNorm p, double alpha, double rho,
                                               const RsOrderParams& init,
                                               const SaddleOptions& opts) {
    SaddleSolution sol;
    sol.branch = SaddleBranch::successful;
    if (p == PNorm::L0) {
        // The L0 limit equation diverges (K^2 E grows like sqrt(K)); the branch is
        // represented by its limit point and exists for alpha > rho.
        if (!(alpha > rho)) return std::nullopt;
        sol.params = successful_params(rho, kInf);
        return sol;
    }

    // residual(chi_hat) = alpha chi_hat - lim K^2 E, concave with slope
    // alpha - (1-rho) act(sqrt(chi_hat)) - rho.
    auto residual = [&](double ch) { return alpha * ch - limit_scaled_error(p, rho, ch); };
    auto slope = [&](double ch) {
        return alpha - (1.0 - rho) * channel::activity(p, std::sqrt(ch), kInf) - rho;
    };
    constexpr double lo_bound = 1e-12, hi_bound = 1e12;

    double lo = lo_bound, hi = hi_bound;
    if (slope(hi_bound) < 0.0) {
        if (!(slope(lo_bound) > 0.0)) return std::nullopt;
        // Bisection for the peak of the concave residual.
        double a = std::log(lo_bound), b = std::log(hi_bound);
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
            const double mid = 0.5 * (a + b);
            (slope(std::exp(mid)) > 0.0 ? a : b) = mid;
        }
        const double peak = std::exp(0.5 * (a + b));
        if (!(residual(peak) > 0.0)) return std::nullopt;
        const double start = std::isfinite(init.susceptibility_hat) && init.susceptibility_hat > 0.0
                                 ? init.susceptibility_hat
                                 : peak * 0.5;
        if (start <= peak) {
            hi = peak;
        } else {
            lo = peak;
        }
    }
    if (!(residual(lo) < 0.0 && residual(hi) > 0.0) && !(residual(lo) > 0.0 && residual(hi) < 0.0)) {
        return std::nullopt;
    }
    const bool rising = residual(hi) > 0.0;

    // Safeguarded Newton in log(chi_hat).
    double a = std::log(lo), b = std::log(hi);
    double u = std::isfinite(init.susceptibility_hat) && init.susceptibility_hat > 0.0
                   ? std::clamp(std::log(init.susceptibility_hat), a, b)
                   : 0.5 * (a + b);
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        const double ch = std::exp(u);
        const double r = residual(ch);
        if ((r < 0.0) == rising) {
            a = u;
        } else {
            b = u;
        }
        const double d = slope(ch) * ch;  // dr/du
        double next = (d != 0.0) ? u - r / d : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        const double step = std::abs(next - u);
        u = next;
        if (step < 1e-15 * std::max(1.0, std::abs(u)) || b - a < 1e-15) break;
    }
    const double chi_hat = std::exp(u);
    sol.params = successful_params(rho, chi_hat);
    sol.residuals[1] = residual(chi_hat) / (2.0 * alpha);
    sol.iterations = it + 1;
    if (!(std::abs(sol.residuals[1]) <= opts.tolerance)) {
        std::ostringstream msg;
        msg << "solve_rs_saddle: successful branch did not converge, rescaled chi residual "
            << sol.residuals[1];
        throw ConvergenceFailure(msg.str());
    }
    return sol;
}

RsOrderParams failure_params(PNorm p, double alpha, double rho, double k, double chi_hat) {
    RsOrderParams prm;
    const double sigma0 = std::sqrt(chi_hat);
    const double sigma1 = std::sqrt(chi_hat + k * k);
    prm.susceptibility = alpha / k;
    prm.self_overlap_hat = k;
    prm.overlap_hat = k;
    prm.susceptibility_hat = chi_hat;
    prm.self_overlap = (1.0 - rho) * channel::second_moment(p, sigma0, k) +
                       rho * channel::second_moment(p, sigma1, k);
    prm.overlap = rho * channel::activity(p, sigma1, k);
    return prm;
}

std::optional<SaddleSolution> solve_failure(PNorm p, double alpha, double rho,
                                            const RsOrderParams& init, const SaddleOptions& opts) {
    SaddleSolution sol;
    sol.branch = SaddleBranch::failure;
    double k = 0.0, chi_hat = 0.0;
    int evaluations = 0;

    if (p == PNorm::L2) {
        // act = K / (K + 2) does not depend on chi_hat, so both conditions are explicit.
        if (!(alpha < 1.0)) return std::nullopt;
        k = 2.0 * alpha / (1.0 - alpha);
        chi_hat = 4.0 * alpha * rho / (1.0 - alpha);
    } else {
        const double log_ch_lo = std::log(1e-12), log_ch_hi = std::log(1e12);
        // Given K, the chi_hat condition is monotone increasing in chi_hat.
        auto chi_hat_of = [&](double kk) -> std::optional<double> {
            auto f = [&](double u) {
                const double ch = std::exp(u);
                return (1.0 - rho) * channel::activity(p, std::sqrt(ch), kk) +
                       rho * channel::activity(p, std::sqrt(ch + kk * kk), kk) - alpha;
            };
            if (!(f(log_ch_lo) < 0.0 && f(log_ch_hi) > 0.0)) return std::nullopt;
            return std::exp(find_root(f, log_ch_lo, log_ch_hi, 1e-15, opts.max_iterations));
        };
        auto outer = [&](double v) -> std::optional<double> {
            ++evaluations;
            const double kk = std::exp(v);
            const auto ch = chi_hat_of(kk);
            if (!ch) return std::nullopt;
            return (alpha * *ch - scaled_error(p, rho, *ch, kk)) / (alpha * *ch + 1.0);
        };

        const double v_lo = std::log(1e-4), v_hi = std::log(1e8);
        constexpr int kScan = 240;
        std::vector<double> roots;
        std::optional<double> prev;
        double prev_v = v_lo;
        for (int i = 0; i <= kScan; ++i) {
            const double v = v_lo + (v_hi - v_lo) * i / kScan;
            const auto cur = outer(v);
            if (cur && prev && ((*cur > 0.0) != (*prev > 0.0))) {
                auto g = [&](double w) {
                    const auto val = outer(w);
                    if (!val) throw NonFinite("solve_rs_saddle: chi_hat condition lost inside bracket");
                    return *val;
                };
                roots.push_back(find_root(g, prev_v, v, 1e-14, opts.max_iterations));
            }
            prev = cur;
            prev_v = v;
        }
        if (roots.empty()) return std::nullopt;
        double target = std::isfinite(init.self_overlap_hat) && init.self_overlap_hat > 0.0
                            ? std::log(init.self_overlap_hat)
                            : 0.0;
        const double v = *std::min_element(roots.begin(), roots.end(), [&](double x, double y) {
            return std::abs(x - target) < std::abs(y - target);
        });
        k = std::exp(v);
        chi_hat = *chi_hat_of(k);
    }

    sol.params = failure_params(p, alpha, rho, k, chi_hat);
    sol.residuals = rs_gradient(p, alpha, rho, sol.params);
    // The chi condition in cancellation-free form: (alpha chi_hat - K^2 E) / (2 alpha).
    sol.residuals[1] = (alpha * chi_hat - scaled_error(p, rho, chi_hat, k)) / (2.0 * alpha);
    sol.iterations = evaluations;
    if (!(max_abs(sol.residuals) <= opts.tolerance)) {
        std::ostringstream msg;
        msg << "solve_rs_saddle: failure branch residuals exceed tolerance:";
        for (double r : sol.residuals) msg << ' ' << r;
        throw ConvergenceFailure(msg.str());
    }
    return sol;
}

}  // namespace

double rs_free_energy(PNorm p, double alpha, double rho, const RsOrderParams& prm) {
    require_problem(alpha, rho, "rs_free_energy");
    require_finite_params(prm, "rs_free_energy");
    const double q = prm.self_overlap, chi = prm.susceptibility, m = prm.overlap;
    const double q_hat = prm.self_overlap_hat, chi_hat = prm.susceptibility_hat,
                 m_hat = prm.overlap_hat;
    const double sigma0 = std::sqrt(chi_hat);
    const double sigma1 = std::sqrt(chi_hat + m_hat * m_hat);
    return alpha * (q - 2.0 * m + rho) / (2.0 * chi) + m_hat * m - 0.5 * q_hat * q +
           0.5 * chi_hat * chi + (1.0 - rho) * gaussian_mean_potential(p, sigma0, q_hat) +
           rho * gaussian_mean_potential(p, sigma1, q_hat);
}

std::array<double, 6> rs_gradient(PNorm p, double alpha, double rho, const RsOrderParams& prm) {
    require_problem(alpha, rho, "rs_gradient");
    require_finite_params(prm, "rs_gradient");
    const double q = prm.self_overlap, chi = prm.susceptibility, m = prm.overlap;
    const double k = prm.self_overlap_hat, chi_hat = prm.susceptibility_hat, m_hat = prm.overlap_hat;
    const double sigma0 = std::sqrt(chi_hat);
    const double sigma1 = std::sqrt(chi_hat + m_hat * m_hat);
    const double act0 = channel::activity(p, sigma0, k);
    const double act1 = channel::activity(p, sigma1, k);
    const double mse = q - 2.0 * m + rho;
    return {
        alpha / (2.0 * chi) - 0.5 * k,
        -alpha * mse / (2.0 * chi * chi) + 0.5 * chi_hat,
        -alpha / chi + m_hat,
        -0.5 * q + 0.5 * ((1.0 - rho) * channel::second_moment(p, sigma0, k) +
                          rho * channel::second_moment(p, sigma1, k)),
        0.5 * chi - ((1.0 - rho) * act0 + rho * act1) / (2.0 * k),
        m - rho * m_hat * act1 / k,
    };
}

double reduced_free_energy(PNorm p, double alpha, double rho, double chi, double chi_hat) {
    require_problem(alpha, rho, "reduced_free_energy");
    if (!(chi >= 0.0) || !std::isfinite(chi)) {
        throw InvalidArgument("reduced_free_energy: chi must be finite and >= 0");
    }
    if (!(chi_hat >= 0.0) || !std::isfinite(chi_hat)) {
        throw InvalidArgument("reduced_free_energy: chi_hat must be finite and >= 0");
    }
    const double k = chi > 0.0 ? alpha / chi : kInf;
    const double noise = std::isinf(k) ? 0.0 : channel::mean_potential(p, std::sqrt(chi_hat), k);
    return 0.5 * chi * chi_hat + (1.0 - rho) * noise + rho * channel::reduced_truth_term(p, chi_hat, k);
}

SaddleSolution solve_rs_saddle(PNorm p, double alpha, double rho, const RsOrderParams& init,
                               const SaddleOptions& opts) {
    require_problem(alpha, rho, "solve_rs_saddle");
    if (std::isnan(init.self_overlap) || std::isnan(init.susceptibility) ||
        std::isnan(init.overlap) || std::isnan(init.self_overlap_hat) ||
        std::isnan(init.susceptibility_hat) || std::isnan(init.overlap_hat)) {
        throw InvalidArgument("solve_rs_saddle: NaN in initial order parameters");
    }
    const bool want_success = std::isinf(init.self_overlap_hat) || init.susceptibility == 0.0;

    if (want_success) {
        if (auto s = solve_successful(p, alpha, rho, init, opts)) return *s;
        if (auto s = solve_failure(p, alpha, rho, init, opts)) return *s;
    } else {
        if (auto s = solve_failure(p, alpha, rho, init, opts)) return *s;
        if (auto s = solve_successful(p, alpha, rho, init, opts)) return *s;
    }
    std::ostringstream msg;
    msg << "solve_rs_saddle: no stationary point found for p=" << to_string(p) << ", alpha=" << alpha
        << ", rho=" << rho;
    if (p == PNorm::L0 && alpha <= rho) {
        // The chi condition alpha chi_hat - K^2 E stays negative along the chi_hat
        // condition and only reaches zero as K -> 0, so no finite extremum exists.
        msg << " (the L0 objective has no finite stationary point for alpha <= rho;"
               " the failure branch degenerates to Q_hat -> 0)";
    }
    throw ConvergenceFailure(msg.str());
}

}  // namespace cslab::replica
