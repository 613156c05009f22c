#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "channel.hpp"
#include "cslab/errors.hpp"
#include "cslab/numerics.hpp"
#include "cslab/replica.hpp"

namespace cslab::replica {

using numerics::find_root;
using numerics::normal_pdf;
using numerics::q_function;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Search bracket for the conjugate susceptibility, in log space.
constexpr double kChiHatMin = 1e-8;
constexpr double kChiHatMax = 1e30;  // alpha_c -> 1 as rho -> 1 pushes chi_hat out like (1 - rho)^-2

void require_open_unit(double v, const char* what, const char* op) {
    if (!(v > 0.0 && v < 1.0)) {
        std::ostringstream msg;
        msg << op << ": " << what << " must lie in (0, 1), got " << v;
        throw InvalidArgument(msg.str());
    }
}

// Bracketed term of the L1 self-consistency equation for chi_hat:
// 2(1-rho)((chi_hat+1) Q(chi_hat^{-1/2}) - chi_hat^{1/2} phi(chi_hat^{-1/2})) + rho (chi_hat+1).
double l1_self_consistency_rhs(double chi_hat, double rho) {
    const double root = std::sqrt(chi_hat);
    const double t = 1.0 / root;
    return 2.0 * (1.0 - rho) * ((chi_hat + 1.0) * q_function(t) - root * normal_pdf(t)) +
           rho * (chi_hat + 1.0);
}

// Right-hand side of the stability condition alpha > 2(1-rho) Q(chi_hat^{-1/2}) + rho.
double l1_stability_rate(double chi_hat, double rho) {
    return 2.0 * (1.0 - rho) * q_function(1.0 / std::sqrt(chi_hat)) + rho;
}

}  // namespace

double predicted_mse(const RsOrderParams& params, double rho) {
    return params.self_overlap - 2.0 * params.overlap + rho;
}

RsOrderParams successful_params(double rho, double chi_hat) {
    RsOrderParams out;
    out.self_overlap = rho;
    out.overlap = rho;
    out.susceptibility = 0.0;
    out.self_overlap_hat = kInf;
    out.overlap_hat = kInf;
    out.susceptibility_hat = chi_hat;
    return out;
}

double solve_l1_chi_hat(double alpha, double rho) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw InvalidArgument("solve_l1_chi_hat: alpha must lie in (0, 1]");
    }
    require_open_unit(rho, "rho", "solve_l1_chi_hat");

    // residual(chi_hat) = alpha chi_hat - rhs(chi_hat) is concave in chi_hat
    // with slope alpha - (2(1-rho) Q + rho); the successful root is the one on
    // the rising side, left of the slope zero.
    auto residual = [&](double log_chi_hat) {
        const double ch = std::exp(log_chi_hat);
        return alpha * ch - l1_self_consistency_rhs(ch, rho);
    };
    if (alpha <= rho) {
        std::ostringstream msg;
        msg << "solve_l1_chi_hat: no successful solution for alpha=" << alpha << " <= rho=" << rho;
        throw NoSolution(msg.str());
    }

    double upper = std::log(kChiHatMax);
    const double target = (alpha - rho) / (2.0 * (1.0 - rho));  // Q(chi_hat^{-1/2}) at the peak
    if (target < 0.5) {
        // Q(t) = target  =>  peak at chi_hat = t^{-2}.
        const double t_peak = find_root([&](double t) { return q_function(t) - target; }, 0.0, 40.0,
                                        1e-15);
        if (t_peak > 0.0) upper = std::min(upper, -2.0 * std::log(t_peak));
    }
    const double lower = std::log(kChiHatMin);
    if (!(residual(upper) > 0.0)) {
        std::ostringstream msg;
        msg << "solve_l1_chi_hat: no positive root in [" << kChiHatMin << ", " << std::exp(upper)
            << "] for alpha=" << alpha << ", rho=" << rho << " (at or below the critical rate)";
        throw NoSolution(msg.str());
    }
    return std::exp(find_root(residual, lower, upper, 1e-15));
}

double critical_alpha(PNorm p, double rho) {
    require_open_unit(rho, "rho", "critical_alpha");
    switch (p) {
        case PNorm::L0: return rho;
        case PNorm::L2: return 1.0;
        case PNorm::L1: break;
    }
    // Substituting alpha = 2(1-rho) Q(t) + rho (t = chi_hat^{-1/2}) into the
    // self-consistency equation leaves 2(1-rho)(phi(t)/t - Q(t)) = rho.
    auto residual = [&](double log_chi_hat) {
        const double t = std::exp(-0.5 * log_chi_hat);
        return 2.0 * (1.0 - rho) * (normal_pdf(t) / t - q_function(t)) - rho;
    };
    const double lo = std::log(kChiHatMin), hi = std::log(kChiHatMax);
    double log_chi_hat;
    try {
        log_chi_hat = find_root(residual, lo, hi, 1e-14);
    } catch (const NoBracket& e) {
        std::ostringstream msg;
        msg << "critical_alpha: cannot bracket the critical point for rho=" << rho
            << " within chi_hat in [" << kChiHatMin << ", " << kChiHatMax << "]: residuals "
            << residual(lo) << ", " << residual(hi);
        throw ConvergenceFailure(msg.str());
    }
    return l1_stability_rate(std::exp(log_chi_hat), rho);
}

double critical_rho(PNorm p, double alpha) {
    require_open_unit(alpha, "alpha", "critical_rho");
    switch (p) {
        case PNorm::L0: return alpha;
        case PNorm::L2: {
            std::ostringstream msg;
            msg << "critical_rho: L2 reconstruction cannot succeed at alpha=" << alpha << " < 1";
            throw NoSolution(msg.str());
        }
        case PNorm::L1: break;
    }
    // alpha_c(rho) is increasing with alpha_c(rho) > rho, so the root lies in (0, alpha).
    auto residual = [&](double rho) { return critical_alpha(PNorm::L1, rho) - alpha; };
    constexpr double kRhoMin = 1e-9;
    if (residual(kRhoMin) > 0.0) {
        std::ostringstream msg;
        msg << "critical_rho: alpha=" << alpha << " lies below alpha_c at rho=" << kRhoMin;
        throw NoSolution(msg.str());
    }
    return find_root(residual, kRhoMin, alpha, 1e-14);
}

double worst_case_l1_alpha(double rho) {
    require_open_unit(rho, "rho", "worst_case_l1_alpha");
    constexpr double kCap = 10.0;
    const double margin = std::pow(2.0, 0.25) - 1.0;
    const double entropy = 2.0 * rho * std::log(1.0 / (2.0 * rho)) + 2.0 * rho;
    // First condition: entropy - (alpha/2)(margin - sqrt(2 rho/alpha))^2 < 0.
    // Second condition: margin > sqrt(2 rho / alpha), i.e. alpha > 2 rho / margin^2.
    auto first = [&](double alpha) {
        const double gap = margin - std::sqrt(2.0 * rho / alpha);
        return entropy - 0.5 * alpha * gap * gap;
    };
    const double alpha_min = 2.0 * rho / (margin * margin);
    if (alpha_min >= kCap || !(first(kCap) < 0.0)) {
        std::ostringstream msg;
        msg << "worst_case_l1_alpha: no alpha <= " << kCap << " satisfies the bound at rho=" << rho;
        throw NoSolution(msg.str());
    }
    // Along alpha > alpha_min the second term grows monotonically, so the
    // first condition switches sign exactly once.
    return find_root(first, alpha_min, kCap, 1e-14);
}

PhaseVerdict at_stability(PNorm p, double alpha, double rho, const RsOrderParams& params) {
    const double values[] = {params.self_overlap,     params.susceptibility,
                             params.overlap,          params.self_overlap_hat,
                             params.susceptibility_hat, params.overlap_hat};
    for (double v : values) {
        if (std::isnan(v)) throw InvalidArgument("at_stability: NaN order parameter");
    }
    PhaseVerdict verdict;
    if (p == PNorm::L0) {
        verdict.rs_stable = false;
        verdict.at_condition_lhs = kInf;
        verdict.note =
            "L0 minimizer is discontinuous at the hard threshold; the stability integral diverges";
        return verdict;
    }
    if (!std::isfinite(params.self_overlap) || !std::isfinite(params.overlap) ||
        !std::isfinite(params.susceptibility) || !std::isfinite(params.susceptibility_hat)) {
        throw InvalidArgument("at_stability: Q, chi, m and chi_hat must be finite");
    }
    const double k = params.self_overlap_hat;
    // alpha / (chi K)^2 with chi K -> alpha on the successful branch.
    double prefactor;
    if (std::isinf(k)) {
        if (params.susceptibility != 0.0) {
            throw InvalidArgument("at_stability: infinite Q_hat requires chi = 0");
        }
        prefactor = 1.0 / alpha;
    } else {
        if (!(k > 0.0) || !(params.susceptibility > 0.0)) {
            throw InvalidArgument("at_stability: finite branch requires chi > 0 and Q_hat > 0");
        }
        const double ck = params.susceptibility * k;
        prefactor = alpha / (ck * ck);
    }
    const double sigma0 = std::sqrt(params.susceptibility_hat);
    const double m_hat = params.overlap_hat;
    const double sigma1 =
        std::isinf(m_hat) ? kInf : std::sqrt(params.susceptibility_hat + m_hat * m_hat);

    verdict.at_condition_lhs = prefactor * ((1.0 - rho) * channel::at_scaled(p, sigma0, k) +
                                            rho * channel::at_scaled(p, sigma1, k));
    verdict.rs_stable = verdict.at_condition_lhs <= 1.0;
    if (std::abs(verdict.at_condition_lhs - 1.0) <= 1e-9) verdict.note = "marginal";
    return verdict;
}

std::string_view to_string(CurveMethod m) {
    return m == CurveMethod::replica ? "replica" : "worst_case";
}

ThresholdCurve threshold_curve(PNorm p, std::span<const double> rho_grid, CurveMethod method) {
    for (std::size_t i = 0; i < rho_grid.size(); ++i) {
        require_open_unit(rho_grid[i], "rho", "threshold_curve");
        if (i > 0 && !(rho_grid[i] > rho_grid[i - 1])) {
            throw InvalidArgument("threshold_curve: rho grid must be strictly increasing");
        }
    }
    if (method == CurveMethod::worst_case && p != PNorm::L1) {
        throw InvalidArgument("threshold_curve: the worst-case bound is defined for L1 only");
    }
    ThresholdCurve curve;
    curve.p = p;
    curve.method = method;
    for (double rho : rho_grid) {
        try {
            const double a = method == CurveMethod::replica ? critical_alpha(p, rho)
                                                            : worst_case_l1_alpha(rho);
            curve.points.push_back({rho, a});
        } catch (const NoSolution& e) {
            curve.gaps.push_back({rho, e.what()});
        } catch (const ConvergenceFailure& e) {
            curve.gaps.push_back({rho, e.what()});
        }
    }
    return curve;
}

}  // namespace cslab::replica
