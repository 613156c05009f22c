#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cslab::replica {

/// Reconstruction norm: L0 counts non-zeros, L1 sums magnitudes, L2 sums squares.
enum class PNorm { L0, L1, L2 };

std::string_view to_string(PNorm p);
/// Parses "0", "1", "2" or "L0", "L1", "L2".
PNorm parse_pnorm(std::string_view text);

/// Replica-symmetric order parameters in the zero-temperature scaling.
///
/// On the successful branch the conjugates `self_overlap_hat` and
/// `overlap_hat` are +infinity and `susceptibility` is 0; their product
/// susceptibility * self_overlap_hat is then understood as its limit alpha.
struct RsOrderParams {
    double self_overlap = 0.0;         // Q = |x|^2 / N
    double susceptibility = 0.0;       // chi, scaled difference of self and mutual overlap
    double overlap = 0.0;              // m = x0 . x / N
    double self_overlap_hat = 0.0;     // conjugate of Q
    double susceptibility_hat = 0.0;   // conjugate of chi
    double overlap_hat = 0.0;          // conjugate of m
};

/// Per-element mean square error Q - 2m + rho.
double predicted_mse(const RsOrderParams& params, double rho);

// ---------------------------------------------------------------------------
// Scalar channel: minimizer and minimum of (Q_hat/2) x^2 - h x + |x|^p.

/// Minimizer: hard threshold at sqrt(2 Q_hat) for L0, soft threshold at 1 for
/// L1, linear shrinkage h / (Q_hat + 2) for L2. Throws InvalidArgument if Q_hat <= 0.
double x_star(PNorm p, double h, double q_hat);

/// Minimum value of the scalar objective. Throws InvalidArgument if Q_hat <= 0.
double phi_p(PNorm p, double h, double q_hat);

/// Location of the discontinuity (L0) or kink (L1) of x_star in h; 0 for L2.
double threshold_field(PNorm p, double q_hat);

// ---------------------------------------------------------------------------
// L1 successful solution and critical rates.

/// Conjugate susceptibility of the L1 successful solution: the smallest
/// positive root of the self-consistency equation at (alpha, rho).
/// Throws NoSolution when alpha is at or below the critical rate.
double solve_l1_chi_hat(double alpha, double rho);

/// Typical reconstruction limit alpha_c(rho): rho for L0, 1 for L2 and the
/// root of the successful-solution stability condition for L1.
double critical_alpha(PNorm p, double rho);

/// Inverse of critical_alpha along rho. Throws NoSolution for L2 (no rho < 1 works below alpha = 1).
double critical_rho(PNorm p, double alpha);

/// Asymptotic worst-case sufficient bound on alpha for L1 recovery at
/// density rho. Searches alpha up to 10 and throws NoSolution beyond.
double worst_case_l1_alpha(double rho);

// ---------------------------------------------------------------------------
// Free energy, saddle point and stability.

/// The replica-symmetric objective (before extremization) evaluated at
/// `params`. Requires finite params with susceptibility > 0 and self_overlap_hat > 0.
double rs_free_energy(PNorm p, double alpha, double rho, const RsOrderParams& params);

/// Closed-form partial derivatives of rs_free_energy with respect to
/// (Q, chi, m, Q_hat, chi_hat, m_hat), in that order.
std::array<double, 6> rs_gradient(PNorm p, double alpha, double rho, const RsOrderParams& params);

/// rs_free_energy after eliminating Q_hat = m_hat = alpha / chi (the exact
/// stationarity conditions in Q and m, after which Q and m drop out).
/// Well defined for chi >= 0; chi = 0 is the successful-branch limit.
double reduced_free_energy(PNorm p, double alpha, double rho, double chi, double chi_hat);

enum class SaddleBranch { successful, failure };

struct SaddleOptions {
    double tolerance = 1e-10;  // max-norm of the stationarity residual
    int max_iterations = 200;
};

struct SaddleSolution {
    RsOrderParams params;
    SaddleBranch branch = SaddleBranch::failure;
    /// Stationarity residuals in the order of rs_gradient. On the successful
    /// branch the chi component is the rescaled residual of the limit equation.
    std::array<double, 6> residuals{};
    int iterations = 0;
};

/// Solves the six stationarity conditions. `init` selects the branch: an
/// infinite self_overlap_hat (or zero susceptibility) asks for the successful
/// branch, anything else for the finite failure branch; the other branch is
/// tried if the requested one does not exist. Throws ConvergenceFailure if
/// neither branch can be solved to `opts.tolerance`.
SaddleSolution solve_rs_saddle(PNorm p, double alpha, double rho, const RsOrderParams& init,
                               const SaddleOptions& opts = {});

/// Order parameters of the successful solution Q = m = rho in the limit
/// representation, with the given conjugate susceptibility.
RsOrderParams successful_params(double rho, double chi_hat);

struct PhaseVerdict {
    bool rs_stable = false;
    double at_condition_lhs = 0.0;
    std::string note;
};

/// Local stability of the RS saddle against replica-symmetry breaking.
/// L0 is reported unstable outright: its discontinuous minimizer makes the
/// stability integral divergent.
PhaseVerdict at_stability(PNorm p, double alpha, double rho, const RsOrderParams& params);

// ---------------------------------------------------------------------------

enum class CurveMethod { replica, worst_case };

std::string_view to_string(CurveMethod m);

struct CurvePoint {
    double rho;
    double alpha_c;
};

struct CurveGap {
    double rho;
    std::string reason;
};

struct ThresholdCurve {
    PNorm p = PNorm::L1;
    CurveMethod method = CurveMethod::replica;
    std::vector<CurvePoint> points;
    std::vector<CurveGap> gaps;
};

/// Evaluates the threshold over a sorted grid of densities in (0, 1).
/// Points where the method has no solution are recorded as gaps.
ThresholdCurve threshold_curve(PNorm p, std::span<const double> rho_grid, CurveMethod method);

}  // namespace cslab::replica
