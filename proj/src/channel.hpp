#pragma once

// Gaussian averages of the scalar channel, in closed form.
//
// For a field h = sigma * z with z ~ N(0, 1) and curvature K = Q_hat:
//   activity       K * <z x*(sigma z)> / sigma   (fraction of "active" fields for L0/L1)
//   second_moment  <x*(sigma z)^2>
//   mean_potential <phi_p(sigma z; K)>
//   at_scaled      K^2 <(dx*/dh)^2>
// The *_scaled helpers take K = +inf as the successful-branch limit.

#include "cslab/replica.hpp"

namespace cslab::replica::channel {

/// Phi_0(t) - t phi(t), where Phi_0 is the normal mass on [0, t].
double central_defect(double t);

/// Phi_0(t) / t, continuous at t = 0.
double central_mass_ratio(double t);

/// E[(|sigma z| - 1)_+^2].
double soft_threshold_energy(double sigma);

double activity(PNorm p, double sigma, double k);
double second_moment(PNorm p, double sigma, double k);
double mean_potential(PNorm p, double sigma, double k);
double at_scaled(PNorm p, double sigma, double k);

/// K^2 <x*(sqrt(chi_hat) z)^2>: the zero-signal part of K^2 * MSE.
double noise_error_scaled(PNorm p, double chi_hat, double k);

/// K^2 (<x*^2> - 2 <x0 x*> + 1) for the signal part, with field variance chi_hat + K^2.
double truth_error_scaled(PNorm p, double chi_hat, double k);

/// K/2 + <phi_p(sigma1 z; K)> with sigma1^2 = chi_hat + K^2, evaluated without
/// the cancellation between the two large terms.
double reduced_truth_term(PNorm p, double chi_hat, double k);

}  // namespace cslab::replica::channel
