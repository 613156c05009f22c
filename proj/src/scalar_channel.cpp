#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "channel.hpp"
#include "cslab/errors.hpp"
#include "cslab/numerics.hpp"
#include "cslab/replica.hpp"

namespace cslab::replica {

using numerics::kInvSqrt2Pi;
using numerics::normal_central_mass;
using numerics::normal_pdf;
using numerics::q_function;

std::string_view to_string(PNorm p) {
    switch (p) {
        case PNorm::L0: return "0";
        case PNorm::L1: return "1";
        case PNorm::L2: return "2";
    }
    return "?";
}

PNorm parse_pnorm(std::string_view text) {
    if (text == "0" || text == "L0" || text == "l0") return PNorm::L0;
    if (text == "1" || text == "L1" || text == "l1") return PNorm::L1;
    if (text == "2" || text == "L2" || text == "l2") return PNorm::L2;
    throw InvalidArgument("unknown norm '" + std::string(text) + "' (expected 0, 1 or 2)");
}

namespace {
void require_positive_curvature(double q_hat) {
    if (!(q_hat > 0.0)) {
        std::ostringstream msg;
        msg << "scalar channel requires Q_hat > 0, got " << q_hat;
        throw InvalidArgument(msg.str());
    }
}
}  // namespace

double threshold_field(PNorm p, double q_hat) {
    require_positive_curvature(q_hat);
    switch (p) {
        case PNorm::L0: return std::sqrt(2.0 * q_hat);
        case PNorm::L1: return 1.0;
        case PNorm::L2: return 0.0;
    }
    return 0.0;
}

double x_star(PNorm p, double h, double q_hat) {
    require_positive_curvature(q_hat);
    switch (p) {
        case PNorm::L0: return std::abs(h) > std::sqrt(2.0 * q_hat) ? h / q_hat : 0.0;
        case PNorm::L1:
            if (std::abs(h) <= 1.0) return 0.0;
            return (h > 0.0 ? h - 1.0 : h + 1.0) / q_hat;
        case PNorm::L2: return h / (q_hat + 2.0);
    }
    return 0.0;
}

double phi_p(PNorm p, double h, double q_hat) {
    require_positive_curvature(q_hat);
    switch (p) {
        case PNorm::L0:
            return std::abs(h) > std::sqrt(2.0 * q_hat) ? 1.0 - h * h / (2.0 * q_hat) : 0.0;
        case PNorm::L1: {
            const double excess = std::abs(h) - 1.0;
            return excess > 0.0 ? -excess * excess / (2.0 * q_hat) : 0.0;
        }
        case PNorm::L2: return -h * h / (2.0 * (q_hat + 2.0));
    }
    return 0.0;
}

namespace channel {

constexpr double kInf = std::numeric_limits<double>::infinity();

double central_defect(double t) {
    const double a = std::abs(t);
    double value;
    if (a < 0.5) {
        // phi(0) * sum_{k>=1} (-1)^{k+1} 2k t^{2k+1} / ((2k+1) 2^k k!)
        const double t2 = a * a;
        double term = 1.0;  // t^{2k} / (2^k k!) built up incrementally
        double sum = 0.0;
        for (int k = 1; k < 30; ++k) {
            term *= t2 / (2.0 * k);
            const double piece = term * 2.0 * k / (2.0 * k + 1.0);
            sum += (k % 2 == 1) ? piece : -piece;
            if (piece < 1e-18 * std::abs(sum)) break;
        }
        value = kInvSqrt2Pi * a * sum;
    } else {
        value = normal_central_mass(a) - a * normal_pdf(a);
    }
    return t < 0.0 ? -value : value;
}

double central_mass_ratio(double t) {
    if (t == 0.0) return kInvSqrt2Pi;
    return normal_central_mass(t) / t;
}

double soft_threshold_energy(double sigma) {
    if (sigma <= 0.0) return 0.0;
    if (std::isinf(sigma)) return kInf;
    const double t = 1.0 / sigma;
    return 2.0 * ((sigma * sigma + 1.0) * q_function(t) - sigma * normal_pdf(t));
}

namespace {
// 2 (t phi(t) + Q(t)) = E[z^2 ; |z| > t].
double tail_second_moment(double t) {
    if (std::isinf(t)) return 0.0;
    if (t < 1.0) return 1.0 - 2.0 * central_defect(t);
    return 2.0 * (t * normal_pdf(t) + q_function(t));
}

double l0_ratio(double sigma, double k) {
    if (sigma <= 0.0) return kInf;
    return std::sqrt(2.0 * k) / sigma;
}
}  // namespace

double activity(PNorm p, double sigma, double k) {
    switch (p) {
        case PNorm::L0: return tail_second_moment(l0_ratio(sigma, k));
        case PNorm::L1: return sigma <= 0.0 ? 0.0 : 2.0 * q_function(1.0 / sigma);
        case PNorm::L2: return std::isinf(k) ? 1.0 : k / (k + 2.0);
    }
    return 0.0;
}

double second_moment(PNorm p, double sigma, double k) {
    switch (p) {
        case PNorm::L0: return sigma * sigma / (k * k) * activity(p, sigma, k);
        case PNorm::L1: return soft_threshold_energy(sigma) / (k * k);
        case PNorm::L2: return sigma * sigma / ((k + 2.0) * (k + 2.0));
    }
    return 0.0;
}

double mean_potential(PNorm p, double sigma, double k) {
    switch (p) {
        case PNorm::L0: {
            const double t = l0_ratio(sigma, k);
            if (std::isinf(t)) return 0.0;
            return -sigma * sigma * tail_second_moment(t) / (2.0 * k) + 2.0 * q_function(t);
        }
        case PNorm::L1: return -soft_threshold_energy(sigma) / (2.0 * k);
        case PNorm::L2: return -sigma * sigma / (2.0 * (k + 2.0));
    }
    return 0.0;
}

double at_scaled(PNorm p, double sigma, double k) {
    switch (p) {
        case PNorm::L0: return kInf;
        case PNorm::L1:
            if (std::isinf(sigma)) return 1.0;
            return sigma <= 0.0 ? 0.0 : 2.0 * q_function(1.0 / sigma);
        case PNorm::L2: return std::isinf(k) ? 1.0 : (k / (k + 2.0)) * (k / (k + 2.0));
    }
    return 0.0;
}

double noise_error_scaled(PNorm p, double chi_hat, double k) {
    const double sigma = std::sqrt(chi_hat);
    switch (p) {
        case PNorm::L0:
            if (std::isinf(k)) return 0.0;
            return chi_hat * tail_second_moment(l0_ratio(sigma, k));
        case PNorm::L1: return soft_threshold_energy(sigma);
        case PNorm::L2: {
            if (std::isinf(k)) return chi_hat;
            const double r = k / (k + 2.0);
            return chi_hat * r * r;
        }
    }
    return 0.0;
}

double truth_error_scaled(PNorm p, double chi_hat, double k) {
    switch (p) {
        case PNorm::L0: {
            if (std::isinf(k)) return kInf;
            const double sigma1 = std::sqrt(chi_hat + k * k);
            const double t = l0_ratio(sigma1, k);
            return chi_hat * tail_second_moment(t) + 2.0 * k * k * central_defect(t);
        }
        case PNorm::L1: {
            if (std::isinf(k)) return chi_hat + 1.0;
            const double t = 1.0 / std::sqrt(chi_hat + k * k);
            const double defect_ratio = (t == 0.0) ? 0.0 : central_defect(t) / (t * t);
            return 2.0 * (chi_hat + 1.0) * q_function(t) - 2.0 * chi_hat * normal_central_mass(t) +
                   2.0 * defect_ratio;
        }
        case PNorm::L2: {
            if (std::isinf(k)) return chi_hat + 4.0;
            const double r = k / (k + 2.0);
            return (chi_hat + 4.0) * r * r;
        }
    }
    return 0.0;
}

double reduced_truth_term(PNorm p, double chi_hat, double k) {
    switch (p) {
        case PNorm::L0: {
            if (std::isinf(k)) return 1.0;
            const double sigma1 = std::sqrt(chi_hat + k * k);
            const double t = l0_ratio(sigma1, k);
            return k * central_defect(t) - chi_hat * tail_second_moment(t) / (2.0 * k) +
                   2.0 * q_function(t);
        }
        case PNorm::L1: {
            if (std::isinf(k)) return 2.0 * kInvSqrt2Pi;
            const double w = std::sqrt(1.0 + chi_hat / (k * k));
            const double t = 1.0 / std::sqrt(chi_hat + k * k);
            return -(chi_hat + 1.0) / (2.0 * k) +
                   w * ((1.0 + t * t) * central_mass_ratio(t) + normal_pdf(t));
        }
        case PNorm::L2:
            if (std::isinf(k)) return 1.0;
            return (2.0 * k - chi_hat) / (2.0 * (k + 2.0));
    }
    return 0.0;
}

}  // namespace channel
}  // namespace cslab::replica
