#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>

#include <Eigen/Dense>

#include "cslab/rng.hpp"

namespace cslab {

enum class NonzeroLaw { standard_gaussian, plus_minus_one };
enum class SupportMode { bernoulli, fixed_count };
enum class MatrixEnsemble { iid_gaussian, row_orthogonal };

std::string_view to_string(NonzeroLaw law);
std::string_view to_string(SupportMode mode);
std::string_view to_string(MatrixEnsemble ensemble);

/// Accepts the canonical names above plus the short CLI spellings
/// ("gauss"/"pm1", "bernoulli"/"fixed", "gaussian"/"orthogonal").
NonzeroLaw parse_nonzero_law(std::string_view text);
SupportMode parse_support_mode(std::string_view text);
MatrixEnsemble parse_matrix_ensemble(std::string_view text);

/// Sparse prior: each entry is zero with probability 1 - rho, otherwise drawn
/// from a unit-second-moment law.
struct SignalPrior {
    double rho = 0.5;
    NonzeroLaw nonzero_law = NonzeroLaw::standard_gaussian;
    SupportMode support_mode = SupportMode::bernoulli;
};

struct ProblemInstance {
    Eigen::MatrixXd F;
    Eigen::VectorXd x0;
    Eigen::VectorXd y;  // F * x0 as computed at sampling time
    std::uint64_t seed = 0;
};

/// Throws InvalidArgument for n < 1 or rho outside (0, 1].
Eigen::VectorXd sample_signal(int n, const SignalPrior& prior, Rng& rng);

/// iid_gaussian: entries N(0, 1/n). row_orthogonal: the first p_rows rows of a
/// Haar-distributed n x n orthogonal matrix (QR of a Gaussian n x p_rows block
/// with the signs of R's diagonal folded into Q). Throws InvalidArgument if
/// p_rows > n or either dimension is < 1.
Eigen::MatrixXd sample_matrix(MatrixEnsemble ensemble, int p_rows, int n, Rng& rng);

/// Deterministic in all arguments. The signal and the matrix use separate
/// streams split from `seed` under fixed labels; the signal stream is shared
/// across ensembles, the matrix stream is per ensemble.
ProblemInstance make_instance(MatrixEnsemble ensemble, int n, int p_rows, const SignalPrior& prior,
                              std::uint64_t seed);

/// Columnar text dump: a `key value` header (n, p, ensemble, rho, law,
/// support, seed), then `F` followed by P rows, `x0` and `y` lines.
/// Doubles are written with 17 significant digits, so load(dump(x)) == x.
void dump_instance(std::ostream& out, const ProblemInstance& inst, MatrixEnsemble ensemble,
                   const SignalPrior& prior);

struct LoadedInstance {
    ProblemInstance instance;
    MatrixEnsemble ensemble = MatrixEnsemble::iid_gaussian;
    SignalPrior prior;
};

/// Throws ParseError with the offending line number.
LoadedInstance load_instance(std::istream& in);

}  // namespace cslab
