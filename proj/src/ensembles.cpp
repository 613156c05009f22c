#include "cslab/ensembles.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cslab/errors.hpp"

namespace cslab {

std::string_view to_string(NonzeroLaw law) {
    return law == NonzeroLaw::standard_gaussian ? "standard_gaussian" : "plus_minus_one";
}

std::string_view to_string(SupportMode mode) {
    return mode == SupportMode::bernoulli ? "bernoulli" : "fixed_count";
}

std::string_view to_string(MatrixEnsemble ensemble) {
    return ensemble == MatrixEnsemble::iid_gaussian ? "iid_gaussian" : "row_orthogonal";
}

NonzeroLaw parse_nonzero_law(std::string_view text) {
    if (text == "standard_gaussian" || text == "gauss") return NonzeroLaw::standard_gaussian;
    if (text == "plus_minus_one" || text == "pm1") return NonzeroLaw::plus_minus_one;
    throw InvalidArgument("unknown nonzero law '" + std::string(text) + "' (expected gauss or pm1)");
}

SupportMode parse_support_mode(std::string_view text) {
    if (text == "bernoulli") return SupportMode::bernoulli;
    if (text == "fixed_count" || text == "fixed") return SupportMode::fixed_count;
    throw InvalidArgument("unknown support mode '" + std::string(text) +
                          "' (expected bernoulli or fixed)");
}

MatrixEnsemble parse_matrix_ensemble(std::string_view text) {
    if (text == "iid_gaussian" || text == "gaussian") return MatrixEnsemble::iid_gaussian;
    if (text == "row_orthogonal" || text == "orthogonal") return MatrixEnsemble::row_orthogonal;
    throw InvalidArgument("unknown matrix ensemble '" + std::string(text) +
                          "' (expected gaussian or orthogonal)");
}

namespace {

double draw_nonzero(NonzeroLaw law, Rng& rng) {
    if (law == NonzeroLaw::standard_gaussian) return rng.normal();
    return (rng() >> 63) ? 1.0 : -1.0;
}

constexpr std::uint64_t kSignalStream = label_key("signal");
// Each ensemble draws from its own matrix stream. Both ensembles have
// uniformly distributed row spaces, so sharing one Gaussian draw would make
// their basis-pursuit outcomes identical trial by trial.
constexpr std::uint64_t matrix_stream(MatrixEnsemble e) {
    return e == MatrixEnsemble::iid_gaussian ? label_key("matrix/iid_gaussian")
                                             : label_key("matrix/row_orthogonal");
}

}  // namespace

Eigen::VectorXd sample_signal(int n, const SignalPrior& prior, Rng& rng) {
    if (n < 1) throw InvalidArgument("sample_signal: n must be >= 1");
    if (!(prior.rho > 0.0 && prior.rho <= 1.0)) {
        std::ostringstream msg;
        msg << "sample_signal: rho must lie in (0, 1], got " << prior.rho;
        throw InvalidArgument(msg.str());
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (prior.support_mode == SupportMode::bernoulli) {
        for (int i = 0; i < n; ++i) {
            if (rng.uniform() < prior.rho) x[i] = draw_nonzero(prior.nonzero_law, rng);
        }
        return x;
    }
    // Partial Fisher-Yates: the first k slots form a uniform random k-subset.
    const int k = static_cast<int>(std::lround(prior.rho * n));
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[i], idx[j]);
    }
    for (int i = 0; i < k; ++i) x[idx[i]] = draw_nonzero(prior.nonzero_law, rng);
    return x;
}

Eigen::MatrixXd sample_matrix(MatrixEnsemble ensemble, int p_rows, int n, Rng& rng) {
    if (n < 1 || p_rows < 1) throw InvalidArgument("sample_matrix: dimensions must be >= 1");
    if (p_rows > n) {
        std::ostringstream msg;
        msg << "sample_matrix: p_rows=" << p_rows << " exceeds n=" << n;
        throw InvalidArgument(msg.str());
    }
    if (ensemble == MatrixEnsemble::iid_gaussian) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        Eigen::MatrixXd F(p_rows, n);
        for (int i = 0; i < p_rows; ++i) {
            for (int j = 0; j < n; ++j) F(i, j) = scale * rng.normal();
        }
        return F;
    }
    Eigen::MatrixXd G(n, p_rows);
    for (int j = 0; j < p_rows; ++j) {
        for (int i = 0; i < n; ++i) G(i, j) = rng.normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p_rows);
    const auto& R = qr.matrixQR();
    for (int j = 0; j < p_rows; ++j) {
        if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
    }
    return Q.transpose();
}

ProblemInstance make_instance(MatrixEnsemble ensemble, int n, int p_rows, const SignalPrior& prior,
                              std::uint64_t seed) {
    ProblemInstance inst;
    inst.seed = seed;
    Rng signal_rng(derive_seed(seed, {kSignalStream}));
    Rng matrix_rng(derive_seed(seed, {matrix_stream(ensemble)}));
    inst.x0 = sample_signal(n, prior, signal_rng);
    inst.F = sample_matrix(ensemble, p_rows, n, matrix_rng);
    inst.y = inst.F * inst.x0;
    return inst;
}

}  // namespace cslab
