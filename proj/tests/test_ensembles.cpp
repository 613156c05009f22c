#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "cslab/ensembles.hpp"
#include "cslab/errors.hpp"
#include "cslab/numerics.hpp"
#include "cslab/rng.hpp"

using namespace cslab;

namespace {

// Kolmogorov-Smirnov distance of a sample from the standard normal law.
double ks_normal(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = 1.0 - numerics::q_function(xs[i]);
        d = std::max({d, std::abs(cdf - i / n), std::abs((i + 1) / n - cdf)});
    }
    return d;
}

}  // namespace

TEST_CASE("seed derivation is deterministic and key sensitive") {
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
    CHECK(label_key("signal") != label_key("matrix/iid_gaussian"));
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("generator output is uniform and normal") {
    Rng rng(7);
    std::vector<double> z(20000);
    double mean = 0.0, m2 = 0.0, u_mean = 0.0;
    for (auto& x : z) {
        x = rng.normal();
        mean += x;
        m2 += x * x;
        u_mean += rng.uniform();
    }
    mean /= z.size();
    m2 /= z.size();
    u_mean /= z.size();
    CHECK(std::abs(mean) < 4.0 / std::sqrt(20000.0));
    CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / 20000.0));
    CHECK(std::abs(u_mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / 20000.0));
    CHECK(ks_normal(z) < 1.63 / std::sqrt(20000.0));
    std::vector<int> counts(5, 0);
    for (int i = 0; i < 50000; ++i) ++counts[rng.below(5)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 400);
}

TEST_CASE("enum names round-trip") {
    for (auto e : {MatrixEnsemble::iid_gaussian, MatrixEnsemble::row_orthogonal}) {
        CHECK(parse_matrix_ensemble(to_string(e)) == e);
    }
    CHECK(parse_matrix_ensemble("orthogonal") == MatrixEnsemble::row_orthogonal);
    CHECK(parse_nonzero_law("pm1") == NonzeroLaw::plus_minus_one);
    CHECK(parse_support_mode("fixed") == SupportMode::fixed_count);
    CHECK_THROWS_AS(parse_matrix_ensemble("bogus"), InvalidArgument);
}

TEST_CASE("Gaussian matrix entries are N(0, 1/N)") {
    Rng rng(11);
    const int n = 100, p = 60;
    const auto F = sample_matrix(MatrixEnsemble::iid_gaussian, p, n, rng);
    REQUIRE(F.rows() == p);
    REQUIRE(F.cols() == n);
    std::vector<double> z(F.data(), F.data() + F.size());
    for (auto& x : z) x *= std::sqrt(static_cast<double>(n));
    CHECK(ks_normal(z) < 1.63 / std::sqrt(static_cast<double>(z.size())));
    // Column norms concentrate around sqrt(P / N).
    CHECK(F.squaredNorm() / n == doctest::Approx(static_cast<double>(p) / n).epsilon(0.05));
}

TEST_CASE("row-orthogonal matrices have orthonormal rows and Haar-like entries") {
    Rng rng(12);
    const int n = 50, p = 30;
    std::vector<double> z;
    for (int rep = 0; rep < 20; ++rep) {
        const auto F = sample_matrix(MatrixEnsemble::row_orthogonal, p, n, rng);
        CHECK((F * F.transpose() - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() < 1e-12);
        for (int i = 0; i < F.size(); ++i) z.push_back(F.data()[i] * std::sqrt(static_cast<double>(n)));
    }
    // Entries of a Haar row are close to N(0, 1/N) at this size; the first row
    // has no sign bias thanks to the sign correction.
    double mean = 0.0;
    for (double x : z) mean += x;
    mean /= z.size();
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(z.size())));
    CHECK(ks_normal(z) < 0.03);
    CHECK_THROWS_AS(sample_matrix(MatrixEnsemble::row_orthogonal, 6, 5, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_matrix(MatrixEnsemble::iid_gaussian, 0, 5, rng), InvalidArgument);
}

TEST_CASE("signal prior") {
    Rng rng(3);
    const int n = 20000;
    SignalPrior prior{0.3, NonzeroLaw::standard_gaussian, SupportMode::bernoulli};
    const auto x = sample_signal(n, prior, rng);
    std::vector<double> nz;
    for (int i = 0; i < n; ++i) if (x[i] != 0.0) nz.push_back(x[i]);
    const double frac = static_cast<double>(nz.size()) / n;
    CHECK(std::abs(frac - 0.3) < 4.0 * std::sqrt(0.3 * 0.7 / n));
    CHECK(ks_normal(nz) < 1.63 / std::sqrt(static_cast<double>(nz.size())));

    prior = {0.25, NonzeroLaw::plus_minus_one, SupportMode::fixed_count};
    const auto y = sample_signal(40, prior, rng);
    int k = 0;
    for (int i = 0; i < 40; ++i) {
        if (y[i] != 0.0) {
            ++k;
            CHECK(std::abs(y[i]) == 1.0);
        }
    }
    CHECK(k == 10);
    CHECK_THROWS_AS(sample_signal(10, {0.0, NonzeroLaw::standard_gaussian, SupportMode::bernoulli}, rng),
                    InvalidArgument);
}

TEST_CASE("instances are reproducible and share the signal across ensembles") {
    const SignalPrior prior{0.5, NonzeroLaw::standard_gaussian, SupportMode::bernoulli};
    const auto a = make_instance(MatrixEnsemble::iid_gaussian, 20, 12, prior, 99);
    const auto b = make_instance(MatrixEnsemble::iid_gaussian, 20, 12, prior, 99);
    const auto c = make_instance(MatrixEnsemble::row_orthogonal, 20, 12, prior, 99);
    CHECK(a.F == b.F);
    CHECK(a.x0 == b.x0);
    CHECK(a.x0 == c.x0);
    CHECK((a.F * a.x0 - a.y).cwiseAbs().maxCoeff() < 1e-14);
    const auto d = make_instance(MatrixEnsemble::iid_gaussian, 20, 12, prior, 100);
    CHECK(a.F != d.F);
}

TEST_CASE("instance dump round-trips exactly") {
    const SignalPrior prior{0.4, NonzeroLaw::plus_minus_one, SupportMode::fixed_count};
    const auto inst = make_instance(MatrixEnsemble::row_orthogonal, 9, 5, prior, 1234);
    std::stringstream ss;
    dump_instance(ss, inst, MatrixEnsemble::row_orthogonal, prior);
    const auto back = load_instance(ss);
    CHECK(back.instance.F == inst.F);
    CHECK(back.instance.x0 == inst.x0);
    CHECK(back.instance.y == inst.y);
    CHECK(back.instance.seed == 1234);
    CHECK(back.ensemble == MatrixEnsemble::row_orthogonal);
    CHECK(back.prior.nonzero_law == NonzeroLaw::plus_minus_one);
    CHECK(back.prior.support_mode == SupportMode::fixed_count);
    CHECK(back.prior.rho == 0.4);

    std::stringstream bad("n 3\np 2\nensemble nope\n");
    CHECK_THROWS_AS(load_instance(bad), ParseError);
}
