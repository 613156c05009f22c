#include "cslab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cslab/errors.hpp"

// Basis pursuit as the standard-form LP
//   min 1^T (u + v)   s.t.   D F u - D F v = D y,  u, v >= 0,
// where D = diag(sign y) makes the right-hand side nonnegative so that the
// phase-1 artificial basis is feasible. Variables are indexed u_0..u_{N-1},
// v_0..v_{N-1}, then the P artificials. Once an artificial leaves the basis it
// is never priced again; an artificial still basic after phase 1 marks a
// redundant row and stays pinned at zero.

namespace cslab {

std::string_view to_string(LpStatus status) {
    switch (status) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::iteration_limit: return "iteration_limit";
        case LpStatus::degenerate: return "degenerate";
    }
    return "?";
}

LpStatus parse_lp_status(std::string_view text) {
    for (LpStatus s : {LpStatus::optimal, LpStatus::infeasible, LpStatus::iteration_limit,
                       LpStatus::degenerate}) {
        if (text == to_string(s)) return s;
    }
    throw ParseError("unknown solver status '" + std::string(text) + "'");
}

namespace {

constexpr double kDegenerateStep = 1e-12;

class RevisedSimplex {
public:
    RevisedSimplex(const Eigen::MatrixXd& F, const Eigen::VectorXd& y, const LpOptions& opts)
        : opts_(opts), p_(static_cast<int>(F.rows())), n_(static_cast<int>(F.cols())) {
        sign_ = y.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
        df_ = sign_.asDiagonal() * F;
        b_ = sign_.cwiseProduct(y);
        basis_.resize(p_);
        position_.assign(2 * n_ + p_, -1);
        for (int i = 0; i < p_; ++i) {
            basis_[i] = 2 * n_ + i;
            position_[2 * n_ + i] = i;
        }
        binv_ = Eigen::MatrixXd::Identity(p_, p_);
        xb_ = b_;
        cap_ = opts.max_iterations > 0 ? opts.max_iterations : 50 * (n_ + p_);
        bland_cap_ = opts.bland_budget > 0 ? opts.bland_budget : 10 * (n_ + p_);
        w_.resize(p_);
        pi_.resize(p_);
        g_.resize(n_);
    }

    LpSolution solve() {
        LpSolution out;
        LpStatus status = run_phase(1);
        if (status == LpStatus::optimal) {
            refactor();
            double infeasibility = 0.0;
            for (int i = 0; i < p_; ++i) {
                if (is_artificial(basis_[i])) infeasibility += std::abs(xb_[i]);
            }
            if (infeasibility > opts_.feasibility_tol * std::max(1.0, b_.lpNorm<Eigen::Infinity>())) {
                status = LpStatus::infeasible;
            } else {
                drive_out_artificials();
                status = run_phase(2);
            }
        }
        refactor();
        out.status = status;
        out.iterations = iterations_;
        out.x_hat = Eigen::VectorXd::Zero(n_);
        for (int i = 0; i < p_; ++i) {
            const int j = basis_[i];
            if (j < n_) {
                out.x_hat[j] += xb_[i];
            } else if (j < 2 * n_) {
                out.x_hat[j - n_] -= xb_[i];
            }
        }
        out.objective = out.x_hat.lpNorm<1>();
        out.residual = (sign_.asDiagonal() * (df_ * out.x_hat - b_)).lpNorm<Eigen::Infinity>();
        // Duals from B^T pi = c_B with the phase-2 costs, mapped back to the unflipped rows.
        Eigen::VectorXd cb(p_);
        for (int i = 0; i < p_; ++i) cb[i] = is_artificial(basis_[i]) ? 0.0 : 1.0;
        out.duals = sign_.cwiseProduct(binv_.transpose() * cb);
        if (out.status == LpStatus::optimal && !(out.residual <= opts_.feasibility_tol)) {
            out.status = LpStatus::infeasible;
        }
        return out;
    }

private:
    [[nodiscard]] bool is_artificial(int j) const { return j >= 2 * n_; }

    void column(int j, Eigen::VectorXd& out) const {
        if (j < n_) {
            out = df_.col(j);
        } else if (j < 2 * n_) {
            out = -df_.col(j - n_);
        } else {
            out.setZero(p_);
            out[j - 2 * n_] = 1.0;
        }
    }

    void refactor() {
        Eigen::MatrixXd B(p_, p_);
        Eigen::VectorXd col(p_);
        for (int i = 0; i < p_; ++i) {
            column(basis_[i], col);
            B.col(i) = col;
        }
        lu_.compute(B);
        binv_ = lu_.inverse();
        xb_ = lu_.solve(b_);
        since_refactor_ = 0;
    }

    void pivot(int r, int entering, double theta) {
        xb_.noalias() -= theta * w_;
        xb_[r] = theta;
        const double wr = w_[r];
        row_ = binv_.row(r) / wr;
        w_[r] = 0.0;
        binv_.noalias() -= w_ * row_;
        binv_.row(r) = row_;
        position_[basis_[r]] = -1;
        basis_[r] = entering;
        position_[entering] = r;
        ++iterations_;
        if (++since_refactor_ >= opts_.refactor_interval) refactor();
    }

    // Bring structural columns into rows still held by zero-level artificials.
    void drive_out_artificials() {
        for (int r = 0; r < p_; ++r) {
            if (!is_artificial(basis_[r])) continue;
            const Eigen::RowVectorXd row = binv_.row(r) * df_;
            int best = -1;
            double best_abs = 1e-9;
            for (int j = 0; j < n_; ++j) {
                if (position_[j] >= 0 || position_[j + n_] >= 0) continue;
                if (std::abs(row[j]) > best_abs) {
                    best_abs = std::abs(row[j]);
                    best = j;
                }
            }
            if (best < 0) continue;  // redundant row
            const int entering = row[best] > 0.0 ? best : best + n_;
            column(entering, col_);
            w_.noalias() = binv_ * col_;
            pivot(r, entering, xb_[r] / w_[r]);
        }
    }

    LpStatus run_phase(int phase) {
        bool bland = false;
        int streak = 0, bland_pivots = 0;
        Eigen::VectorXd cb(p_);
        while (true) {
            if (iterations_ >= cap_) return LpStatus::iteration_limit;
            for (int i = 0; i < p_; ++i) {
                const bool art = is_artificial(basis_[i]);
                cb[i] = phase == 1 ? (art ? 1.0 : 0.0) : (art ? 0.0 : 1.0);
            }
            if (phase == 1 && cb.sum() == 0.0) return LpStatus::optimal;
            pi_.noalias() = binv_.transpose() * cb;
            g_.noalias() = df_.transpose() * pi_;
            const double c = phase == 1 ? 0.0 : 1.0;

            // Dantzig pricing, or the lowest-index improving column under Bland's rule.
            int entering = -1;
            double best = -opts_.optimality_tol;
            for (int j = 0; j < 2 * n_; ++j) {
                if (position_[j] >= 0) continue;
                const double d = j < n_ ? c - g_[j] : c + g_[j - n_];
                if (d < best) {
                    entering = j;
                    if (bland) break;
                    best = d;
                }
            }
            if (entering < 0) return LpStatus::optimal;

            column(entering, col_);
            w_.noalias() = binv_ * col_;
            const int r = bland ? ratio_test_bland() : ratio_test_harris();
            if (r < 0) return LpStatus::degenerate;  // unbounded ray: numerically broken basis
            const double theta = std::max(xb_[r], 0.0) / w_[r];
            pivot(r, entering, theta);

            if (theta <= kDegenerateStep) {
                if (++streak > opts_.degenerate_streak) bland = true;
            } else {
                streak = 0;
            }
            if (bland && ++bland_pivots > bland_cap_) return LpStatus::degenerate;
        }
    }

    int ratio_test_harris() const {
        double bound = std::numeric_limits<double>::infinity();
        for (int i = 0; i < p_; ++i) {
            if (w_[i] > opts_.pivot_tol) {
                bound = std::min(bound, (std::max(xb_[i], 0.0) + opts_.feasibility_tol) / w_[i]);
            }
        }
        int r = -1;
        double largest = 0.0;
        for (int i = 0; i < p_; ++i) {
            if (w_[i] > opts_.pivot_tol && std::max(xb_[i], 0.0) / w_[i] <= bound && w_[i] > largest) {
                largest = w_[i];
                r = i;
            }
        }
        return r;
    }

    int ratio_test_bland() const {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < p_; ++i) {
            if (w_[i] > opts_.pivot_tol) best = std::min(best, std::max(xb_[i], 0.0) / w_[i]);
        }
        int r = -1;
        for (int i = 0; i < p_; ++i) {
            if (w_[i] > opts_.pivot_tol && std::max(xb_[i], 0.0) / w_[i] <= best + kDegenerateStep &&
                (r < 0 || basis_[i] < basis_[r])) {
                r = i;
            }
        }
        return r;
    }

    LpOptions opts_;
    int p_, n_;
    int cap_ = 0, bland_cap_ = 0;
    int iterations_ = 0, since_refactor_ = 0;
    Eigen::VectorXd sign_, b_, xb_, w_, pi_, g_, col_;
    Eigen::RowVectorXd row_;
    Eigen::MatrixXd df_, binv_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    std::vector<int> basis_, position_;
};

void require_shapes(const Eigen::MatrixXd& F, const Eigen::VectorXd& y, const char* op) {
    if (F.rows() < 1 || F.cols() < 1) throw InvalidArgument(std::string(op) + ": empty matrix");
    if (F.rows() > F.cols()) throw InvalidArgument(std::string(op) + ": requires P <= N");
    if (y.size() != F.rows()) throw InvalidArgument(std::string(op) + ": y length must equal P");
    if (!F.allFinite() || !y.allFinite()) throw InvalidArgument(std::string(op) + ": non-finite input");
}

}  // namespace

LpSolution basis_pursuit(const Eigen::MatrixXd& F, const Eigen::VectorXd& y, const LpOptions& opts) {
    require_shapes(F, y, "basis_pursuit");
    RevisedSimplex simplex(F, y, opts);
    return simplex.solve();
}

LpSolution brute_force_l1_min(const Eigen::MatrixXd& F, const Eigen::VectorXd& y) {
    require_shapes(F, y, "brute_force_l1_min");
    const int p = static_cast<int>(F.rows()), n = static_cast<int>(F.cols());
    if (n > 14) throw InvalidArgument("brute_force_l1_min: N must be <= 14");
    const double scale = std::max(1.0, y.norm());

    LpSolution best;
    best.status = LpStatus::infeasible;
    best.objective = std::numeric_limits<double>::infinity();
    best.x_hat = Eigen::VectorXd::Zero(n);
    if (y.norm() <= 1e-10) {
        best.status = LpStatus::optimal;
        best.objective = 0.0;
        best.residual = y.lpNorm<Eigen::Infinity>();
        return best;
    }

    std::vector<int> subset;
    for (int k = 1; k <= p; ++k) {
        // Lexicographic k-subsets of {0..n-1}.
        subset.resize(k);
        for (int i = 0; i < k; ++i) subset[i] = i;
        while (true) {
            Eigen::MatrixXd fs(p, k);
            for (int i = 0; i < k; ++i) fs.col(i) = F.col(subset[i]);
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(fs);
            qr.setThreshold(1e-10);
            if (qr.rank() == k) {
                const Eigen::VectorXd xs = qr.solve(y);
                if ((fs * xs - y).norm() <= 1e-10 * scale) {
                    const double obj = xs.lpNorm<1>();
                    if (obj < best.objective - 1e-12 * std::max(1.0, obj)) {
                        best.objective = obj;
                        best.x_hat.setZero();
                        for (int i = 0; i < k; ++i) best.x_hat[subset[i]] = xs[i];
                        best.status = LpStatus::optimal;
                    }
                }
            }
            ++best.iterations;
            int i = k - 1;
            while (i >= 0 && subset[i] == n - k + i) --i;
            if (i < 0) break;
            ++subset[i];
            for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
        }
    }
    if (best.status == LpStatus::optimal) {
        best.objective = best.x_hat.lpNorm<1>();
        best.residual = (F * best.x_hat - y).lpNorm<Eigen::Infinity>();
    } else {
        best.objective = 0.0;
    }
    return best;
}

bool reconstruction_success(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x0, double tol) {
    if (x_hat.size() != x0.size()) throw InvalidArgument("reconstruction_success: length mismatch");
    if (!(tol > 0.0)) throw InvalidArgument("reconstruction_success: tol must be positive");
    return (x_hat - x0).norm() / std::max(1.0, x0.norm()) <= tol;
}

}  // namespace cslab
