#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace cslab {

enum class LpStatus { optimal, infeasible, iteration_limit, degenerate };

std::string_view to_string(LpStatus status);
/// Inverse of to_string; throws ParseError on unknown names.
LpStatus parse_lp_status(std::string_view text);

struct LpOptions {
    double feasibility_tol = 1e-9;  // on ||F x - y||_inf for the optimal status
    double optimality_tol = 1e-9;   // reduced costs must be >= -optimality_tol
    double pivot_tol = 1e-11;       // smallest admissible pivot element
    int max_iterations = 0;         // 0 selects 50 * (N + P)
    int refactor_interval = 32;     // pivots between fresh LU refactorizations
    int degenerate_streak = 40;     // consecutive degenerate pivots before Bland's rule
    int bland_budget = 0;           // pivots allowed under Bland's rule; 0 selects 10 * (N + P)
};

struct LpSolution {
    Eigen::VectorXd x_hat;
    double objective = 0.0;  // sum |x_hat_i|
    LpStatus status = LpStatus::infeasible;
    int iterations = 0;      // simplex pivots over both phases
    double residual = 0.0;   // ||F x_hat - y||_inf
    /// Equality-constraint multipliers of the final basis. At an optimum they
    /// certify it: ||F^T duals||_inf <= 1 and y^T duals == objective.
    Eigen::VectorXd duals;
};

/// min ||x||_1 subject to F x = y via the split x = u - v, u, v >= 0, solved by
/// a dense two-phase revised simplex. Requires F.rows() <= F.cols() and
/// y.size() == F.rows() (InvalidArgument otherwise). Solver trouble is
/// reported through `status`, not by exception.
LpSolution basis_pursuit(const Eigen::MatrixXd& F, const Eigen::VectorXd& y, const LpOptions& opts = {});

/// Exhaustive search over column subsets of size <= P with full column rank
/// that solve F_S x_S = y exactly (least-squares residual <= 1e-10 relative).
/// Ties keep the first subset in (size, lexicographic) order. Status is
/// infeasible when no subset fits. Requires N <= 14.
LpSolution brute_force_l1_min(const Eigen::MatrixXd& F, const Eigen::VectorXd& y);

/// ||x_hat - x0||_2 / max(1, ||x0||_2) <= tol.
bool reconstruction_success(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x0, double tol = 1e-4);

}  // namespace cslab
