#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "cslab/errors.hpp"
#include "cslab/experiment.hpp"
#include "cslab/lp.hpp"
#include "cslab/numerics.hpp"
#include "cslab/replica.hpp"

namespace py = pybind11;
using namespace cslab;

namespace {

replica::PNorm norm_arg(int p) { return replica::parse_pnorm(std::to_string(p)); }

py::dict solution_dict(const LpSolution& s) {
    py::dict d;
    d["x_hat"] = s.x_hat;
    d["objective"] = s.objective;
    d["status"] = std::string(to_string(s.status));
    d["iterations"] = s.iterations;
    d["residual"] = s.residual;
    d["duals"] = s.duals;
    return d;
}

}  // namespace

PYBIND11_MODULE(_cslab, m) {
    m.doc() = "Replica thresholds and basis-pursuit experiments for Lp compressed sensing";

    auto base = py::register_exception<Error>(m, "CslabError", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<NoBracket>(m, "NoBracket", base.ptr());
    py::register_exception<NonFinite>(m, "NonFinite", base.ptr());
    py::register_exception<RankDeficient>(m, "RankDeficient", base.ptr());
    py::register_exception<NoSolution>(m, "NoSolution", base.ptr());
    py::register_exception<ConvergenceFailure>(m, "ConvergenceFailure", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());

    m.def("q_function", &numerics::q_function, py::arg("x"), "Upper Gaussian tail probability");
    m.def("normal_pdf", &numerics::normal_pdf, py::arg("x"));

    // Norms are passed as the integers 0, 1, 2.
    m.def("x_star", [](int p, double h, double q_hat) { return replica::x_star(norm_arg(p), h, q_hat); },
          py::arg("p"), py::arg("h"), py::arg("q_hat"));
    m.def("phi_p", [](int p, double h, double q_hat) { return replica::phi_p(norm_arg(p), h, q_hat); },
          py::arg("p"), py::arg("h"), py::arg("q_hat"));
    m.def("critical_alpha", [](int p, double rho) { return replica::critical_alpha(norm_arg(p), rho); },
          py::arg("p"), py::arg("rho"));
    m.def("critical_rho", [](int p, double alpha) { return replica::critical_rho(norm_arg(p), alpha); },
          py::arg("p"), py::arg("alpha"));
    m.def("solve_l1_chi_hat", &replica::solve_l1_chi_hat, py::arg("alpha"), py::arg("rho"));
    m.def("worst_case_l1_alpha", &replica::worst_case_l1_alpha, py::arg("rho"));

    py::class_<replica::RsOrderParams>(m, "RsOrderParams")
        .def(py::init<>())
        .def(py::init([](double Q, double chi, double mm, double Qh, double chih, double mh) {
                 return replica::RsOrderParams{Q, chi, mm, Qh, chih, mh};
             }),
             py::arg("self_overlap"), py::arg("susceptibility"), py::arg("overlap"),
             py::arg("self_overlap_hat"), py::arg("susceptibility_hat"), py::arg("overlap_hat"))
        .def_readwrite("self_overlap", &replica::RsOrderParams::self_overlap)
        .def_readwrite("susceptibility", &replica::RsOrderParams::susceptibility)
        .def_readwrite("overlap", &replica::RsOrderParams::overlap)
        .def_readwrite("self_overlap_hat", &replica::RsOrderParams::self_overlap_hat)
        .def_readwrite("susceptibility_hat", &replica::RsOrderParams::susceptibility_hat)
        .def_readwrite("overlap_hat", &replica::RsOrderParams::overlap_hat)
        .def("__repr__", [](const replica::RsOrderParams& o) {
            return "RsOrderParams(Q=" + std::to_string(o.self_overlap) + ", chi=" + std::to_string(o.susceptibility) +
                   ", m=" + std::to_string(o.overlap) + ")";
        });

    m.def("predicted_mse", &replica::predicted_mse, py::arg("params"), py::arg("rho"));
    m.def("successful_params", &replica::successful_params, py::arg("rho"), py::arg("chi_hat"));
    m.def(
        "solve_rs_saddle",
        [](int p, double alpha, double rho, const replica::RsOrderParams& init) {
            const auto s = replica::solve_rs_saddle(norm_arg(p), alpha, rho, init);
            py::dict d;
            d["params"] = s.params;
            d["branch"] = s.branch == replica::SaddleBranch::successful ? "successful" : "failure";
            d["residuals"] = s.residuals;
            d["iterations"] = s.iterations;
            return d;
        },
        py::arg("p"), py::arg("alpha"), py::arg("rho"), py::arg("init"),
        "Stationary point of the RS free energy; `init` selects the branch");
    m.def(
        "at_stability",
        [](int p, double alpha, double rho, const replica::RsOrderParams& params) {
            const auto v = replica::at_stability(norm_arg(p), alpha, rho, params);
            return py::make_tuple(v.rs_stable, v.at_condition_lhs, v.note);
        },
        py::arg("p"), py::arg("alpha"), py::arg("rho"), py::arg("params"));
    m.def(
        "threshold_curve",
        [](int p, const std::vector<double>& grid, const std::string& method) {
            const auto c = replica::threshold_curve(
                norm_arg(p), grid, method == "worst_case" ? replica::CurveMethod::worst_case
                                                          : replica::CurveMethod::replica);
            std::vector<std::pair<double, double>> points;
            for (const auto& pt : c.points) points.emplace_back(pt.rho, pt.alpha_c);
            std::vector<double> gaps;
            for (const auto& g : c.gaps) gaps.push_back(g.rho);
            return py::make_tuple(points, gaps);
        },
        py::arg("p"), py::arg("rho_grid"), py::arg("method") = "replica",
        "Returns ([(rho, alpha_c), ...], [gap rho, ...])");

    m.def(
        "make_instance",
        [](const std::string& ensemble, int n, int p_rows, double rho, const std::string& law,
           const std::string& support, std::uint64_t seed) {
            const SignalPrior prior{rho, parse_nonzero_law(law), parse_support_mode(support)};
            const auto inst = make_instance(parse_matrix_ensemble(ensemble), n, p_rows, prior, seed);
            return py::make_tuple(inst.F, inst.x0, inst.y);
        },
        py::arg("ensemble"), py::arg("n"), py::arg("p_rows"), py::arg("rho"), py::arg("law") = "gauss",
        py::arg("support") = "bernoulli", py::arg("seed") = 0, "Returns (F, x0, y)");
    m.def(
        "basis_pursuit",
        [](const Eigen::MatrixXd& F, const Eigen::VectorXd& y) { return solution_dict(basis_pursuit(F, y)); },
        py::arg("F"), py::arg("y"), "min |x|_1 subject to F x = y");
    m.def(
        "brute_force_l1_min",
        [](const Eigen::MatrixXd& F, const Eigen::VectorXd& y) { return solution_dict(brute_force_l1_min(F, y)); },
        py::arg("F"), py::arg("y"));
    m.def("reconstruction_success", &reconstruction_success, py::arg("x_hat"), py::arg("x0"),
          py::arg("tol") = 1e-4);

    m.def(
        "run_sweep",
        [](double rho, const std::vector<int>& n_values, int trials, const std::string& ensemble,
           std::uint64_t seed, int workers) {
            SweepConfig cfg;
            cfg.rho = rho;
            cfg.n_values = n_values;
            cfg.trials_per_point = trials;
            cfg.ensemble = parse_matrix_ensemble(ensemble);
            cfg.master_seed = seed;
            cfg.workers = workers;
            std::vector<TrialRecord> records;
            {
                py::gil_scoped_release release;
                records = run_trials(cfg);
            }
            py::list out;
            for (int n : n_values) {
                const auto e = estimate_critical_alpha(records, rho, n);
                py::dict d;
                d["n"] = e.n;
                d["alpha_c_n"] = e.alpha_c_n;
                d["stderr"] = e.std_error;
                d["trials"] = e.trials_total;
                out.append(d);
            }
            return out;
        },
        py::arg("rho"), py::arg("n_values"), py::arg("trials"), py::arg("ensemble") = "gaussian",
        py::arg("seed") = 0, py::arg("workers") = 0,
        "Monte Carlo sweep; one crossing estimate per signal length");
    m.def(
        "extrapolate",
        [](const std::vector<std::pair<int, double>>& points) {
            std::vector<CriticalPointEstimate> est;
            for (const auto& [n, a] : points) {
                CriticalPointEstimate e;
                e.n = n;
                e.alpha_c_n = a;
                est.push_back(e);
            }
            return finite_size_fit(est);
        },
        py::arg("points"), "Quadratic fit in 1/N to [(N, alpha_c_n), ...]; returns [c0, c1, c2]");
}
