#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cslab/errors.hpp"
#include "cslab/experiment.hpp"
#include "cslab/plot.hpp"
#include "cslab/replica.hpp"

namespace cslab::cli {

namespace {

namespace fs = std::filesystem;
using replica::CurveMethod;
using replica::PNorm;

/// Raised for flag values CLI11 cannot validate on its own; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<PNorm> parse_norms(const std::string& text) {
    std::vector<PNorm> out;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ',');) {
        try {
            const PNorm p = replica::parse_pnorm(tok);
            if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
        } catch (const InvalidArgument& e) {
            throw UsageError(std::string("--p: ") + e.what());
        }
    }
    if (out.empty()) throw UsageError("--p: no norm given");
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    const auto bad = [&](const std::string& why) {
        throw UsageError("--rho-grid '" + text + "': " + why + " (expected start:stop:count)");
    };
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
    if (parts.size() != 3) bad("need three fields");
    double start = 0, stop = 0;
    long count = 0;
    try {
        std::size_t used = 0;
        start = std::stod(parts[0], &used);
        if (used != parts[0].size()) bad("bad start");
        stop = std::stod(parts[1], &used);
        if (used != parts[1].size()) bad("bad stop");
        count = std::stol(parts[2], &used);
        if (used != parts[2].size()) bad("bad count");
    } catch (const std::logic_error&) {
        bad("not a number");
    }
    if (count < 1) bad("count must be >= 1");
    if (count > 1 && !(stop > start)) bad("stop must exceed start");
    if (!(start > 0.0 && start < 1.0) || !(stop > 0.0 && stop < 1.0)) bad("values must lie in (0, 1)");
    std::vector<double> grid;
    for (long i = 0; i < count; ++i) {
        grid.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(i) / (count - 1));
    }
    return grid;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text) || !f.flush()) throw Error("cannot write '" + path + "'");
}

// ---------------------------------------------------------------------------

struct TheoryArgs {
    std::string norms = "1";
    double rho = 0.0;
    std::string grid;
    bool worst_case = false;
    std::string out_path;
    std::string format;
};

int cmd_theory(const TheoryArgs& a, bool have_rho, std::ostream& out, std::ostream& err) {
    const auto norms = parse_norms(a.norms);
    const bool has_l1 = std::find(norms.begin(), norms.end(), PNorm::L1) != norms.end();
    if (a.worst_case && !has_l1) throw UsageError("--worst-case applies to the L1 norm; include 1 in --p");
    if (have_rho == !a.grid.empty()) throw UsageError("give exactly one of --rho or --rho-grid");
    std::string format = a.format;
    if (format.empty()) {
        format = fs::path(a.out_path).extension() == ".svg" ? "svg" : "csv";
    }
    if (format == "svg" && a.out_path.empty()) throw UsageError("--format svg needs --out");

    std::vector<plot::TheoryRow> rows;
    if (have_rho) {
        if (!(a.rho > 0.0 && a.rho < 1.0)) throw UsageError("--rho must lie in (0, 1)");
        int status = 0;
        for (PNorm p : norms) {
            try {
                const double ac = replica::critical_alpha(p, a.rho);
                out << "p=" << replica::to_string(p) << " rho=" << real(a.rho) << " alpha_c=" << real(ac) << '\n';
                rows.push_back({p, CurveMethod::replica, a.rho, ac});
            } catch (const NoSolution& e) {
                err << "error: " << e.what() << '\n';
                status = 1;
            } catch (const ConvergenceFailure& e) {
                err << "error: " << e.what() << '\n';
                status = 1;
            }
        }
        if (a.worst_case) {
            try {
                const double wc = replica::worst_case_l1_alpha(a.rho);
                out << "p=1 rho=" << real(a.rho) << " worst_case_alpha=" << real(wc) << '\n';
                rows.push_back({PNorm::L1, CurveMethod::worst_case, a.rho, wc});
            } catch (const NoSolution& e) {
                err << "error: " << e.what() << '\n';
                status = 1;
            }
        }
        if (!a.out_path.empty()) {
            std::ostringstream csv;
            if (format == "svg") {
                throw UsageError("--format svg needs a curve (--rho-grid)");
            }
            plot::write_theory_csv(csv, rows);
            write_file(a.out_path, csv.str());
        }
        return status;
    }

    const auto grid = parse_grid(a.grid);
    std::size_t gaps = 0;
    for (PNorm p : norms) {
        const auto curve = replica::threshold_curve(p, grid, CurveMethod::replica);
        gaps += curve.gaps.size();
        for (const auto& g : curve.gaps) err << "gap: p=" << replica::to_string(p) << " rho=" << real(g.rho) << ": " << g.reason << '\n';
        const auto r = plot::curve_rows(curve);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    if (a.worst_case) {
        const auto curve = replica::threshold_curve(PNorm::L1, grid, CurveMethod::worst_case);
        gaps += curve.gaps.size();
        const auto r = plot::curve_rows(curve);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    if (a.out_path.empty()) {
        plot::write_theory_csv(out, rows);
        return 0;
    }
    if (format == "svg") {
        write_file(a.out_path, plot::render_svg(plot::figure_2a(rows)));
    } else {
        std::ostringstream csv;
        plot::write_theory_csv(csv, rows);
        write_file(a.out_path, csv.str());
    }
    out << "rows=" << rows.size() << " gaps=" << gaps << " out=" << a.out_path << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
    double rho = 0.5;
    std::string n_list = "10,12,...,30";
    int trials = 10000;
    std::string ensemble = "gaussian";
    std::string prior = "gauss";
    std::string support = "bernoulli";
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    bool resume = false;
    int workers = 0;
    std::string config_path;
    double success_tol = 1e-4;
    double half_width = 0.15;
    bool quiet = false;
};

int cmd_experiment(const ExperimentArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err) {
    SweepConfig cfg;
    if (!a.config_path.empty()) {
        std::ifstream in(a.config_path);
        if (!in) throw Error("cannot open config '" + a.config_path + "'");
        cfg = parse_sweep_config(in, a.config_path);
    }
    // Flags given on the command line override the config file.
    const auto given = [&](const char* name) { return a.config_path.empty() || sub.count(name) > 0; };
    try {
        if (given("--rho")) cfg.rho = a.rho;
        if (given("--n-list")) cfg.n_values = parse_int_list(a.n_list);
        if (given("--trials")) cfg.trials_per_point = a.trials;
        if (given("--ensemble")) cfg.ensemble = parse_matrix_ensemble(a.ensemble);
        if (given("--prior")) cfg.nonzero_law = parse_nonzero_law(a.prior);
        if (given("--support")) cfg.support_mode = parse_support_mode(a.support);
        if (given("--seed")) cfg.master_seed = a.seed;
        if (given("--workers")) cfg.workers = a.workers;
        if (given("--success-tol")) cfg.success_tol = a.success_tol;
        if (given("--half-width")) cfg.alpha_half_width = a.half_width;
        validate(cfg);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }

    fs::create_directories(a.out_dir);
    const std::string trials_path = (fs::path(a.out_dir) / "trials.csv").string();
    const std::string estimates_path = (fs::path(a.out_dir) / "estimates.csv").string();
    {
        std::ostringstream resolved;
        write_sweep_config(resolved, cfg);
        write_file((fs::path(a.out_dir) / "sweep.cfg").string(), resolved.str());
    }

    std::size_t last_decile = 0;
    const ProgressFn progress = [&](std::size_t done, std::size_t total) {
        if (a.quiet || total == 0) return;
        const std::size_t decile = done * 10 / total;
        if (decile != last_decile) {
            last_decile = decile;
            err << "progress " << decile * 10 << "%\n";
        }
    };
    const auto records = run_trials_to_file(cfg, trials_path, a.resume, progress);

    std::vector<CriticalPointEstimate> estimates;
    for (int n : cfg.n_values) {
        try {
            const auto e = estimate_critical_alpha(records, cfg.rho, n);
            out << "n=" << n << " alpha_c_n=" << real(e.alpha_c_n) << " stderr=" << real(e.std_error)
                << " trials=" << e.trials_total << '\n';
            estimates.push_back(e);
        } catch (const NoBracket& e) {
            err << "warning: " << e.what() << '\n';
        }
    }
    save_estimates(estimates_path, estimates);
    out << "trials_csv=" << trials_path << '\n' << "estimates_csv=" << estimates_path << '\n';
    if (estimates.size() < 4) {
        err << "error: only " << estimates.size() << " signal lengths produced an estimate; need 4 to extrapolate\n";
        return 1;
    }
    const auto coeffs = finite_size_fit(estimates);
    out << "intercept=" << real(coeffs[0]) << " c1=" << real(coeffs[1]) << " c2=" << real(coeffs[2]) << '\n';
    try {
        out << "theory_alpha_c=" << real(replica::critical_alpha(PNorm::L1, cfg.rho)) << '\n';
    } catch (const Error&) {
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct PlotArgs {
    std::string figure;
    std::vector<std::string> inputs;
    std::vector<std::string> labels;
    std::string out_path;
};

int cmd_plot(const PlotArgs& a, std::ostream& out) {
    if (!a.labels.empty() && a.labels.size() != a.inputs.size()) {
        throw UsageError("--label must be given once per --input");
    }
    auto open = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot open '" + path + "'");
        return in;
    };
    plot::PlotSpec spec;
    if (a.figure == "2a") {
        std::vector<plot::TheoryRow> rows;
        for (const auto& path : a.inputs) {
            auto in = open(path);
            const auto r = plot::read_theory_csv(in, path);
            rows.insert(rows.end(), r.begin(), r.end());
        }
        spec = plot::figure_2a(rows);
    } else {
        std::vector<plot::EstimateSet> sets;
        for (std::size_t i = 0; i < a.inputs.size(); ++i) {
            auto in = open(a.inputs[i]);
            plot::EstimateSet set;
            set.label = a.labels.empty() ? fs::path(a.inputs[i]).parent_path().filename().string() : a.labels[i];
            set.estimates = read_estimates_csv(in, a.inputs[i]);
            if (set.estimates.empty()) throw ParseError(a.inputs[i] + ": no data rows");
            sets.push_back(std::move(set));
        }
        spec = plot::figure_2b(sets);
    }
    write_file(a.out_path, plot::render_svg(spec));
    out << "out=" << a.out_path << '\n';
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compressed-sensing phase transition laboratory: replica thresholds, basis-pursuit "
                 "experiments and figures.",
                 "cslab"};
    app.require_subcommand(1);

    TheoryArgs ta;
    auto* theory = app.add_subcommand("theory", "Typical reconstruction limit alpha_c(rho) for L0/L1/L2");
    theory->add_option("--p", ta.norms, "Norm(s): 0, 1, 2 or a comma list such as 0,1,2")->capture_default_str();
    auto* rho_opt = theory->add_option("--rho", ta.rho, "Single density in (0, 1); prints key=value lines");
    auto* grid_opt = theory->add_option("--rho-grid", ta.grid, "Density grid start:stop:count");
    rho_opt->excludes(grid_opt);
    theory->add_flag("--worst-case", ta.worst_case, "Also evaluate the asymptotic worst-case L1 bound");
    theory->add_option("--out", ta.out_path, "Output file (CSV or SVG)");
    theory->add_option("--format", ta.format, "Output format; defaults from the --out extension")
        ->check(CLI::IsMember({"csv", "svg"}));

    ExperimentArgs ea;
    auto* experiment = app.add_subcommand("experiment", "Monte Carlo basis-pursuit sweep and 1/N extrapolation");
    experiment->add_option("--rho", ea.rho, "Signal density in (0, 1)")->capture_default_str();
    experiment->add_option("--n-list", ea.n_list, "Signal lengths, e.g. 10,12,...,30")->capture_default_str();
    experiment->add_option("--trials", ea.trials, "Trials per (N, P) point (>= 100)")->capture_default_str();
    experiment->add_option("--ensemble", ea.ensemble, "Matrix ensemble")
        ->check(CLI::IsMember({"gaussian", "orthogonal"}))
        ->capture_default_str();
    experiment->add_option("--prior", ea.prior, "Law of the non-zero entries")
        ->check(CLI::IsMember({"gauss", "pm1"}))
        ->capture_default_str();
    experiment->add_option("--support", ea.support, "Support sampling")
        ->check(CLI::IsMember({"bernoulli", "fixed"}))
        ->capture_default_str();
    experiment->add_option("--seed", ea.seed, "Master seed")->capture_default_str();
    experiment->add_option("--out-dir", ea.out_dir, "Directory for trials.csv, estimates.csv, sweep.cfg")
        ->capture_default_str();
    experiment->add_flag("--resume", ea.resume, "Keep trials already in out-dir/trials.csv and run the rest");
    experiment->add_option("--workers", ea.workers, "Worker threads (default: CSLAB_WORKERS or all cores)");
    experiment->add_option("--config", ea.config_path, "key = value sweep config; flags override it")
        ->check(CLI::ExistingFile);
    experiment->add_option("--success-tol", ea.success_tol, "Relative L2 error counted as success")
        ->capture_default_str();
    experiment->add_option("--half-width", ea.half_width, "Half width of the alpha window around the theory value")
        ->capture_default_str();
    experiment->add_flag("--quiet", ea.quiet, "No progress lines on standard error");

    PlotArgs pa;
    auto* plot_cmd = app.add_subcommand("plot", "Render the threshold curves (2a) or the 1/N extrapolation (2b) as SVG");
    plot_cmd->add_option("--figure", pa.figure, "2a or 2b")->required()->check(CLI::IsMember({"2a", "2b"}));
    plot_cmd->add_option("--input,-i", pa.inputs, "Theory CSV(s) for 2a, estimates CSV(s) for 2b")->required();
    plot_cmd->add_option("--label", pa.labels, "Legend label per 2b input (default: parent directory name)");
    plot_cmd->add_option("--out", pa.out_path, "Output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (theory->parsed()) return cmd_theory(ta, rho_opt->count() > 0, out, err);
        if (experiment->parsed()) return cmd_experiment(ea, *experiment, out, err);
        return cmd_plot(pa, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace cslab::cli
