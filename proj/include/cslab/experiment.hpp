#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cslab/ensembles.hpp"
#include "cslab/lp.hpp"

namespace cslab {

/// One Monte Carlo sweep at fixed density over several signal lengths.
struct SweepConfig {
    double rho = 0.5;
    std::vector<int> n_values;
    /// Row counts per signal length. Lengths without an entry use the default
    /// window of all integer P with P/N in
    /// [alpha_center - alpha_half_width, min(1, alpha_center + alpha_half_width)].
    std::map<int, std::vector<int>> p_rows;
    int trials_per_point = 10000;
    MatrixEnsemble ensemble = MatrixEnsemble::iid_gaussian;
    NonzeroLaw nonzero_law = NonzeroLaw::standard_gaussian;
    SupportMode support_mode = SupportMode::bernoulli;
    std::uint64_t master_seed = 0;
    double success_tol = 1e-4;
    double alpha_center = 0.0;  // <= 0 selects the L1 theoretical threshold at rho
    double alpha_half_width = 0.15;
    int workers = 0;            // <= 0: CSLAB_WORKERS, else the hardware concurrency

    [[nodiscard]] SignalPrior prior() const { return {rho, nonzero_law, support_mode}; }
};

/// Throws InvalidArgument on an unusable configuration (rho outside (0, 1),
/// no lengths, P outside [1, N], fewer than 100 trials per point, ...).
void validate(const SweepConfig& config);

/// All integer P with P/N inside the window, ascending.
std::vector<int> default_p_grid(int n, double alpha_center, double half_width);

/// The (n, p_rows) pairs of the sweep in key order.
std::vector<std::pair<int, int>> sweep_points(const SweepConfig& config);

/// Resolved worker count: explicit value, then CSLAB_WORKERS, then the
/// hardware concurrency (at least 1).
int resolve_workers(int requested);

struct TrialRecord {
    int n = 0;
    int p_rows = 0;
    int trial_index = 0;
    std::uint64_t seed = 0;
    bool success = false;
    double objective = 0.0;
    double residual = 0.0;
    LpStatus status = LpStatus::optimal;

    [[nodiscard]] std::tuple<int, int, int> key() const { return {n, p_rows, trial_index}; }
    bool operator==(const TrialRecord&) const = default;
};

using TrialKey = std::tuple<int, int, int>;

/// Per-trial seed, a pure function of its arguments.
std::uint64_t trial_seed(std::uint64_t master_seed, int n, int p_rows, int trial_index);

/// Samples the instance for one trial, solves it and applies the success test.
TrialRecord run_trial(const SweepConfig& config, int n, int p_rows, int trial_index);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every trial of the sweep on a worker pool and returns the records in
/// key order. The result does not depend on the worker count.
std::vector<TrialRecord> run_trials(const SweepConfig& config, const ProgressFn& progress = {});

/// Runs the trials whose keys are not in `skip` and hands each record to
/// `sink` in key order, from the calling thread.
void run_trials_streaming(const SweepConfig& config, const std::set<TrialKey>& skip,
                          const std::function<void(const TrialRecord&)>& sink,
                          const ProgressFn& progress = {});

struct CrossingPoint {
    int p_rows = 0;
    int successes = 0;
    int trials = 0;
};

struct CriticalPointEstimate {
    double rho = 0.0;
    int n = 0;
    double alpha_c_n = 0.0;
    double std_error = 0.0;  // standard error of alpha_c_n
    int trials_total = 0;
    std::vector<CrossingPoint> points;  // ascending P
};

/// Success counts per P at length n.
std::vector<CrossingPoint> tabulate(std::span<const TrialRecord> records, int n);

/// 50% crossing of the success probability, interpolated linearly in
/// alpha = P/N between the lowest adjacent pair of tested P straddling 1/2.
/// The standard error propagates the binomial errors of the two points.
/// Throws NoBracket when no pair straddles 1/2 or the smallest P already
/// succeeds half the time or more / the largest P does not.
CriticalPointEstimate estimate_critical_alpha(std::span<const TrialRecord> records, double rho, int n);
CriticalPointEstimate estimate_from_points(std::vector<CrossingPoint> points, double rho, int n);

/// Least-squares fit alpha_c(N) = c0 + c1/N + c2/N^2; returns {c0, c1, c2}.
/// Requires at least four distinct N (InvalidArgument), propagates RankDeficient.
std::vector<double> finite_size_fit(std::span<const CriticalPointEstimate> estimates);

/// The intercept c0 of finite_size_fit.
double extrapolate_to_infinite_n(std::span<const CriticalPointEstimate> estimates);

// ---------------------------------------------------------------------------
// Persistence. Both tables are UTF-8 CSV with LF line endings; reals use 17
// significant digits so that load followed by save reproduces the bytes.

inline constexpr std::string_view kTrialsHeader =
    "n,p_rows,trial_index,seed,success,objective,residual,status";
inline constexpr std::string_view kEstimatesHeader = "rho,n,alpha_c_n,stderr,trials_total";

std::string format_trial_row(const TrialRecord& r);
std::string format_estimate_row(const CriticalPointEstimate& e);

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records);
void write_estimates_csv(std::ostream& out, std::span<const CriticalPointEstimate> estimates);

/// Throw ParseError naming the line and field at fault. `source` labels messages.
std::vector<TrialRecord> read_trials_csv(std::istream& in, std::string_view source = "trials");
std::vector<CriticalPointEstimate> read_estimates_csv(std::istream& in,
                                                      std::string_view source = "estimates");

void save_trials(const std::string& path, std::span<const TrialRecord> records);
std::vector<TrialRecord> load_trials(const std::string& path);
void save_estimates(const std::string& path, std::span<const CriticalPointEstimate> estimates);
std::vector<CriticalPointEstimate> load_estimates(const std::string& path);

/// Runs the sweep into a trials CSV at `path`. With `resume`, an existing file
/// is cut back to its last complete line and the trials it already holds are
/// skipped; otherwise the file is overwritten. Returns all records in the file.
std::vector<TrialRecord> run_trials_to_file(const SweepConfig& config, const std::string& path,
                                            bool resume, const ProgressFn& progress = {});

// ---------------------------------------------------------------------------
// Configuration files: one `key = value` per line, `#` starts a comment.
// Keys: rho, n_values, trials_per_point, ensemble, nonzero_law, support_mode,
// master_seed, success_tol, alpha_center, alpha_half_width, workers, and
// p_rows.<N> for explicit row counts at length N.

/// Parses "10,12,...,30" style lists: "a,b,...,c" expands the progression
/// with step b - a up to c. Throws ParseError.
std::vector<int> parse_int_list(std::string_view text);

SweepConfig parse_sweep_config(std::istream& in, std::string_view source = "config");
void write_sweep_config(std::ostream& out, const SweepConfig& config);

}  // namespace cslab
