#include "cslab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include "cslab/errors.hpp"
#include "cslab/numerics.hpp"
#include "cslab/replica.hpp"
#include "cslab/rng.hpp"

namespace cslab {

namespace {

double window_center(const SweepConfig& config) {
    return config.alpha_center > 0.0 ? config.alpha_center
                                     : replica::critical_alpha(replica::PNorm::L1, config.rho);
}

}  // namespace

std::vector<int> default_p_grid(int n, double alpha_center, double half_width) {
    if (n < 1) throw InvalidArgument("default_p_grid: n must be >= 1");
    if (!(half_width >= 0.0)) throw InvalidArgument("default_p_grid: half width must be >= 0");
    const double lo_alpha = alpha_center - half_width;
    const double hi_alpha = std::min(1.0, alpha_center + half_width);
    const int lo = std::max(1, static_cast<int>(std::ceil(lo_alpha * n - 1e-9)));
    const int hi = std::min(n, static_cast<int>(std::floor(hi_alpha * n + 1e-9)));
    std::vector<int> grid;
    for (int p = lo; p <= hi; ++p) grid.push_back(p);
    return grid;
}

void validate(const SweepConfig& config) {
    auto bad = [](const std::string& what) { throw InvalidArgument("sweep config: " + what); };
    if (!(config.rho > 0.0 && config.rho < 1.0)) bad("rho must lie in (0, 1)");
    if (config.n_values.empty()) bad("n_values is empty");
    for (std::size_t i = 0; i < config.n_values.size(); ++i) {
        if (config.n_values[i] < 1) bad("n_values must be positive");
        if (i > 0 && config.n_values[i] <= config.n_values[i - 1]) bad("n_values must be strictly increasing");
    }
    if (config.trials_per_point < 100) bad("trials_per_point must be >= 100 for crossing estimation");
    if (!(config.success_tol > 0.0)) bad("success_tol must be positive");
    if (!(config.alpha_half_width >= 0.0)) bad("alpha_half_width must be >= 0");
    for (const auto& [n, ps] : config.p_rows) {
        if (std::find(config.n_values.begin(), config.n_values.end(), n) == config.n_values.end()) {
            bad("p_rows given for N=" + std::to_string(n) + " which is not in n_values");
        }
        if (ps.empty()) bad("p_rows for N=" + std::to_string(n) + " is empty");
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (ps[i] < 1 || ps[i] > n) bad("p_rows must lie in [1, N] (N=" + std::to_string(n) + ")");
            if (i > 0 && ps[i] <= ps[i - 1]) bad("p_rows must be strictly increasing");
        }
    }
}

std::vector<std::pair<int, int>> sweep_points(const SweepConfig& config) {
    validate(config);
    std::vector<std::pair<int, int>> points;
    double center = -1.0;
    for (int n : config.n_values) {
        std::vector<int> ps;
        if (auto it = config.p_rows.find(n); it != config.p_rows.end()) {
            ps = it->second;
        } else {
            if (center < 0.0) center = window_center(config);
            ps = default_p_grid(n, center, config.alpha_half_width);
        }
        if (ps.empty()) throw InvalidArgument("sweep config: empty P grid at N=" + std::to_string(n));
        for (int p : ps) points.emplace_back(n, p);
    }
    return points;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CSLAB_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t trial_seed(std::uint64_t master_seed, int n, int p_rows, int trial_index) {
    return derive_seed(master_seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(p_rows),
                                     static_cast<std::uint64_t>(trial_index)});
}

TrialRecord run_trial(const SweepConfig& config, int n, int p_rows, int trial_index) {
    TrialRecord rec;
    rec.n = n;
    rec.p_rows = p_rows;
    rec.trial_index = trial_index;
    rec.seed = trial_seed(config.master_seed, n, p_rows, trial_index);
    const ProblemInstance inst = make_instance(config.ensemble, n, p_rows, config.prior(), rec.seed);
    const LpSolution sol = basis_pursuit(inst.F, inst.y);
    rec.status = sol.status;
    rec.objective = sol.objective;
    rec.residual = sol.residual;
    rec.success = sol.status == LpStatus::optimal &&
                  reconstruction_success(sol.x_hat, inst.x0, config.success_tol);
    return rec;
}

void run_trials_streaming(const SweepConfig& config, const std::set<TrialKey>& skip,
                          const std::function<void(const TrialRecord&)>& sink,
                          const ProgressFn& progress) {
    std::vector<TrialKey> keys;
    for (const auto& [n, p] : sweep_points(config)) {
        for (int t = 0; t < config.trials_per_point; ++t) {
            TrialKey k{n, p, t};
            if (!skip.contains(k)) keys.push_back(k);
        }
    }
    const std::size_t total = keys.size();
    auto compute = [&](std::size_t i) {
        const auto& [n, p, t] = keys[i];
        return run_trial(config, n, p, t);
    };

    const int workers = std::min<std::size_t>(resolve_workers(config.workers), std::max<std::size_t>(total, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < total; ++i) {
            sink(compute(i));
            if (progress) progress(i + 1, total);
        }
        return;
    }

    // Workers claim chunks of consecutive keys; the calling thread emits the
    // results strictly in key order as soon as the next one is ready.
    constexpr std::size_t kChunk = 64;
    std::vector<TrialRecord> results(total);
    std::vector<char> ready(total, 0);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex mu;
    std::condition_variable cv;
    std::exception_ptr failure;

    auto worker = [&] {
        try {
            while (!abort.load()) {
                const std::size_t begin = next.fetch_add(kChunk);
                if (begin >= total) break;
                const std::size_t end = std::min(total, begin + kChunk);
                for (std::size_t i = begin; i < end; ++i) results[i] = compute(i);
                {
                    std::lock_guard lock(mu);
                    std::fill(ready.begin() + begin, ready.begin() + end, 1);
                }
                cv.notify_all();
            }
        } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
            abort = true;
            cv.notify_all();
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);

    std::exception_ptr sink_failure;
    for (std::size_t i = 0; i < total; ++i) {
        {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return ready[i] || failure; });
            if (failure) break;
        }
        try {
            sink(results[i]);
        } catch (...) {
            sink_failure = std::current_exception();
            abort = true;
            break;
        }
        if (progress) progress(i + 1, total);
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    if (sink_failure) std::rethrow_exception(sink_failure);
}

std::vector<TrialRecord> run_trials(const SweepConfig& config, const ProgressFn& progress) {
    std::vector<TrialRecord> out;
    run_trials_streaming(config, {}, [&](const TrialRecord& r) { out.push_back(r); }, progress);
    return out;
}

std::vector<CrossingPoint> tabulate(std::span<const TrialRecord> records, int n) {
    std::map<int, CrossingPoint> by_p;
    for (const auto& r : records) {
        if (r.n != n) continue;
        auto& pt = by_p[r.p_rows];
        pt.p_rows = r.p_rows;
        ++pt.trials;
        if (r.success) ++pt.successes;
    }
    std::vector<CrossingPoint> out;
    for (const auto& [p, pt] : by_p) out.push_back(pt);
    return out;
}

CriticalPointEstimate estimate_from_points(std::vector<CrossingPoint> points, double rho, int n) {
    if (n < 1) throw InvalidArgument("estimate_critical_alpha: n must be >= 1");
    std::sort(points.begin(), points.end(),
              [](const CrossingPoint& a, const CrossingPoint& b) { return a.p_rows < b.p_rows; });
    for (const auto& pt : points) {
        if (pt.trials < 1 || pt.successes < 0 || pt.successes > pt.trials) {
            throw InvalidArgument("estimate_critical_alpha: inconsistent counts at P=" +
                                  std::to_string(pt.p_rows));
        }
    }
    auto prob = [](const CrossingPoint& pt) { return static_cast<double>(pt.successes) / pt.trials; };
    std::ostringstream why;
    why << "estimate_critical_alpha: success probability at N=" << n;
    if (points.size() < 2) {
        why << " needs at least two row counts, got " << points.size();
        throw NoBracket(why.str());
    }
    if (!(prob(points.front()) < 0.5) || !(prob(points.back()) > 0.5)) {
        why << " is not bracketed by the tested P (P=" << points.front().p_rows << ": "
            << prob(points.front()) << ", P=" << points.back().p_rows << ": " << prob(points.back())
            << ")";
        throw NoBracket(why.str());
    }
    std::size_t a = 0;
    while (a + 1 < points.size() && !(prob(points[a]) < 0.5 && prob(points[a + 1]) >= 0.5)) ++a;
    if (a + 1 >= points.size()) {
        why << " has no adjacent pair straddling 1/2";
        throw NoBracket(why.str());
    }
    const auto& lo = points[a];
    const auto& hi = points[a + 1];
    const double pa = prob(lo), pb = prob(hi);
    const double gap = hi.p_rows - lo.p_rows;
    const double span = pb - pa;
    CriticalPointEstimate est;
    est.rho = rho;
    est.n = n;
    est.alpha_c_n = (lo.p_rows + gap * (0.5 - pa) / span) / n;
    // d alpha / d pa = -gap (pb - 1/2) / (span^2 N), d alpha / d pb = -gap (1/2 - pa) / (span^2 N).
    const double va = pa * (1.0 - pa) / lo.trials;
    const double vb = pb * (1.0 - pb) / hi.trials;
    const double da = gap * (pb - 0.5) / (span * span * n);
    const double db = gap * (0.5 - pa) / (span * span * n);
    est.std_error = std::sqrt(da * da * va + db * db * vb);
    for (const auto& pt : points) est.trials_total += pt.trials;
    est.points = std::move(points);
    return est;
}

CriticalPointEstimate estimate_critical_alpha(std::span<const TrialRecord> records, double rho, int n) {
    return estimate_from_points(tabulate(records, n), rho, n);
}

std::vector<double> finite_size_fit(std::span<const CriticalPointEstimate> estimates) {
    std::set<int> distinct;
    std::vector<double> xs, ys;
    for (const auto& e : estimates) {
        if (e.n < 1) throw InvalidArgument("finite_size_fit: n must be positive");
        distinct.insert(e.n);
        xs.push_back(1.0 / e.n);
        ys.push_back(e.alpha_c_n);
    }
    if (distinct.size() < 4) {
        throw InvalidArgument("finite_size_fit: needs at least 4 distinct N, got " +
                              std::to_string(distinct.size()));
    }
    return numerics::fit_polynomial(xs, ys, 2);
}

double extrapolate_to_infinite_n(std::span<const CriticalPointEstimate> estimates) {
    return finite_size_fit(estimates)[0];
}

}  // namespace cslab
