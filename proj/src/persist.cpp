#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cslab/errors.hpp"
#include "cslab/experiment.hpp"

namespace cslab {

namespace {

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

class FieldParser {
public:
    FieldParser(std::string_view source, int line) : source_(source), line_(line) {}

    [[noreturn]] void fail(std::string_view field, const std::string& what) const {
        std::ostringstream msg;
        msg << source_ << ": line " << line_;
        if (!field.empty()) msg << ", field '" << field << "'";
        msg << ": " << what;
        throw ParseError(msg.str());
    }

    template <class Int>
    Int integer(std::string_view field, std::string_view text) const {
        Int v{};
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
            fail(field, "expected an integer, got '" + std::string(text) + "'");
        }
        return v;
    }

    double real(std::string_view field, std::string_view text) const {
        const std::string buf(text);
        char* end = nullptr;
        const double v = std::strtod(buf.c_str(), &end);
        if (buf.empty() || end != buf.c_str() + buf.size() ||
            std::isspace(static_cast<unsigned char>(buf.front()))) {
            fail(field, "expected a real number, got '" + buf + "'");
        }
        return v;
    }

private:
    std::string_view source_;
    int line_;
};

template <class Row, class ParseRow>
std::vector<Row> read_csv(std::istream& in, std::string_view source, std::string_view header,
                          std::size_t fields, ParseRow parse_row) {
    std::string line;
    if (!std::getline(in, line)) FieldParser(source, 1).fail({}, "empty input, expected header");
    if (line != header) {
        FieldParser(source, 1).fail({}, "header mismatch: expected '" + std::string(header) + "', got '" +
                                            line + "'");
    }
    const auto names = split(header, ',');
    std::vector<Row> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const FieldParser fp(source, lineno);
        if (line.empty()) fp.fail({}, "empty line");
        const auto cells = split(line, ',');
        if (cells.size() != fields) {
            fp.fail({}, "expected " + std::to_string(fields) + " fields, got " + std::to_string(cells.size()));
        }
        rows.push_back(parse_row(fp, names, cells));
    }
    return rows;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::trunc) {
    std::ofstream out(path, std::ios::binary | mode);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

std::string format_trial_row(const TrialRecord& r) {
    std::string row = std::to_string(r.n) + ',' + std::to_string(r.p_rows) + ',' +
                      std::to_string(r.trial_index) + ',' + std::to_string(r.seed) + ',' +
                      (r.success ? '1' : '0') + ',' + fmt_real(r.objective) + ',' + fmt_real(r.residual) +
                      ',';
    row += to_string(r.status);
    return row;
}

std::string format_estimate_row(const CriticalPointEstimate& e) {
    return fmt_real(e.rho) + ',' + std::to_string(e.n) + ',' + fmt_real(e.alpha_c_n) + ',' +
           fmt_real(e.std_error) + ',' + std::to_string(e.trials_total);
}

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records) {
    out << kTrialsHeader << '\n';
    for (const auto& r : records) out << format_trial_row(r) << '\n';
}

void write_estimates_csv(std::ostream& out, std::span<const CriticalPointEstimate> estimates) {
    out << kEstimatesHeader << '\n';
    for (const auto& e : estimates) out << format_estimate_row(e) << '\n';
}

std::vector<TrialRecord> read_trials_csv(std::istream& in, std::string_view source) {
    return read_csv<TrialRecord>(
        in, source, kTrialsHeader, 8, [](const FieldParser& fp, const auto& names, const auto& c) {
            TrialRecord r;
            r.n = fp.integer<int>(names[0], c[0]);
            r.p_rows = fp.integer<int>(names[1], c[1]);
            r.trial_index = fp.integer<int>(names[2], c[2]);
            r.seed = fp.integer<std::uint64_t>(names[3], c[3]);
            if (c[4] != "0" && c[4] != "1") fp.fail(names[4], "expected 0 or 1, got '" + std::string(c[4]) + "'");
            r.success = c[4] == "1";
            r.objective = fp.real(names[5], c[5]);
            r.residual = fp.real(names[6], c[6]);
            try {
                r.status = parse_lp_status(c[7]);
            } catch (const ParseError& e) {
                fp.fail(names[7], e.what());
            }
            return r;
        });
}

std::vector<CriticalPointEstimate> read_estimates_csv(std::istream& in, std::string_view source) {
    return read_csv<CriticalPointEstimate>(
        in, source, kEstimatesHeader, 5, [](const FieldParser& fp, const auto& names, const auto& c) {
            CriticalPointEstimate e;
            e.rho = fp.real(names[0], c[0]);
            e.n = fp.integer<int>(names[1], c[1]);
            e.alpha_c_n = fp.real(names[2], c[2]);
            e.std_error = fp.real(names[3], c[3]);
            e.trials_total = fp.integer<int>(names[4], c[4]);
            return e;
        });
}

void save_trials(const std::string& path, std::span<const TrialRecord> records) {
    auto out = open_out(path);
    write_trials_csv(out, records);
    if (!out.flush()) throw Error("write to '" + path + "' failed");
}

std::vector<TrialRecord> load_trials(const std::string& path) {
    auto in = open_in(path);
    return read_trials_csv(in, path);
}

void save_estimates(const std::string& path, std::span<const CriticalPointEstimate> estimates) {
    auto out = open_out(path);
    write_estimates_csv(out, estimates);
    if (!out.flush()) throw Error("write to '" + path + "' failed");
}

std::vector<CriticalPointEstimate> load_estimates(const std::string& path) {
    auto in = open_in(path);
    return read_estimates_csv(in, path);
}

std::vector<TrialRecord> run_trials_to_file(const SweepConfig& config, const std::string& path,
                                            bool resume, const ProgressFn& progress) {
    namespace fs = std::filesystem;
    validate(config);
    std::set<TrialKey> present;
    bool fresh = true;
    if (resume && fs::exists(path)) {
        // Cut an interrupted final row so that appending starts on a clean line.
        std::string text;
        {
            auto in = open_in(path);
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        const std::size_t last_lf = text.rfind('\n');
        const std::size_t keep = last_lf == std::string::npos ? 0 : last_lf + 1;
        if (keep != text.size()) fs::resize_file(path, keep);
        text.resize(keep);
        if (!text.empty()) {
            std::istringstream in(text);
            for (const auto& r : read_trials_csv(in, path)) {
                if (r.seed != trial_seed(config.master_seed, r.n, r.p_rows, r.trial_index)) {
                    throw InvalidArgument("resume: '" + path + "' holds trial (" + std::to_string(r.n) + ", " +
                                          std::to_string(r.p_rows) + ", " + std::to_string(r.trial_index) +
                                          ") from a different master seed");
                }
                present.insert(r.key());
            }
            fresh = false;
        }
    }
    {
        auto out = fresh ? open_out(path) : open_out(path, std::ios::app);
        if (fresh) out << kTrialsHeader << '\n';
        std::size_t pending = 0;
        run_trials_streaming(
            config, present,
            [&](const TrialRecord& r) {
                out << format_trial_row(r) << '\n';
                if (++pending >= 1024) {
                    out.flush();
                    pending = 0;
                }
                if (!out) throw Error("write to '" + path + "' failed");
            },
            progress);
        if (!out.flush()) throw Error("write to '" + path + "' failed");
    }
    auto records = load_trials(path);
    std::sort(records.begin(), records.end(),
              [](const TrialRecord& a, const TrialRecord& b) { return a.key() < b.key(); });
    return records;
}

std::vector<int> parse_int_list(std::string_view text) {
    auto fail = [&](const std::string& what) {
        throw ParseError("integer list '" + std::string(text) + "': " + what);
    };
    auto to_int = [&](std::string_view tok) {
        tok = trim(tok);
        int v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
            fail("bad entry '" + std::string(tok) + "'");
        }
        return v;
    };
    std::vector<int> out;
    const auto parts = split(text, ',');
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (trim(parts[i]) != "...") {
            out.push_back(to_int(parts[i]));
            continue;
        }
        if (out.size() < 2 || i + 1 >= parts.size()) fail("'...' needs two leading terms and an end");
        const int step = out[out.size() - 1] - out[out.size() - 2];
        const int end = to_int(parts[i + 1]);
        if (step <= 0) fail("'...' needs an increasing progression");
        if ((end - out.back()) % step != 0 || end < out.back()) fail("end is not on the progression");
        while (out.back() + step < end) out.push_back(out.back() + step);
    }
    if (out.empty()) fail("empty list");
    return out;
}

SweepConfig parse_sweep_config(std::istream& in, std::string_view source) {
    SweepConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const FieldParser fp(source, lineno);
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) fp.fail({}, "expected 'key = value'");
        const std::string_view key = trim(view.substr(0, eq));
        const std::string_view value = trim(view.substr(eq + 1));
        try {
            if (key == "rho") {
                cfg.rho = fp.real(key, value);
            } else if (key == "n_values") {
                cfg.n_values = parse_int_list(value);
            } else if (key == "trials_per_point") {
                cfg.trials_per_point = fp.integer<int>(key, value);
            } else if (key == "ensemble") {
                cfg.ensemble = parse_matrix_ensemble(value);
            } else if (key == "nonzero_law") {
                cfg.nonzero_law = parse_nonzero_law(value);
            } else if (key == "support_mode") {
                cfg.support_mode = parse_support_mode(value);
            } else if (key == "master_seed") {
                cfg.master_seed = fp.integer<std::uint64_t>(key, value);
            } else if (key == "success_tol") {
                cfg.success_tol = fp.real(key, value);
            } else if (key == "alpha_center") {
                cfg.alpha_center = fp.real(key, value);
            } else if (key == "alpha_half_width") {
                cfg.alpha_half_width = fp.real(key, value);
            } else if (key == "workers") {
                cfg.workers = fp.integer<int>(key, value);
            } else if (key.starts_with("p_rows.")) {
                cfg.p_rows[fp.integer<int>(key, key.substr(7))] = parse_int_list(value);
            } else {
                fp.fail(key, "unknown key");
            }
        } catch (const InvalidArgument& e) {
            fp.fail(key, e.what());
        } catch (const ParseError& e) {
            if (std::string_view(e.what()).starts_with(source)) throw;
            fp.fail(key, e.what());
        }
    }
    return cfg;
}

void write_sweep_config(std::ostream& out, const SweepConfig& cfg) {
    auto join = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    out << "rho = " << fmt_real(cfg.rho) << '\n'
        << "n_values = " << join(cfg.n_values) << '\n'
        << "trials_per_point = " << cfg.trials_per_point << '\n'
        << "ensemble = " << to_string(cfg.ensemble) << '\n'
        << "nonzero_law = " << to_string(cfg.nonzero_law) << '\n'
        << "support_mode = " << to_string(cfg.support_mode) << '\n'
        << "master_seed = " << cfg.master_seed << '\n'
        << "success_tol = " << fmt_real(cfg.success_tol) << '\n'
        << "alpha_center = " << fmt_real(cfg.alpha_center) << '\n'
        << "alpha_half_width = " << fmt_real(cfg.alpha_half_width) << '\n'
        << "workers = " << cfg.workers << '\n';
    for (const auto& [n, ps] : cfg.p_rows) out << "p_rows." << n << " = " << join(ps) << '\n';
}

}  // namespace cslab
