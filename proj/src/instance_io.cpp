#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cslab/ensembles.hpp"
#include "cslab/errors.hpp"

namespace cslab {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_row(std::ostream& out, const char* tag, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    if (tag) out << tag;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
        if (tag || j > 0) out << ' ';
        out << format_double(row[j]);
    }
    out << '\n';
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw ParseError("instance line " + std::to_string(line) + ": " + what);
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::vector<std::string> next(const char* expecting) {
        std::string text;
        while (std::getline(in_, text)) {
            ++line_;
            if (text.empty() || text[0] == '#') continue;
            std::istringstream ss(text);
            std::vector<std::string> tokens;
            for (std::string t; ss >> t;) tokens.push_back(t);
            if (!tokens.empty()) return tokens;
        }
        fail(line_ + 1, std::string("unexpected end of input, expecting ") + expecting);
    }

    [[nodiscard]] int line() const { return line_; }

private:
    std::istream& in_;
    int line_ = 0;
};

double parse_double(const std::string& tok, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) fail(line, "trailing characters in number '" + tok + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(line, "not a number: '" + tok + "'");
    } catch (const std::out_of_range&) {
        fail(line, "number out of range: '" + tok + "'");
    }
}

template <class Int>
Int parse_int(const std::string& tok, int line) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) fail(line, "not an integer: '" + tok + "'");
    return v;
}

std::string expect_value(LineReader& rd, const char* key) {
    auto tok = rd.next(key);
    if (tok.size() != 2 || tok[0] != key) {
        fail(rd.line(), std::string("expected '") + key + " <value>'");
    }
    return tok[1];
}

Eigen::VectorXd read_vector(LineReader& rd, const char* tag, int len) {
    auto tok = rd.next(tag);
    if (tok[0] != tag) fail(rd.line(), std::string("expected row tagged '") + tag + "'");
    if (static_cast<int>(tok.size()) != len + 1) {
        fail(rd.line(), std::string(tag) + " has " + std::to_string(tok.size() - 1) +
                            " entries, expected " + std::to_string(len));
    }
    Eigen::VectorXd v(len);
    for (int i = 0; i < len; ++i) v[i] = parse_double(tok[i + 1], rd.line());
    return v;
}

}  // namespace

void dump_instance(std::ostream& out, const ProblemInstance& inst, MatrixEnsemble ensemble,
                   const SignalPrior& prior) {
    out << "n " << inst.x0.size() << '\n'
        << "p " << inst.F.rows() << '\n'
        << "ensemble " << to_string(ensemble) << '\n'
        << "rho " << format_double(prior.rho) << '\n'
        << "law " << to_string(prior.nonzero_law) << '\n'
        << "support " << to_string(prior.support_mode) << '\n'
        << "seed " << inst.seed << '\n'
        << "F\n";
    for (Eigen::Index i = 0; i < inst.F.rows(); ++i) write_row(out, nullptr, inst.F.row(i));
    write_row(out, "x0", inst.x0.transpose());
    write_row(out, "y", inst.y.transpose());
}

LoadedInstance load_instance(std::istream& in) {
    LineReader rd(in);
    LoadedInstance res;
    const int n = parse_int<int>(expect_value(rd, "n"), rd.line());
    const int p = parse_int<int>(expect_value(rd, "p"), rd.line());
    if (n < 1 || p < 1 || p > n) fail(rd.line(), "require 1 <= p <= n");
    try {
        res.ensemble = parse_matrix_ensemble(expect_value(rd, "ensemble"));
        res.prior.rho = parse_double(expect_value(rd, "rho"), rd.line());
        res.prior.nonzero_law = parse_nonzero_law(expect_value(rd, "law"));
        res.prior.support_mode = parse_support_mode(expect_value(rd, "support"));
    } catch (const InvalidArgument& e) {
        fail(rd.line(), e.what());
    }
    res.instance.seed = parse_int<std::uint64_t>(expect_value(rd, "seed"), rd.line());
    auto tag = rd.next("F");
    if (tag.size() != 1 || tag[0] != "F") fail(rd.line(), "expected 'F'");
    res.instance.F.resize(p, n);
    for (int i = 0; i < p; ++i) {
        auto tok = rd.next("matrix row");
        if (static_cast<int>(tok.size()) != n) {
            fail(rd.line(), "matrix row has " + std::to_string(tok.size()) + " entries, expected " +
                                std::to_string(n));
        }
        for (int j = 0; j < n; ++j) res.instance.F(i, j) = parse_double(tok[j], rd.line());
    }
    res.instance.x0 = read_vector(rd, "x0", n);
    res.instance.y = read_vector(rd, "y", p);
    return res;
}

}  // namespace cslab
