// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsu2/algebra.hpp"
#include "qsu2/cli.hpp"
#include "qsu2/dirac.hpp"
#include "qsu2/errors.hpp"
#include "qsu2/gns_oracle.hpp"
#include "qsu2/spectral.hpp"

using namespace qsu2;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail)
{
    std::printf("%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

void guarded(int id, const std::string& title, const std::function<void()>& body)
{
    try {
        body();
    } catch (const std::exception& e) {
        report(id, title, false, std::string("exception: ") + e.what());
    }
}

HalfInteger half(int doubled) { return HalfInteger::from_doubled(doubled); }

NCPolynomial word(const char* text, double q)
{
    return std::string(text).empty() ? NCPolynomial::constant(1.0) : normal_order(parse_word(text), q);
}

void relation_battery()
{
    double worst = 0.0;
    for (double q : {1.2, 2.0}) {
        const GeneratorTable t = GeneratorTable::build(q, Truncation::from_doubled(24), 1.0);
        worst = std::max(worst, t.worst_residual());
    }
    report(1, "relation battery", worst < 1e-10, "max residual " + sci(worst) + " (< 1e-10)");
}

void haar_two_paths()
{
    const double q = 1.2;
    const GeneratorTable t = GeneratorTable::build(q, Truncation::from_doubled(20));
    double worst = 0.0;
    std::size_t count = 0;
    for (const Monomial& m : monomials_up_to(6)) {
        const NCPolynomial p = NCPolynomial::from_monomial(m);
        worst = std::max(worst, std::abs(haar_state(p, t) - oracle::oracle_haar(p, 60, q)));
        ++count;
    }
    report(2, "two-path Haar agreement", worst < 1e-9,
           std::to_string(count) + " monomials, max difference " + sci(worst) + " (< 1e-9)");
}

void v_basis()
{
    const double q = 1.2;
    const Truncation trunc = Truncation::from_doubled(10);
    const auto labels = v_labels(trunc);
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(2 * trunc.dimension()), static_cast<Eigen::Index>(labels.size()));
    for (std::size_t k = 0; k < labels.size(); ++k)
        m.col(static_cast<Eigen::Index>(k)) = v_vector(labels[k], q, trunc).stacked();
    const double gram = (m.adjoint() * m - Eigen::MatrixXcd::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
    bool counts = m.rows() == m.cols();
    for (int l2 = 0; l2 <= 10; ++l2) counts = counts && v_labels(half(l2)).size() == std::size_t(2 * (l2 + 1) * (l2 + 1));
    report(3, "v-basis orthonormality and completeness", gram < 1e-12 && counts,
           "Gram deviation " + sci(gram) + " (< 1e-12), " + std::to_string(labels.size()) + " vectors for dimension " +
               std::to_string(m.rows()) + (counts ? ", counts 2(2l+1)^2 exact" : ", COUNT MISMATCH"));
}

void dirac_relation()
{
    const double r = q_relation_check(1.2, Truncation::from_doubled(20));
    report(4, "Dirac q-relation", r < 1e-12, "max residual " + sci(r) + " (< 1e-12)");
}

void b_coefficients()
{
    const double q = 1.2;
    const GeneratorTable table = GeneratorTable::build(q, Truncation::from_doubled(14));
    const SparseOperator& a = table.cell_operator({kHalf, kHalf});
    double closed = 0.0, direct = 0.0;
    for (int l2 = 0; l2 <= 12; ++l2) {
        const HalfInteger l = half(l2);
        for (int i2 = -l2; i2 <= l2; i2 += 2)
            for (int j2 = -l2 - 1; j2 <= l2 + 1; j2 += 2) {
                const VIndex src{l, half(i2), half(j2), Branch::Plus};
                closed = std::max(closed, std::abs(b_coefficient(l, src.i, src.j, l + kHalf, Branch::Minus, q) -
                                                   b_minus_closed(l, src.i, src.j, q)));
                std::map<VIndex, Complex> expansion;
                for (const auto& [idx, c] : expand_in_v_basis(lift_apply(a, v_vector(src, q, table.truncation())), q))
                    expansion[idx] = c;
                for (HalfInteger m : {l - kHalf, l + kHalf}) {
                    if (m.doubled() < 0) continue;
                    for (Branch eps : {Branch::Plus, Branch::Minus}) {
                        const VIndex dst{m, src.i + kHalf, src.j + kHalf, eps};
                        const Complex c = dst.valid() ? expansion[dst] : Complex{};
                        direct = std::max(direct, std::abs(c - b_coefficient(l, src.i, src.j, m, eps, q)));
                    }
                }
            }
    }
    report(5, "b-coefficient cross-checks", closed < 1e-10 && direct < 1e-10,
           "sum vs closed " + sci(closed) + ", sum vs operator " + sci(direct) + " (< 1e-10)");
}

const std::vector<const char*> kObservables = {"", "a", "g", "g* g", "a* a", "a g*"};

void haar_heat_and_multiplier()
{
    const double q = 1.2;
    const GeneratorTable table = GeneratorTable::build(q, Truncation::from_doubled(32));
    double err = 0.0, tail = 0.0, mult = 0.0;
    for (const char* w : kObservables) {
        const NCPolynomial a = word(w, q);
        const Complex psi = haar_state(a, table);
        for (double t : {0.5, 1.0, 2.0}) {
            const TraceRatio r = haar_via_heat(a, t, table);
            err = std::max(err, std::abs(r.ratio - psi));
            tail = std::max(tail, r.tail_bound);
        }
        const TraceRatio m =
            rho_trace_functional(a, [](HalfInteger n) { return std::exp(-n.value() * (n.value() + 1.0)); }, table);
        mult = std::max(mult, std::abs(m.ratio - psi));
    }
    report(6, "Haar state from heat-kernel ratios", err < 1e-8 && tail < 1e-10,
           "max error " + sci(err) + " (< 1e-8), Lmax 16 tail bound " + sci(tail) + " (< 1e-10)");
    report(7, "multiplier independence", mult < 1e-8, "max error with exp(-n(n+1)) " + sci(mult) + " (< 1e-8)");
}

void modular()
{
    const double q = 1.2;
    const GeneratorTable table = GeneratorTable::build(q, Truncation::from_doubled(12));
    const auto monos = monomials_up_to(2);
    double defect = 0.0;
    for (const Monomial& x : monos)
        for (const Monomial& y : monos)
            defect = std::max(defect,
                              modular_check(NCPolynomial::from_monomial(x), NCPolynomial::from_monomial(y), table));
    double scaling = 0.0;
    for (HalfInteger r : {kHalf, -kHalf})
        for (HalfInteger s : {kHalf, -kHalf}) {
            const SparseOperator& t = table.cell_operator({r, s});
            const double factor = std::pow(q, -(r.doubled() + s.doubled()));
            const SparseMatrix diff = modular_conjugate(t, q).matrix() - Complex(factor) * t.matrix();
            scaling = std::max(scaling, max_abs_on_shell(diff, table.truncation(), t.safe_shell()));
        }
    report(8, "modular property", defect < 1e-9 && scaling < 1e-12,
           std::to_string(monos.size() * monos.size()) + " pairs, defect " + sci(defect) +
               " (< 1e-9), generator scaling " + sci(scaling) + " (< 1e-12)");
}

void dichotomy()
{
    const double q = 1.2;
    const GeneratorTable table = GeneratorTable::build(q, Truncation::from_doubled(62));
    const NCPolynomial a = table.cell_polynomial({kHalf, kHalf});

    std::vector<HalfInteger> shells, ls;
    for (int s = 4; s <= 20; ++s) shells.push_back(HalfInteger::from_int(s));
    for (int l = 5; l <= 30; ++l) ls.push_back(HalfInteger::from_int(l));

    const CommutatorSeries bounded = absD_commutator_series(a, shells, table);
    const auto& v = bounded.series.values;
    const double last_change = std::abs(v.back() - v[v.size() - 2]) / v.back();
    double top = 0.0;
    for (double x : v) top = std::max(top, x);
    const bool plateau = last_change < 0.01 && top <= bounded.cap;

    const GrowthSeries g = trueD_growth(a, ls, table);
    const double r20 = g.values[15] / 20.0, r30 = g.values.back() / 30.0;
    const double ratio_change = std::abs(r30 - r20) / r20;
    const bool growth = g.slope > 0.0 && g.relative_residual() < 0.05 && ratio_change < 0.2;

    report(9, "bounded/unbounded dichotomy", plateau && growth,
           "[|D|,a]: last-two change " + sci(last_change) + " (< 1e-2), max " + sci(top) + " <= cap " +
               sci(bounded.cap) + "; [D,a]: slope " + sci(g.slope) + " (> 0), fit residual " +
               sci(g.relative_residual()) + " (< 5e-2), value/l change " + sci(ratio_change) + " (< 2e-1)");
}

double golden_max_value(const std::function<double(double)>& f, double lo, double hi)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi, c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 400 && b - a > 1e-12; ++it) {
        if (fc > fd) {
            b = d; d = c; fd = fc; c = b - g * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd; d = a + g * (b - a); fd = f(d);
        }
    }
    return f(0.5 * (a + b));
}

void band()
{
    const double q = 1.2;
    const auto grid = make_grid(0.05, 0.5, 12, true);
    const double k = heat_exponent(q);
    // Laplace oracle: the maximum over m of 2 m ln q - t m^2 / 4, times t, is k
    double k_dev = 0.0;
    for (double t : grid) {
        const double best = golden_max_value([&](double m) { return 2.0 * m * std::log(q) - t * m * m / 4.0; }, 0.0,
                                             1000.0);
        k_dev = std::max(k_dev, std::abs(best * t - k) / k);
    }
    bool precondition = false;
    try {
        asymptotic_band(q, grid, Truncation::from_doubled(40));
    } catch (const PeakOutsideTruncation&) {
        precondition = true;
    }
    const auto pts = asymptotic_band(q, grid, Truncation::from_doubled(62));
    double lo = 1e300, hi = 0.0;
    for (const BandPoint& p : pts) {
        lo = std::min(lo, p.s);
        hi = std::max(hi, p.s);
    }
    const bool pass = k_dev < 1e-8 && precondition && lo > 0.0 && hi / lo < 5.0;
    report(10, "heat-trace band", pass,
           "k = " + sci(k) + " (oracle deviation " + sci(k_dev) + "), max s / min s = " + sci(hi / lo) +
               " (< 5), undersized truncation " + (precondition ? "rejected" : "NOT rejected"));
}

std::map<std::string, std::string> read_dir(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream f(e.path(), std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        out[e.path().filename().string()] = ss.str();
    }
    return out;
}

void determinism()
{
    const fs::path base = fs::temp_directory_path() / "qsu2_acceptance";
    fs::remove_all(base);
    std::vector<std::map<std::string, std::string>> outputs;
    for (const char* sub : {"run1", "run2"}) {
        const std::string dir = (base / sub).string();
        const char* argv[] = {"qsu2", "all", "--seed", "12345", "--out", dir.c_str()};
        std::ostringstream out, err;
        cli::run(6, argv, out, err);
        outputs.push_back(read_dir(dir));
    }
    fs::remove_all(base);
    const bool pass = outputs[0].size() == cli::experiments().size() && outputs[0] == outputs[1];
    std::size_t bytes = 0;
    for (const auto& [name, text] : outputs[0]) bytes += text.size();
    report(11, "determinism", pass,
           std::to_string(outputs[0].size()) + " files, " + std::to_string(bytes) + " bytes, " +
               (outputs[0] == outputs[1] ? "byte-identical" : "DIFFERENT"));
}

} // namespace

int main()
{
    guarded(1, "relation battery", relation_battery);
    guarded(2, "two-path Haar agreement", haar_two_paths);
    guarded(3, "v-basis orthonormality and completeness", v_basis);
    guarded(4, "Dirac q-relation", dirac_relation);
    guarded(5, "b-coefficient cross-checks", b_coefficients);
    guarded(6, "Haar state from heat-kernel ratios", haar_heat_and_multiplier);
    guarded(8, "modular property", modular);
    guarded(9, "bounded/unbounded dichotomy", dichotomy);
    guarded(10, "heat-trace band", band);
    guarded(11, "determinism", determinism);
    std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
