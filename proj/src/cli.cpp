#include "qsu2/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsu2/algebra.hpp"
#include "qsu2/dirac.hpp"
#include "qsu2/errors.hpp"
#include "qsu2/gns_oracle.hpp"
#include "qsu2/qarith.hpp"
#include "qsu2/spectral.hpp"

namespace qsu2 {

const char* version() noexcept { return QSU2_VERSION; }

namespace cli {

// ---------------------------------------------------------------------------
// Configuration

TGrid TGrid::parse(const std::string& text, bool log_spaced)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string piece; std::getline(ss, piece, ':');) parts.push_back(piece);
    if (parts.size() != 3) throw ConfigError("t-grid: expected start:stop:count, got '" + text + "'");
    TGrid g;
    try {
        std::size_t used = 0;
        g.start = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
        g.stop = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
        g.count = std::stoi(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    } catch (const std::logic_error&) {
        throw ConfigError("t-grid: could not parse '" + text + "' as start:stop:count");
    }
    g.log_spaced = log_spaced;
    return g;
}

std::vector<double> TGrid::points() const { return make_grid(start, stop, count, log_spaced); }

void RunConfig::validate() const
{
    const auto& names = experiments();
    if (experiment != "all" && std::find(names.begin(), names.end(), experiment) == names.end())
        throw ConfigError("experiment: unknown experiment '" + experiment + "'");
    if (!std::isfinite(q) || q <= 0.0 || q == 1.0) throw ConfigError("q: must be positive and different from 1");
    if (lmax_doubled && *lmax_doubled < 0) throw ConfigError("lmax: must be >= 0 (doubled spin)");
    if (t && !(*t > 0.0 && std::isfinite(*t))) throw ConfigError("t: must be positive");
    if (t && t_grid) throw ConfigError("t, t-grid: give at most one of them");
    if (t_grid) {
        if (!(t_grid->start > 0.0 && t_grid->stop > 0.0)) throw ConfigError("t-grid: values must be positive");
        if (t_grid->count < 1) throw ConfigError("t-grid: count must be >= 1");
        if (t_grid->stop < t_grid->start) throw ConfigError("t-grid: stop must be >= start");
    }
    if (!(tolerance > 0.0)) throw ConfigError("tol: must be positive");
    if (precision_bits != 53 && precision_bits != 64) throw ConfigError("precision-bits: must be 53 or 64");
    if (oracle_levels < 0) throw ConfigError("oracle-levels: must be >= 0");
}

int default_lmax_doubled(const std::string& experiment)
{
    if (experiment == "validate") return 24;
    if (experiment == "haar") return 32;
    if (experiment == "commutators" || experiment == "heat") return 62;
    if (experiment == "modular") return 12;
    throw ConfigError("experiment: unknown experiment '" + experiment + "'");
}

bool ExperimentResult::passed() const
{
    return !criteria.empty() && std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass; });
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

std::string sci(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// Criterion of the form "measured < threshold".
Criterion below(std::string name, std::string quantity, double measured, double threshold)
{
    return {std::move(name), measured < threshold, quantity + "=" + sci(measured) + " (< " + sci(threshold) + ")"};
}

class Builder {
public:
    Builder(ExperimentResult& r, std::vector<std::string> columns) : r_(r)
    {
        r_.table.columns = std::move(columns);
    }
    void row(std::vector<Cell> cells, bool ok) { row(std::move(cells), std::string(ok ? "ok" : "fail")); }
    void row(std::vector<Cell> cells, std::string status)
    {
        cells.resize(r_.table.columns.size());
        cells.emplace_back(std::move(status));
        r_.table.rows.push_back(std::move(cells));
    }
    void criterion(Criterion c) { r_.criteria.push_back(std::move(c)); }

private:
    ExperimentResult& r_;
};

std::vector<HalfInteger> spin_range(int first_doubled, int last_doubled, int step_doubled = 2)
{
    std::vector<HalfInteger> out;
    for (int d = first_doubled; d <= last_doubled; d += step_doubled) out.push_back(HalfInteger::from_doubled(d));
    return out;
}

// --- validate --------------------------------------------------------------

double cg_orthogonality_defect(double q, int lmax_doubled)
{
    double worst = 0.0;
    for (int l2 = 0; l2 <= lmax_doubled; ++l2) {
        const HalfInteger l = HalfInteger::from_doubled(l2);
        for (int m2 = -l2 - 1; m2 <= l2 + 1; m2 += 2) {
            const HalfInteger total = HalfInteger::from_doubled(m2);
            // rows: target spin l +- 1/2; columns: m1 = +1/2, -1/2.
            double c[2][2];
            for (int b = 0; b < 2; ++b)
                for (int s = 0; s < 2; ++s) {
                    const HalfInteger m1 = s == 0 ? kHalf : -kHalf;
                    c[b][s] = cg_half(m1, b == 0 ? Branch::Plus : Branch::Minus, l, total - m1, q);
                }
            const bool minus_present = l2 >= 1 && std::abs(m2) <= l2 - 1;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const double dot = c[a][0] * c[b][0] + c[a][1] * c[b][1];
                    double expect = a == b ? 1.0 : 0.0;
                    if (a == 1 && b == 1 && !minus_present) expect = 0.0;
                    worst = std::max(worst, std::abs(dot - expect));
                }
        }
    }
    return worst;
}

double v_gram_defect(double q, int lmax_doubled, std::size_t& label_count, double& count_defect)
{
    const Truncation trunc = Truncation::from_doubled(lmax_doubled);
    const auto labels = v_labels(trunc);
    label_count = labels.size();
    count_defect = 0.0;
    for (int l2 = 0; l2 <= lmax_doubled; ++l2) {
        const auto n = static_cast<double>(v_labels(HalfInteger::from_doubled(l2)).size());
        count_defect = std::max(count_defect, std::abs(n - 2.0 * (l2 + 1) * (l2 + 1)));
    }
    const auto dim = static_cast<Eigen::Index>(2 * trunc.dimension());
    Eigen::MatrixXcd v(dim, static_cast<Eigen::Index>(labels.size()));
    for (std::size_t k = 0; k < labels.size(); ++k)
        v.col(static_cast<Eigen::Index>(k)) = v_vector(labels[k], q, trunc).stacked();
    const Eigen::MatrixXcd gram = v.adjoint() * v;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
    return (gram - id).cwiseAbs().maxCoeff();
}

struct BCheck {
    double sum_vs_closed = 0.0;
    double sum_vs_direct = 0.0;
};

BCheck b_crosscheck(const GeneratorTable& table, int lmax_doubled)
{
    const double q = table.q();
    const Truncation& trunc = table.truncation();
    const SparseOperator& cell = table.cell_operator({kHalf, kHalf});
    BCheck out;
    for (int l2 = 0; l2 <= lmax_doubled; ++l2) {
        const HalfInteger l = HalfInteger::from_doubled(l2);
        for (int i2 = -l2; i2 <= l2; i2 += 2)
            for (int j2 = -l2 - 1; j2 <= l2 + 1; j2 += 2) {
                const VIndex src{l, HalfInteger::from_doubled(i2), HalfInteger::from_doubled(j2), Branch::Plus};
                const SpinorVector image = lift_apply(cell, v_vector(src, q, trunc));
                for (HalfInteger m : {l - kHalf, l + kHalf}) {
                    if (m.doubled() < 0) continue;
                    for (Branch eps : {Branch::Plus, Branch::Minus}) {
                        const double sum = b_coefficient(l, src.i, src.j, m, eps, q);
                        const VIndex dst{m, src.i + kHalf, src.j + kHalf, eps};
                        const double direct = dst.valid() ? v_vector(dst, q, trunc).dot(image).real() : 0.0;
                        out.sum_vs_direct = std::max(out.sum_vs_direct, std::abs(sum - direct));
                        if (m == l + kHalf && eps == Branch::Minus)
                            out.sum_vs_closed =
                                std::max(out.sum_vs_closed, std::abs(sum - b_minus_closed(l, src.i, src.j, q)));
                    }
                }
            }
    }
    return out;
}

double confluence_defect(double q, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int code = 0; code < 64; ++code) {
        Word w;
        for (int k = 0, c = code; k < 3; ++k, c /= 4) w.push_back(kLetters[static_cast<std::size_t>(c % 4)]);
        const NCPolynomial ref = normal_order(w, q);
        for (int rep = 0; rep < 3; ++rep) {
            const NCPolynomial other = normal_order(w, q, &rng);
            worst = std::max(worst, (ref - other).max_abs_coefficient());
        }
    }
    return worst;
}

void run_validate(const RunConfig& cfg, ExperimentResult& r)
{
    Builder b(r, {"module", "check", "residual", "threshold"});
    auto record = [&](const std::string& module, const std::string& check, double residual, double threshold) {
        b.row({module, check, residual, threshold}, residual < threshold);
        b.criterion(below("validate." + module + "." + check, "residual", residual, threshold));
    };
    const double q = cfg.q;
    const int lmax2 = r.lmax_doubled;

    double sym = 0.0;
    for (int r2 = 1; r2 <= 40; ++r2) {
        const double x = 0.5 * r2;
        const double qn = q_number(x, q);
        sym = std::max({sym, std::abs(q_number(x, 1.0 / q) - qn) / qn, std::abs(q_number(-x, q) + qn) / qn});
    }
    record("qarith", "inversion_symmetry", sym, 1e-12);
    record("qarith", "cg_orthogonality", cg_orthogonality_defect(q, std::min(lmax2, 40)), 1e-12);

    const Truncation trunc = Truncation::from_doubled(lmax2);
    double norm_defect = 0.0;
    for (const PWIndex& idx : basis_enumerate(Truncation::from_doubled(std::min(lmax2, 12)))) {
        const double f = normalization_factor(idx, q);
        norm_defect = std::max(norm_defect, std::abs(f * f * pw_inner_unnormalized(idx, idx, q) - 1.0));
    }
    record("peterweyl", "normalization", norm_defect, 1e-12);
    double rho_defect = 0.0;
    for (int n2 = 0; n2 <= lmax2; ++n2) {
        double s = 0.0;
        for (int i2 = -n2; i2 <= n2; i2 += 2)
            for (int j2 = -n2; j2 <= n2; j2 += 2)
                s += rho_weight({HalfInteger::from_doubled(n2), HalfInteger::from_doubled(i2),
                                 HalfInteger::from_doubled(j2)},
                                q);
        const double expect = std::pow(q_number(n2 + 1.0, q), 2);
        rho_defect = std::max(rho_defect, std::abs(s - expect) / expect);
    }
    record("peterweyl", "rho_block_trace", rho_defect, 1e-12);

    const GeneratorTable table = GeneratorTable::build(q, trunc);
    for (const RelationResidual& rel : table.battery()) record("algebra", rel.identity, rel.residual, 1e-10);
    record("algebra", "confluence", confluence_defect(q, cfg.seed), 1e-10);

    if (q > 1.0) {
        double worst = 0.0;
        for (const Monomial& m : monomials_up_to(std::min(6, lmax2))) {
            const NCPolynomial p = NCPolynomial::from_monomial(m);
            worst = std::max(worst, std::abs(haar_state(p, table) - oracle::oracle_haar(p, cfg.oracle_levels, q)));
        }
        record("oracle", "haar_agreement", worst, 1e-9);
    } else {
        b.row({std::string("oracle"), std::string("haar_agreement")}, std::string("skipped: ladder model needs q > 1"));
    }

    std::size_t labels = 0;
    double count_defect = 0.0;
    record("dirac", "v_gram", v_gram_defect(q, std::min(lmax2, 10), labels, count_defect), 1e-12);
    record("dirac", "dimension_count", count_defect, 0.5);
    record("dirac", "q_relation", q_relation_check(q, Truncation::from_doubled(std::min(lmax2, 20))), 1e-12);
    const BCheck bc = b_crosscheck(table, std::min(12, lmax2 - 2));
    record("dirac", "b_sum_vs_closed", bc.sum_vs_closed, 1e-10);
    record("dirac", "b_sum_vs_direct", bc.sum_vs_direct, 1e-10);
}

// --- haar ------------------------------------------------------------------

const std::vector<std::string>& haar_observables()
{
    static const std::vector<std::string> words = {"", "a", "g", "g* g", "a* a", "a g*"};
    return words;
}

void run_haar(const RunConfig& cfg, const std::vector<double>& grid, ExperimentResult& r)
{
    Builder b(r, {"observable", "method", "t", "ratio", "ratio_imag", "psi_reference", "psi_reference_imag",
                  "abs_error", "tail_bound"});
    const GeneratorTable table = GeneratorTable::build(cfg.q, Truncation::from_doubled(r.lmax_doubled));
    double heat_err = 0.0, heat_tail = 0.0, mult_err = 0.0, mult_tail = 0.0;
    auto lambda = [](HalfInteger n) { return std::exp(-n.value() * (n.value() + 1.0)); };
    for (const std::string& text : haar_observables()) {
        const NCPolynomial p =
            text.empty() ? NCPolynomial::constant(1.0) : normal_order(parse_word(text), cfg.q);
        const std::string name = text.empty() ? "1" : text;
        const Complex ref = haar_state(p, table);
        for (double t : grid) {
            const TraceRatio tr = haar_via_heat(p, t, table);
            const double err = std::abs(tr.ratio - ref);
            heat_err = std::max(heat_err, err);
            heat_tail = std::max(heat_tail, tr.tail_bound);
            b.row({name, std::string("heat"), t, tr.ratio.real(), tr.ratio.imag(), ref.real(), ref.imag(), err,
                   tr.tail_bound},
                  err < 1e-8 && tr.tail_bound < 1e-10);
        }
        const TraceRatio mr = rho_trace_functional(p, lambda, table);
        const double err = std::abs(mr.ratio - ref);
        mult_err = std::max(mult_err, err);
        mult_tail = std::max(mult_tail, mr.tail_bound);
        b.row({name, std::string("multiplier"), Cell{}, mr.ratio.real(), mr.ratio.imag(), ref.real(), ref.imag(), err,
               mr.tail_bound},
              err < 1e-8);
    }
    b.criterion(below("haar.heat_ratio", "max_abs_error", heat_err, 1e-8));
    b.criterion(below("haar.heat_tail_bound", "max_tail_bound", heat_tail, 1e-10));
    b.criterion(below("haar.multiplier_ratio", "max_abs_error", mult_err, 1e-8));
}

// --- commutators -----------------------------------------------------------

void run_commutators(const RunConfig& cfg, ExperimentResult& r)
{
    Builder b(r, {"l", "norm_trueD", "norm_over_l", "norm_absD_witness", "shell", "norm_absD", "cap"});
    const int lmax2 = r.lmax_doubled;
    const GeneratorTable table = GeneratorTable::build(cfg.q, Truncation::from_doubled(lmax2));
    const NCPolynomial a = table.cell_polynomial({kHalf, kHalf});
    const PowerIterationOptions opts{cfg.tolerance, 200, cfg.seed};

    const auto shells = spin_range(8, std::min(40, lmax2 - 1));
    const auto ls = spin_range(10, std::min(60, lmax2 - 1));
    if (shells.size() < 3 || ls.size() < 3)
        throw InvalidParameter("commutators: lmax too small for the shell (4..20) and l (5..30) sweeps");

    const CommutatorSeries abs_series = absD_commutator_series(a, shells, table, opts);
    const GrowthSeries true_series = trueD_growth(a, ls, table, DiracKind::True);
    const GrowthSeries witness_abs = trueD_growth(a, ls, table, DiracKind::Abs);

    const std::size_t rows = std::max(shells.size(), ls.size());
    for (std::size_t k = 0; k < rows; ++k) {
        std::vector<Cell> cells(7);
        if (k < ls.size()) {
            cells[0] = ls[k].value();
            cells[1] = true_series.values[k];
            cells[2] = true_series.values[k] / ls[k].value();
            cells[3] = witness_abs.values[k];
        }
        if (k < shells.size()) {
            cells[4] = shells[k].value();
            cells[5] = abs_series.series.values[k];
            cells[6] = abs_series.cap;
        }
        const bool ok = (k >= shells.size() || abs_series.series.values[k] <= abs_series.cap) &&
                        (k >= ls.size() || witness_abs.values[k] <= abs_series.cap);
        b.row(std::move(cells), ok);
    }

    const auto& v = abs_series.series.values;
    double drop = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) drop = std::max(drop, (v[k - 1] - v[k]) / v[k - 1]);
    const double plateau = std::abs(v.back() - v[v.size() - 2]) / v.back();
    b.criterion({"commutators.absD_plateau", drop <= 1e-9 && plateau < 1e-2,
                 "last_two_rel_diff=" + sci(plateau) + " (< 1.000e-02), max_rel_drop=" + sci(drop) +
                     " (<= 1.000e-09)"});
    b.criterion({"commutators.absD_below_cap", v.back() <= abs_series.cap,
                 "plateau=" + sci(v.back()) + " cap=" + sci(abs_series.cap)});
    if (shells.front().doubled() <= 8 && Truncation::offset(shells.front() + kHalf) <= 500) {
        const double dense = dense_shell_norm(absD_commutator(mult_operator(a, table)), shells.front());
        b.criterion(below("commutators.dense_crosscheck", "rel_diff", std::abs(dense - v.front()) / dense, 1e-6));
    }
    b.criterion({"commutators.trueD_growth",
                 true_series.slope > 0.0 && true_series.relative_residual() < 0.05,
                 "slope=" + sci(true_series.slope) + " (> 0), rel_fit_residual=" +
                     sci(true_series.relative_residual()) + " (< 5.000e-02)"});
    auto ratio_at = [&](double l) -> std::optional<double> {
        for (std::size_t k = 0; k < ls.size(); ++k)
            if (ls[k].value() == l) return true_series.values[k] / l;
        return std::nullopt;
    };
    const auto r20 = ratio_at(20.0), r30 = ratio_at(30.0);
    if (r20 && r30) {
        const double change = std::abs(*r30 - *r20) / *r20;
        b.criterion(below("commutators.trueD_ratio_stable", "rel_change_20_30", change, 0.2));
    }
    const double witness_max = *std::max_element(witness_abs.values.begin(), witness_abs.values.end());
    b.criterion({"commutators.absD_witness_below_cap", witness_max <= abs_series.cap,
                 "max=" + sci(witness_max) + " cap=" + sci(abs_series.cap)});
}

// --- heat ------------------------------------------------------------------

// Maximum over m >= 0 of 2 m ln q - t m^2 / 4 by golden-section search,
// multiplied by t; equals the heat exponent k.
double laplace_exponent(double q, double t)
{
    const double lq = std::abs(std::log(q));
    auto f = [&](double m) { return 2.0 * m * lq - t * m * m / 4.0; };
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 16.0 * lq / t + 1.0;
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        }
    }
    return t * f(0.5 * (lo + hi));
}

void run_heat(const RunConfig& cfg, const std::vector<double>& grid, ExperimentResult& r)
{
    Builder b(r, {"t", "operator_trace", "closed_sum", "printed_series", "tail_bound", "k_exponent", "peak", "s",
                  "plain_trace", "s_plain", "classical"});
    const Truncation trunc = Truncation::from_doubled(r.lmax_doubled);
    const auto band = asymptotic_band(cfg.q, grid, trunc, cfg.precision_bits);
    double consistency = 0.0, laplace = 0.0;
    const double k = heat_exponent(cfg.q);
    for (const BandPoint& p : band) {
        const HeatTraceReport h = heat_trace(p.t, cfg.q, trunc, cfg.precision_bits);
        const double excess = std::max(0.0, std::abs(h.closed_sum - h.operator_trace) - h.tail_bound) / h.closed_sum;
        consistency = std::max(consistency, excess);
        laplace = std::max(laplace, std::abs(laplace_exponent(cfg.q, p.t) - k) / k);
        b.row({p.t, h.operator_trace, h.closed_sum, h.printed_series, h.tail_bound, h.k_exponent, p.peak, p.s,
               p.plain_trace, p.s_plain, p.classical},
              excess < 1e-12);
    }
    double smin = band.front().s, smax = band.front().s, cmin = band.front().classical, cmax = cmin;
    for (const BandPoint& p : band) {
        smin = std::min(smin, p.s);
        smax = std::max(smax, p.s);
        cmin = std::min(cmin, p.classical);
        cmax = std::max(cmax, p.classical);
    }
    b.criterion({"heat.band", smin > 0.0 && smax / smin < 5.0,
                 "min_s=" + sci(smin) + " (> 0), max_s/min_s=" + sci(smax / smin) + " (< 5.000e+00)"});
    b.criterion(below("heat.trace_consistency", "max_rel_excess_over_tail", consistency, 1e-12));
    b.criterion(below("heat.laplace_exponent", "max_rel_diff", laplace, 1e-8));
    b.criterion(below("heat.plain_scaling", "classical_rel_spread", (cmax - cmin) / cmin, 1e-6));
}

// --- modular ---------------------------------------------------------------

void run_modular(const RunConfig& cfg, ExperimentResult& r)
{
    Builder b(r, {"check", "a", "b", "defect"});
    const GeneratorTable table = GeneratorTable::build(cfg.q, Truncation::from_doubled(r.lmax_doubled));
    const auto monos = monomials_up_to(2);
    double worst = 0.0;
    for (const Monomial& ma : monos)
        for (const Monomial& mb : monos) {
            const double d =
                modular_check(NCPolynomial::from_monomial(ma), NCPolynomial::from_monomial(mb), table);
            worst = std::max(worst, d);
            b.row({std::string("defect"), ma.str(), mb.str(), d}, d < 1e-9);
        }
    double scaling = 0.0;
    for (HalfInteger rr : {kHalf, -kHalf})
        for (HalfInteger ss : {kHalf, -kHalf}) {
            const SparseOperator& op = table.cell_operator({rr, ss});
            const SparseOperator conj = modular_conjugate(op, cfg.q);
            const double factor = std::pow(cfg.q, -2.0 * (rr.value() + ss.value()));
            const double res = conj.max_difference_on_shell(Complex(factor) * op, op.safe_shell());
            scaling = std::max(scaling, res);
            b.row({std::string("generator_scaling"), "t(" + rr.str() + "," + ss.str() + ")", Cell{}, res},
                  res < 1e-12);
        }
    b.criterion(below("modular.defect", "max_defect", worst, 1e-9));
    b.criterion(below("modular.generator_scaling", "max_residual", scaling, 1e-12));
}

std::vector<double> grid_for(const RunConfig& cfg, const std::string& name)
{
    if (cfg.t) return {*cfg.t};
    if (cfg.t_grid) return cfg.t_grid->points();
    if (name == "haar") return make_grid(0.5, 2.0, 3, true);
    return make_grid(0.05, 0.5, 12, true);
}

} // namespace

ExperimentResult run_experiment(const std::string& name, const RunConfig& cfg)
{
    ExperimentResult r;
    r.name = name;
    r.q = cfg.q;
    r.lmax_doubled = cfg.lmax_doubled.value_or(default_lmax_doubled(name));
    r.precision_bits = cfg.precision_bits;
    r.seed = cfg.seed;
    try {
        if (name == "validate") run_validate(cfg, r);
        else if (name == "haar") run_haar(cfg, grid_for(cfg, name), r);
        else if (name == "commutators") run_commutators(cfg, r);
        else if (name == "heat") run_heat(cfg, grid_for(cfg, name), r);
        else if (name == "modular") run_modular(cfg, r);
        else throw ConfigError("experiment: unknown experiment '" + name + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        r.criteria.push_back({name + ".run", false, std::string("error: ") + e.what()});
        if (r.table.columns.empty()) r.table.columns = {"message"};
        std::vector<Cell> cells(r.table.columns.size());
        cells.emplace_back(std::string("error: ") + e.what());
        r.table.rows.push_back(std::move(cells));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string format_real(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string format_cell(const Cell& c)
{
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_real(v); }
        std::string operator()(const std::string& v) const { return csv_escape(v); }
    };
    return std::visit(Visitor{}, c);
}

std::vector<std::string> provenance_columns() { return {"q", "lmax_doubled", "precision_bits", "seed", "version"}; }

std::vector<Cell> provenance(const ExperimentResult& r)
{
    return {r.q, static_cast<long long>(r.lmax_doubled), static_cast<long long>(r.precision_bits),
            std::to_string(r.seed), std::string(version())};
}

std::vector<std::string> full_columns(const ExperimentResult& r)
{
    std::vector<std::string> cols = r.table.columns;
    for (auto& c : provenance_columns()) cols.push_back(c);
    cols.emplace_back("status");
    return cols;
}

// Row layout in Table: data cells followed by the status string.
std::vector<Cell> full_row(const ExperimentResult& r, const std::vector<Cell>& row)
{
    std::vector<Cell> out(row.begin(), row.end() - 1);
    for (auto& c : provenance(r)) out.push_back(c);
    out.push_back(row.back());
    return out;
}

} // namespace

void write_csv(const ExperimentResult& result, std::ostream& os)
{
    const auto cols = full_columns(result);
    for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << csv_escape(cols[k]);
    os << '\n';
    for (const auto& row : result.table.rows) {
        const auto cells = full_row(result, row);
        for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << format_cell(cells[k]);
        os << '\n';
    }
}

void write_json(const ExperimentResult& result, std::ostream& os)
{
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["experiment"] = result.name;
    doc["columns"] = full_columns(result);
    ordered_json rows = ordered_json::array();
    const auto cols = full_columns(result);
    for (const auto& row : result.table.rows) {
        const auto cells = full_row(result, row);
        ordered_json obj = ordered_json::object();
        for (std::size_t k = 0; k < cells.size(); ++k) {
            struct Visitor {
                ordered_json operator()(std::monostate) const { return nullptr; }
                ordered_json operator()(long long v) const { return v; }
                ordered_json operator()(double v) const
                {
                    if (std::isfinite(v)) return v;
                    return format_real(v);
                }
                ordered_json operator()(const std::string& v) const { return v; }
            };
            obj[cols[k]] = std::visit(Visitor{}, cells[k]);
        }
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    ordered_json crit = ordered_json::array();
    for (const auto& c : result.criteria)
        crit.push_back({{"name", c.name}, {"status", c.pass ? "PASS" : "FAIL"}, {"measured", c.measured}});
    doc["criteria"] = std::move(crit);
    os << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Command line

namespace {

// Targets of options that need post-processing after the parse.
struct Bindings {
    int lmax = -1;
    double t = 0.0;
    std::string grid;
    bool linear = false;
    std::string format = "csv";
    CLI::Option* lmax_opt = nullptr;
    CLI::Option* t_opt = nullptr;
    CLI::Option* grid_opt = nullptr;
};

std::unique_ptr<CLI::App> make_app(RunConfig& cfg, Bindings& b)
{
    auto app = std::make_unique<CLI::App>("Numerical experiments on the quantum group SU_q(2)", "qsu2");
    app->set_config("--config", "", "Read options from a file of key=value lines");
    std::vector<std::string> choices = experiments();
    choices.emplace_back("all");
    app->add_option("experiment", cfg.experiment, "validate | haar | commutators | heat | modular | all")
        ->check(CLI::IsMember(choices));
    app->add_option("--q", cfg.q, "Deformation parameter q (> 0, != 1)");
    b.lmax_opt = app->add_option("--lmax", b.lmax, "Truncation spin as a doubled integer (24 means Lmax = 12)");
    b.t_opt = app->add_option("--t", b.t, "Single heat time t > 0");
    b.grid_opt = app->add_option("--t-grid", b.grid, "Heat times as start:stop:count");
    app->add_flag("--linear", b.linear, "Space the t-grid linearly instead of logarithmically");
    app->add_option("--tol", cfg.tolerance, "Relative tolerance of operator-norm iterations");
    app->add_option("--seed", cfg.seed, "Seed of iteration start vectors and random rewrite orders");
    app->add_option("--precision-bits", cfg.precision_bits, "53 (double) or 64 (long double) for heat sums")
        ->envname("QSU2_PRECISION_BITS");
    app->add_option("--out", cfg.out, "Output file, '-' for standard output, or directory for 'all'");
    app->add_option("--format", b.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--oracle-levels", cfg.oracle_levels, "Ladder levels K of the representation oracle");
    app->set_version_flag("--version", std::string(version()));
    return app;
}

void finish(RunConfig& cfg, const Bindings& b)
{
    if (b.lmax_opt->count()) cfg.lmax_doubled = b.lmax;
    if (b.t_opt->count()) cfg.t = b.t;
    if (b.grid_opt->count()) cfg.t_grid = TGrid::parse(b.grid, !b.linear);
    cfg.format = b.format == "json" ? Format::Json : Format::Csv;
    cfg.validate();
}

} // namespace

RunConfig parse_args(int argc, const char* const* argv)
{
    RunConfig cfg;
    Bindings b;
    auto app = make_app(cfg, b);
    try {
        app->parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }
    finish(cfg, b);
    return cfg;
}

namespace {

void write_result(const ExperimentResult& r, const RunConfig& cfg, const std::filesystem::path& path,
                  std::ostream& out)
{
    auto emit = [&](std::ostream& os) {
        if (cfg.format == Format::Json) write_json(r, os);
        else write_csv(r, os);
    };
    if (path == "-") {
        emit(out);
        return;
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("out: cannot open '" + path.string() + "' for writing");
    emit(f);
}

void summarize(const ExperimentResult& r, std::ostream& out)
{
    for (const Criterion& c : r.criteria) out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.measured << '\n';
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    Bindings bindings;
    auto app = make_app(cfg, bindings);
    try {
        app->parse(argc, argv);
        finish(cfg, bindings);
    } catch (const CLI::CallForHelp&) {
        out << app->help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << version() << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    }

    const std::string ext = cfg.format == Format::Json ? ".json" : ".csv";
    std::vector<std::string> names;
    if (cfg.experiment == "all") names = experiments();
    else names = {cfg.experiment};

    bool all_pass = true;
    try {
        for (const std::string& name : names) {
            const ExperimentResult r = run_experiment(name, cfg);
            std::filesystem::path path;
            if (cfg.experiment == "all") path = std::filesystem::path(cfg.out.empty() ? "qsu2_results" : cfg.out) / (name + ext);
            else path = cfg.out.empty() ? std::filesystem::path(name + ext) : std::filesystem::path(cfg.out);
            write_result(r, cfg, path, out);
            summarize(r, out);
            all_pass = all_pass && r.passed();
        }
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return all_pass ? 0 : 1;
}

} // namespace cli
} // namespace qsu2
