#include "qsu2/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "qsu2/errors.hpp"
#include "qsu2/qarith.hpp"

namespace qsu2 {

double GrowthSeries::relative_residual() const
{
    if (values.empty()) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += std::abs(v);
    mean /= static_cast<double>(values.size());
    return mean == 0.0 ? 0.0 : residual / mean;
}

GrowthSeries GrowthSeries::fit(std::vector<double> parameters, std::vector<double> values)
{
    if (parameters.size() != values.size() || parameters.size() < 3)
        throw InvalidParameter("GrowthSeries: need at least three (parameter, value) pairs of equal length");
    GrowthSeries g;
    g.parameters = std::move(parameters);
    g.values = std::move(values);
    const auto n = static_cast<double>(g.values.size());
    const double mx = std::accumulate(g.parameters.begin(), g.parameters.end(), 0.0) / n;
    const double my = std::accumulate(g.values.begin(), g.values.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < g.values.size(); ++k) {
        sxx += (g.parameters[k] - mx) * (g.parameters[k] - mx);
        sxy += (g.parameters[k] - mx) * (g.values[k] - my);
    }
    g.slope = sxx == 0.0 ? 0.0 : sxy / sxx;
    g.intercept = my - g.slope * mx;
    double ss = 0.0;
    for (std::size_t k = 0; k < g.values.size(); ++k) {
        const double r = g.values[k] - (g.slope * g.parameters[k] + g.intercept);
        ss += r * r;
    }
    g.residual = std::sqrt(ss / n);
    return g;
}

// ---------------------------------------------------------------------------
// Norms

namespace {

Eigen::Index restricted_columns(const SparseOperator& op, HalfInteger shell)
{
    if (shell.doubled() < 0) throw InvalidParameter("shell_norm: shell must be >= 0");
    if (shell + op.shell_depth() > op.truncation().lmax())
        throw InvalidParameter("shell_norm: shell " + shell.str() + " + depth " + op.shell_depth().str() +
                               " exceeds lmax " + op.truncation().lmax().str());
    return static_cast<Eigen::Index>(Truncation::offset(shell + kHalf));
}

// Column selection of the restriction to spins <= shell, in every copy.
std::vector<Eigen::Index> restricted_positions(const SparseOperator& op, Eigen::Index per_copy)
{
    const auto n = static_cast<Eigen::Index>(op.truncation().dimension());
    std::vector<Eigen::Index> pos;
    for (int c = 0; c < op.copies(); ++c)
        for (Eigen::Index k = 0; k < per_copy; ++k) pos.push_back(c * n + k);
    return pos;
}

} // namespace

namespace {

// Connected components of the sparsity graph of a square Hermitian matrix,
// each listed in increasing index order.
std::vector<std::vector<Eigen::Index>> components(const SparseMatrix& g)
{
    const Eigen::Index n = g.rows();
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (Eigen::Index c = 0; c < g.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(g, c); it; ++it) {
            const Eigen::Index a = find(it.row()), b = find(c);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    std::vector<std::vector<Eigen::Index>> out;
    std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index root = find(k);
        if (slot[root] < 0) {
            slot[root] = static_cast<Eigen::Index>(out.size());
            out.emplace_back();
        }
        out[slot[root]].push_back(k);
    }
    return out;
}

SparseMatrix principal_block(const SparseMatrix& g, const std::vector<Eigen::Index>& idx,
                             std::vector<Eigen::Index>& local)
{
    for (std::size_t k = 0; k < idx.size(); ++k) local[idx[k]] = static_cast<Eigen::Index>(k);
    std::vector<Eigen::Triplet<Complex, Eigen::Index>> trip;
    for (Eigen::Index c : idx)
        for (SparseMatrix::InnerIterator it(g, c); it; ++it) trip.emplace_back(local[it.row()], local[c], it.value());
    const auto m = static_cast<Eigen::Index>(idx.size());
    SparseMatrix b(m, m);
    b.setFromTriplets(trip.begin(), trip.end());
    return b;
}

double gershgorin_bound(const SparseMatrix& b)
{
    double best = 0.0;
    for (Eigen::Index c = 0; c < b.outerSize(); ++c) {
        double col = 0.0;
        for (SparseMatrix::InnerIterator it(b, c); it; ++it) col += std::abs(it.value());
        best = std::max(best, col);
    }
    return best;
}

// Largest eigenvalue of a Hermitian positive semidefinite block from the
// Krylov space of its power sequence x, Gx, G^2 x, ... (Lanczos with full
// reorthogonalisation). Stops once the Ritz residual falls below
// tolerance * theta or the space becomes invariant.
double top_eigenvalue(const SparseMatrix& g, std::mt19937_64& rng, const PowerIterationOptions& opts)
{
    const Eigen::Index n = g.rows();
    std::normal_distribution<double> gauss;
    ComplexVector x(n);
    for (Eigen::Index k = 0; k < n; ++k) x[k] = gauss(rng);
    x.normalize();

    const Eigen::Index cap = std::min<Eigen::Index>(n, opts.max_iterations);
    Eigen::MatrixXcd basis(n, cap);
    std::vector<double> alpha, beta;
    double theta = 0.0;
    for (Eigen::Index k = 0; k < cap; ++k) {
        basis.col(k) = x;
        ComplexVector w = g * x;
        alpha.push_back(x.dot(w).real());
        for (int pass = 0; pass < 2; ++pass)
            w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).adjoint() * w);
        const double b = w.norm();

        const auto m = static_cast<Eigen::Index>(alpha.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index r = 0; r < m; ++r) {
            t(r, r) = alpha[r];
            if (r + 1 < m) t(r, r + 1) = t(r + 1, r) = beta[r];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        theta = es.eigenvalues()[m - 1];
        const double ritz_residual = b * std::abs(es.eigenvectors()(m - 1, m - 1));
        if (theta <= 0.0 || ritz_residual <= opts.tolerance * theta || b <= 1e-14 * std::max(theta, 1.0) ||
            m == n)
            return std::max(theta, 0.0);
        beta.push_back(b);
        x = w / b;
    }
    throw NonConvergence("shell_norm: no convergence in " + std::to_string(opts.max_iterations) + " iterations",
                         std::sqrt(std::max(theta, 0.0)));
}

} // namespace

// op* op restricted to the shell splits into blocks for the sparsity patterns
// that arise here (each letter shifts (i, j) by a fixed amount), and the top
// of the spectrum is tightly clustered: at shell 8 for t~_{1/2,1/2} the two
// largest eigenvalues agree to 2e-5. Plain power iteration stalls on such a
// gap, so each block is handled by top_eigenvalue. Blocks whose Gershgorin
// bound cannot exceed the running maximum are skipped.
double shell_norm(const SparseOperator& op, HalfInteger shell, const PowerIterationOptions& opts)
{
    const Eigen::Index per_copy = restricted_columns(op, shell);
    const auto positions = restricted_positions(op, per_copy);
    const SparseMatrix& m = op.matrix();

    std::vector<Eigen::Triplet<Complex, Eigen::Index>> sel;
    for (std::size_t k = 0; k < positions.size(); ++k)
        sel.emplace_back(positions[k], static_cast<Eigen::Index>(k), Complex(1.0));
    SparseMatrix select(m.cols(), static_cast<Eigen::Index>(positions.size()));
    select.setFromTriplets(sel.begin(), sel.end());
    const SparseMatrix restricted = m * select;
    const SparseMatrix gram = SparseMatrix(restricted.adjoint() * restricted).pruned();

    struct Block {
        SparseMatrix g;
        double bound;
    };
    std::vector<Block> blocks;
    std::vector<Eigen::Index> local(static_cast<std::size_t>(gram.rows()), -1);
    for (const auto& idx : components(gram)) {
        SparseMatrix b = principal_block(gram, idx, local);
        const double bound = gershgorin_bound(b);
        if (bound > 0.0) blocks.push_back({std::move(b), bound});
    }
    std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) { return a.bound > b.bound; });

    std::mt19937_64 rng(opts.seed);
    double best = 0.0;
    for (const Block& blk : blocks) {
        if (blk.bound <= best) break;
        best = std::max(best, top_eigenvalue(blk.g, rng, opts));
    }
    return std::sqrt(best);
}

double dense_shell_norm(const SparseOperator& op, HalfInteger shell)
{
    const Eigen::Index per_copy = restricted_columns(op, shell);
    const auto positions = restricted_positions(op, per_copy);
    if (positions.size() > 500) throw InvalidParameter("dense_shell_norm: restriction larger than 500 columns");
    const SparseMatrix& m = op.matrix();

    // Only the rows hit by the selected columns matter.
    std::vector<Eigen::Index> row_slot(static_cast<std::size_t>(m.rows()), -1);
    Eigen::Index rows = 0;
    for (Eigen::Index c : positions)
        for (SparseMatrix::InnerIterator it(m, c); it; ++it)
            if (row_slot[it.row()] < 0) row_slot[it.row()] = rows++;
    Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(std::max<Eigen::Index>(rows, 1),
                                                    static_cast<Eigen::Index>(positions.size()));
    for (std::size_t k = 0; k < positions.size(); ++k)
        for (SparseMatrix::InnerIterator it(m, positions[k]); it; ++it)
            dense(row_slot[it.row()], static_cast<Eigen::Index>(k)) += it.value();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dense);
    return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

SparseOperator absD_commutator(const SparseOperator& a)
{
    const SparseOperator absd = SparseOperator::diagonal(
        a.truncation(), [](const PWIndex& idx) { return Complex(idx.n.value() + 0.5); }, a.copies());
    SparseMatrix comm = absd.matrix() * a.matrix() - a.matrix() * absd.matrix();
    return {a.truncation(), comm.pruned(), a.shell_depth(), a.copies()};
}

double absD_commutator_cap(HalfInteger n0, double a_norm)
{
    return std::sqrt(2.0 * n0.value() + 1.0) * n0.value() * a_norm;
}

CommutatorSeries absD_commutator_series(const NCPolynomial& a, const std::vector<HalfInteger>& shells,
                                        const GeneratorTable& table, const PowerIterationOptions& opts)
{
    if (shells.empty()) throw InvalidParameter("absD_commutator_series: no shells");
    for (std::size_t k = 1; k < shells.size(); ++k)
        if (!(shells[k - 1] < shells[k])) throw InvalidParameter("absD_commutator_series: shells must increase");

    const SparseOperator op = mult_operator(a, table);
    const SparseOperator comm = absD_commutator(op);
    std::vector<double> params, values;
    for (HalfInteger s : shells) {
        params.push_back(s.value());
        values.push_back(shell_norm(comm, s, opts));
    }
    CommutatorSeries out;
    out.a_norm = shell_norm(op, shells.back(), opts);
    out.cap = absD_commutator_cap(a.shell_depth(), out.a_norm);
    if (values.size() >= 3) out.series = GrowthSeries::fit(std::move(params), std::move(values));
    else {
        out.series.parameters = std::move(params);
        out.series.values = std::move(values);
    }
    return out;
}

GrowthSeries trueD_growth(const NCPolynomial& a, const std::vector<HalfInteger>& l_list, const GeneratorTable& table,
                          DiracKind kind)
{
    const Truncation& trunc = table.truncation();
    const double q = table.q();
    std::vector<double> params, values;
    for (HalfInteger l : l_list) {
        if (l + a.shell_depth() > trunc.lmax())
            throw InvalidParameter("trueD_growth: l + depth(a) exceeds lmax at l = " + l.str());
        const SpinorVector v = v_vector({l, l, -l - kHalf, Branch::Plus}, q, trunc);
        auto act = [&](const SpinorVector& x) {
            return SpinorVector(apply_polynomial(a, table, x.plus), apply_polynomial(a, table, x.minus));
        };
        const SpinorVector w = dirac_apply(kind, act(v), q) - act(dirac_apply(kind, v, q));
        params.push_back(l.value());
        values.push_back(w.norm() / v.norm());
    }
    return GrowthSeries::fit(std::move(params), std::move(values));
}

// ---------------------------------------------------------------------------
// Heat traces

double heat_exponent(double q)
{
    const double lq = std::log(q);
    return 4.0 * lq * lq;
}

double laplace_peak(double q, double t) { return 4.0 * std::abs(std::log(q)) / t; }

namespace {

template <typename Real>
struct LogSum {
    // Neumaier-compensated sum of exp(log_term - shift), tracking the shift.
    std::vector<Real> logs;
    void add(Real log_term) { logs.push_back(log_term); }
    Real log_total() const
    {
        if (logs.empty()) return -std::numeric_limits<Real>::infinity();
        const Real shift = *std::max_element(logs.begin(), logs.end());
        Real sum = 0, comp = 0;
        for (Real l : logs) {
            const Real term = std::exp(l - shift);
            const Real t = sum + term;
            if (std::abs(sum) >= std::abs(term)) comp += (sum - t) + term;
            else comp += (term - t) + sum;
            sum = t;
        }
        return shift + std::log(sum + comp);
    }
};

template <typename Real>
Real log_qnum(Real r, Real q)
{
    return static_cast<Real>(log_q_number(static_cast<double>(r), static_cast<double>(q)));
}

// 2 sum_{m=1}^{m_max} [m]_q^2 e^{-t (m + shift)^2 / 4}, log domain. m_max < 0 sums to convergence.
template <typename Real>
Real log_series(Real q, Real t, int shift, long m_max, bool spinor_factor, bool q_weighted)
{
    LogSum<Real> acc;
    const Real peak = static_cast<Real>(laplace_peak(static_cast<double>(q), static_cast<double>(t)));
    for (long m = 1;; ++m) {
        if (m_max >= 0 && m > m_max) break;
        const Real mm = static_cast<Real>(m);
        const Real weight = q_weighted ? 2 * log_qnum(mm, q) : 2 * std::log(mm);
        const Real arg = (mm + shift) / 2;
        const Real term = weight - t * arg * arg + (spinor_factor ? std::log(Real(2)) : Real(0));
        acc.add(term);
        if (m_max < 0 && mm > peak + 2 && mm > 2) {
            // beyond the peak, stop once terms are negligible against the running maximum
            const Real best = *std::max_element(acc.logs.begin(), acc.logs.end());
            if (term < best - Real(80)) break;
        }
    }
    return acc.log_total();
}

// Upper bound on 2 sum_{m > M} [m]_q^2 e^{-t m^2 / 4}.
double heat_tail_bound(double q, double t, long M)
{
    const double qq = q > 1.0 ? q : 1.0 / q;
    const double lq = std::log(qq);
    const double denom = (qq - 1.0 / qq) * (qq - 1.0 / qq);
    const double peak = laplace_peak(qq, t);
    const double k_over_t = heat_exponent(qq) / t;
    // integral of q^{2x} e^{-t x^2/4} over [M, inf)
    const double integral = std::exp(k_over_t) * std::sqrt(M_PI / t) * std::erfc(0.5 * std::sqrt(t) * (M - peak));
    const double x = std::max(static_cast<double>(M), peak);
    const double maximum = std::exp(2.0 * x * lq - 0.25 * t * x * x);
    return 2.0 * (integral + maximum) / denom;
}

template <typename Real>
HeatTraceReport heat_trace_impl(double t, double q, const Truncation& trunc)
{
    HeatTraceReport r;
    r.t = t;
    r.k_exponent = heat_exponent(q);
    const long M = trunc.lmax().doubled() + 1;
    const Real qr = static_cast<Real>(q), tr = static_cast<Real>(t);
    r.operator_trace = static_cast<double>(std::exp(log_series<Real>(qr, tr, 0, M, true, true)));
    r.closed_sum = static_cast<double>(std::exp(log_series<Real>(qr, tr, 0, -1, true, true)));
    r.printed_series = static_cast<double>(std::exp(log_series<Real>(qr, tr, 1, -1, false, true)));
    r.tail_bound = heat_tail_bound(q, t, M);
    return r;
}

} // namespace

HeatTraceReport heat_trace(double t, double q, const Truncation& trunc, int precision_bits)
{
    if (!(t > 0.0)) throw InvalidParameter("heat_trace: t must be positive");
    DeformationParameter checked(q, precision_bits);
    if (precision_bits == 64) return heat_trace_impl<long double>(t, q, trunc);
    return heat_trace_impl<double>(t, q, trunc);
}

double plain_heat_trace(double t, const Truncation& trunc, int precision_bits)
{
    if (!(t > 0.0)) throw InvalidParameter("plain_heat_trace: t must be positive");
    const long M = trunc.lmax().doubled() + 1;
    if (precision_bits == 64)
        return static_cast<double>(std::exp(log_series<long double>(2.0L, t, 0, M, true, false)));
    return std::exp(log_series<double>(2.0, t, 0, M, true, false));
}

// ---------------------------------------------------------------------------
// Trace functionals

namespace {

struct BlockTraces {
    std::vector<HalfInteger> spins;
    std::vector<Complex> weighted_diag;  // sum_{i,j} q^{-2i-2j} <t~, a t~> per spin
    std::vector<double> log_unit;        // log [2n+1]_q^2 per spin
};

BlockTraces block_traces(const NCPolynomial& a, const GeneratorTable& table)
{
    const Truncation& trunc = table.truncation();
    const double q = table.q();
    const SparseOperator op = mult_operator(a, table);
    const HalfInteger exact = op.safe_shell();
    BlockTraces b;
    for (int n2 = 0; n2 <= exact.doubled(); ++n2) {
        const HalfInteger n = HalfInteger::from_doubled(n2);
        Complex acc{};
        for (int i2 = -n2; i2 <= n2; i2 += 2)
            for (int j2 = -n2; j2 <= n2; j2 += 2) {
                const PWIndex idx{n, HalfInteger::from_doubled(i2), HalfInteger::from_doubled(j2)};
                const auto k = static_cast<Eigen::Index>(trunc.index_of(idx));
                acc += rho_weight(idx, q) * op.matrix().coeff(k, k);
            }
        b.spins.push_back(n);
        b.weighted_diag.push_back(acc);
        b.log_unit.push_back(2.0 * log_q_number(n2 + 1.0, q));
    }
    return b;
}

} // namespace

TraceRatio haar_via_heat(const NCPolynomial& a, double t, const GeneratorTable& table)
{
    if (!(t > 0.0)) throw InvalidParameter("haar_via_heat: t must be positive");
    const BlockTraces b = block_traces(a, table);
    // common scale: the largest unit-trace term
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < b.spins.size(); ++k) {
        const double e = b.spins[k].value() + 0.5;
        shift = std::max(shift, b.log_unit[k] - t * e * e);
    }
    Complex num{};
    double den = 0.0;
    for (std::size_t k = 0; k < b.spins.size(); ++k) {
        const double e = b.spins[k].value() + 0.5;
        const double w = std::exp(-t * e * e - shift);
        num += 2.0 * w * b.weighted_diag[k];
        den += 2.0 * w * std::exp(b.log_unit[k]);
    }
    TraceRatio r;
    r.ratio = num / den;
    r.trace = num * std::exp(shift);
    r.unit_trace = den * std::exp(shift);
    const long last_m = b.spins.back().doubled() + 1;
    const double tail = heat_tail_bound(table.q(), t, last_m);
    r.tail_bound = (a.coefficient_l1() + std::abs(r.ratio)) * tail / r.unit_trace;
    return r;
}

TraceRatio rho_trace_functional(const NCPolynomial& a, const std::function<double(HalfInteger)>& multiplier,
                                const GeneratorTable& table, double tail_tolerance)
{
    const BlockTraces b = block_traces(a, table);
    Complex num{};
    double den = 0.0;
    for (std::size_t k = 0; k < b.spins.size(); ++k) {
        const double lam = multiplier(b.spins[k]);
        num += lam * b.weighted_diag[k];
        den += lam * std::exp(b.log_unit[k]);
    }
    // neglected spins: sum forward until the terms are negligible
    double tail = 0.0;
    HalfInteger n = b.spins.back() + kHalf;
    double previous = std::numeric_limits<double>::infinity();
    for (int step = 0; step < 4000; ++step, n += kHalf) {
        const double term = std::abs(multiplier(n)) * std::exp(2.0 * log_q_number(n.doubled() + 1.0, table.q()));
        tail += term;
        if (term < 1e-30 * (den + tail) && term <= previous) break;
        previous = term;
    }
    if (!(tail <= tail_tolerance * den))
        throw TailTooLarge("rho_trace_functional: neglected spins carry relative weight " + std::to_string(tail / den));
    TraceRatio r;
    r.ratio = num / den;
    r.trace = num;
    r.unit_trace = den;
    r.tail_bound = (a.coefficient_l1() + std::abs(r.ratio)) * tail / den;
    return r;
}

SparseOperator modular_conjugate(const SparseOperator& op, double q)
{
    const SparseOperator rho = rho_operator(op.truncation(), q, op.copies());
    const SparseOperator rho_inv = SparseOperator::diagonal(
        op.truncation(), [q](const PWIndex& idx) { return Complex(1.0 / rho_weight(idx, q)); }, op.copies());
    SparseMatrix conj = rho.matrix() * op.matrix() * rho_inv.matrix();
    return {op.truncation(), std::move(conj), op.shell_depth(), op.copies()};
}

double modular_check(const NCPolynomial& a, const NCPolynomial& b, const GeneratorTable& table)
{
    const Truncation& trunc = table.truncation();
    const double q = table.q();
    if (HalfInteger::from_doubled(a.degree() + b.degree()) > trunc.lmax())
        throw EmptySafeShell("modular_check: combined degree exceeds the truncation");
    const PWIndex vac{};
    const HilbertVector e0 = HilbertVector::basis_vector(trunc, vac);
    const Complex lhs = apply_polynomial(a, table, apply_polynomial(b, table, e0))[vac];
    // Psi(a) e0 = rho a rho^{-1} e0 and rho^{-1} e0 = e0
    const HilbertVector psi_a = rho_apply(apply_polynomial(a, table, e0), q);
    const Complex rhs = apply_polynomial(b, table, psi_a)[vac];
    return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------

std::vector<BandPoint> asymptotic_band(double q, const std::vector<double>& t_grid, const Truncation& trunc,
                                       int precision_bits)
{
    std::vector<BandPoint> out;
    const double k = heat_exponent(q);
    for (double t : t_grid) {
        if (!(t > 0.0)) throw InvalidParameter("asymptotic_band: t must be positive");
        const double peak = laplace_peak(q, t);
        if (trunc.lmax().doubled() < 4.0 * peak)
            throw PeakOutsideTruncation("asymptotic_band: Laplace peak m* = " + std::to_string(peak) + " at t = " +
                                        std::to_string(t) + " needs 2 lmax >= " + std::to_string(4.0 * peak));
        BandPoint p;
        p.t = t;
        p.peak = peak;
        p.trace = heat_trace(t, q, trunc, precision_bits).operator_trace;
        p.s = std::sqrt(t) * std::exp(-k / t) * p.trace;
        p.plain_trace = plain_heat_trace(t, trunc, precision_bits);
        p.s_plain = std::sqrt(t) * std::exp(-k / t) * p.plain_trace;
        p.classical = std::pow(t, 1.5) * p.plain_trace;
        out.push_back(p);
    }
    return out;
}

std::vector<double> make_grid(double start, double stop, int count, bool log_spaced)
{
    if (count < 1) throw InvalidParameter("make_grid: count must be >= 1");
    if (log_spaced && !(start > 0.0 && stop > 0.0)) throw InvalidParameter("make_grid: log grid needs positive ends");
    std::vector<double> out;
    for (int k = 0; k < count; ++k) {
        const double f = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
        if (k == 0) out.push_back(start);
        else if (k == count - 1) out.push_back(stop);
        else out.push_back(log_spaced ? start * std::pow(stop / start, f) : start + f * (stop - start));
    }
    return out;
}

} // namespace qsu2
