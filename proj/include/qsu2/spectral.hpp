#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qsu2/algebra.hpp"
#include "qsu2/dirac.hpp"
#include "qsu2/peterweyl.hpp"

namespace qsu2 {

/// Measured values against a parameter, with an affine least-squares fit.
struct GrowthSeries {
    std::vector<double> parameters;
    std::vector<double> values;
    double slope = 0.0;
    double intercept = 0.0;
    /// Root-mean-square deviation from the affine fit.
    double residual = 0.0;

    /// residual / mean |value| (0 when all values vanish).
    double relative_residual() const;

    static GrowthSeries fit(std::vector<double> parameters, std::vector<double> values);
};

struct PowerIterationOptions {
    double tolerance = 1e-8;
    int max_iterations = 200;
    std::uint64_t seed = 20240601;
};

/// Operator norm of `op` restricted to vectors supported on spins <= shell,
/// by power iteration on op* op from a seeded random start. Requires
/// shell + op.shell_depth() <= lmax. Throws NonConvergence when the relative
/// change of the estimate is still above tolerance after max_iterations.
double shell_norm(const SparseOperator& op, HalfInteger shell, const PowerIterationOptions& opts = {});

/// Same quantity from a dense singular value decomposition; only for
/// restrictions with at most 500 columns.
double dense_shell_norm(const SparseOperator& op, HalfInteger shell);

/// [A, a] on h, where A = diag(n + 1/2). [|D|, I_2 (x) a] is I_2 (x) of this.
SparseOperator absD_commutator(const SparseOperator& a);

/// sqrt(2 n0 + 1) * n0 * C: the bound on ||[|D|, a]|| for a of top spin n0 and norm C.
double absD_commutator_cap(HalfInteger n0, double a_norm);

struct CommutatorSeries {
    GrowthSeries series;
    /// ||a|| measured at the largest shell.
    double a_norm = 0.0;
    double cap = 0.0;
};

/// shell_norm([|D|, a], shell) for each shell.
CommutatorSeries absD_commutator_series(const NCPolynomial& a, const std::vector<HalfInteger>& shells,
                                        const GeneratorTable& table, const PowerIterationOptions& opts = {});

/// || [D, I_2 (x) a] v^{l,+}_{l,-l-1/2} || for each l (the vector has unit norm).
/// With kind = Abs the same vectors are fed through [|D|, a] instead.
GrowthSeries trueD_growth(const NCPolynomial& a, const std::vector<HalfInteger>& l_list, const GeneratorTable& table,
                          DiracKind kind = DiracKind::True);

/// k = 4 (ln q)^2, the exponent of the small-t growth exp(k/t) of Tr(R e^{-tD^2}).
double heat_exponent(double q);
/// Location m* = 4 ln q / t of the maximum of [m]_q^2 e^{-t m^2/4} (m = 2l + 1).
double laplace_peak(double q, double t);

struct HeatTraceReport {
    double t = 0.0;
    /// 2 sum_{m >= 1} [m]_q^2 e^{-t m^2/4}, summed to convergence.
    double closed_sum = 0.0;
    /// 2 sum_{l <= lmax} [2l+1]_q^2 e^{-t (l+1/2)^2}, the trace over the truncation.
    double operator_trace = 0.0;
    /// Upper bound on closed_sum - operator_trace.
    double tail_bound = 0.0;
    double k_exponent = 0.0;
    /// sum_{m >= 1} [m]_q^2 e^{-t ((m+1)/2)^2}, the series with shifted index and no spinor factor.
    double printed_series = 0.0;
};

/// Sums are evaluated in log space with compensated accumulation; with
/// precision_bits = 64 they are carried in long double.
HeatTraceReport heat_trace(double t, double q, const Truncation& trunc, int precision_bits = 53);

/// 2 sum_{l <= lmax} (2l+1)^2 e^{-t (l+1/2)^2} = Tr(e^{-tD^2}) without R.
double plain_heat_trace(double t, const Truncation& trunc, int precision_bits = 53);

struct TraceRatio {
    Complex ratio;
    Complex trace;
    double unit_trace = 0.0;
    /// Bound on |ratio - (ratio over the infinite space)| from spins beyond the exact range.
    double tail_bound = 0.0;
};

/// Tr(a R e^{-tD^2}) / Tr(R e^{-tD^2}) over C^2 (x) h.
TraceRatio haar_via_heat(const NCPolynomial& a, double t, const GeneratorTable& table);

/// Tr(a rho B) / Tr(rho B) on h, for B = diag(multiplier(n)). Throws
/// TailTooLarge when the neglected spins carry more than tail_tolerance
/// of Tr(rho B).
TraceRatio rho_trace_functional(const NCPolynomial& a, const std::function<double(HalfInteger)>& multiplier,
                                const GeneratorTable& table, double tail_tolerance = 1e-10);

/// rho op rho^{-1}.
SparseOperator modular_conjugate(const SparseOperator& op, double q);

/// |psi(ab) - psi(b Psi(a))| with Psi(a) = rho a rho^{-1}.
double modular_check(const NCPolynomial& a, const NCPolynomial& b, const GeneratorTable& table);

struct BandPoint {
    double t = 0.0;
    double trace = 0.0;
    double s = 0.0;
    double peak = 0.0;
    /// Tr(e^{-tD^2}) and its scalings by t^{1/2} e^{-k/t} and t^{3/2}.
    double plain_trace = 0.0;
    double s_plain = 0.0;
    double classical = 0.0;
};

/// s(t) = t^{1/2} e^{-k/t} Tr(R e^{-tD^2}) over the grid. Throws
/// PeakOutsideTruncation unless 2 lmax >= 4 m*(t) for every t.
std::vector<BandPoint> asymptotic_band(double q, const std::vector<double>& t_grid, const Truncation& trunc,
                                       int precision_bits = 53);

/// n log-spaced (or linearly spaced) points from start to stop inclusive.
std::vector<double> make_grid(double start, double stop, int count, bool log_spaced);

} // namespace qsu2
