#include "qsu2/dirac.hpp"

#include <algorithm>
#include <cmath>

#include "qsu2/errors.hpp"

namespace qsu2 {

double SpinorVector::norm() const { return std::sqrt(plus.coeffs().squaredNorm() + minus.coeffs().squaredNorm()); }

ComplexVector SpinorVector::stacked() const
{
    ComplexVector out(plus.coeffs().size() * 2);
    out << plus.coeffs(), minus.coeffs();
    return out;
}

SpinorVector SpinorVector::from_stacked(const Truncation& trunc, const ComplexVector& v)
{
    const auto n = static_cast<Eigen::Index>(trunc.dimension());
    if (v.size() != 2 * n) throw InvalidParameter("SpinorVector::from_stacked: size mismatch");
    return {HilbertVector(trunc, v.head(n)), HilbertVector(trunc, v.tail(n))};
}

SpinorVector& SpinorVector::operator+=(const SpinorVector& o)
{
    plus.coeffs() += o.plus.coeffs();
    minus.coeffs() += o.minus.coeffs();
    return *this;
}

SpinorVector& SpinorVector::operator-=(const SpinorVector& o)
{
    plus.coeffs() -= o.plus.coeffs();
    minus.coeffs() -= o.minus.coeffs();
    return *this;
}

SpinorVector operator*(Complex s, SpinorVector v)
{
    v.plus.coeffs() *= s;
    v.minus.coeffs() *= s;
    return v;
}

bool VIndex::valid() const noexcept
{
    if (l.doubled() < 0 || abs(i) > l || !(l - i).is_integral()) return false;
    if (!(l + kHalf - j).is_integral()) return false;
    if (sign == Branch::Plus) return abs(j) <= l + kHalf;
    return l.doubled() >= 1 && abs(j) <= l - kHalf;
}

std::vector<VIndex> v_labels(HalfInteger l)
{
    std::vector<VIndex> out;
    for (int i2 = -l.doubled(); i2 <= l.doubled(); i2 += 2)
        for (int j2 = -l.doubled() - 1; j2 <= l.doubled() + 1; j2 += 2)
            for (Branch s : {Branch::Plus, Branch::Minus}) {
                VIndex v{l, HalfInteger::from_doubled(i2), HalfInteger::from_doubled(j2), s};
                if (v.valid()) out.push_back(v);
            }
    return out;
}

std::vector<VIndex> v_labels(const Truncation& trunc)
{
    std::vector<VIndex> out;
    for (int l2 = 0; l2 <= trunc.lmax().doubled(); ++l2) {
        auto level = v_labels(HalfInteger::from_doubled(l2));
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

namespace {

// The coupled block at (l, i, J): e_+ (x) t~^l_{i,J-1/2} and e_- (x) t~^l_{i,J+1/2},
// with the 2x2 orthogonal matrix whose rows are v^{l,+} and v^{l,-}.
struct CoupledBlock {
    PWIndex up;
    PWIndex down;
    bool has_up;
    bool has_down;
    double plus[2];
    double minus[2];
};

CoupledBlock coupled_block(HalfInteger l, HalfInteger i, HalfInteger J, double q)
{
    CoupledBlock b{};
    b.up = {l, i, J - kHalf};
    b.down = {l, i, J + kHalf};
    b.has_up = b.up.valid();
    b.has_down = b.down.valid();
    b.plus[0] = cg_half(kHalf, Branch::Plus, l, J - kHalf, q);
    b.plus[1] = cg_half(-kHalf, Branch::Plus, l, J + kHalf, q);
    b.minus[0] = cg_half(kHalf, Branch::Minus, l, J - kHalf, q);
    b.minus[1] = cg_half(-kHalf, Branch::Minus, l, J + kHalf, q);
    return b;
}

template <typename Fn>
void for_each_block(const Truncation& trunc, double q, Fn&& fn)
{
    for (int l2 = 0; l2 <= trunc.lmax().doubled(); ++l2) {
        const HalfInteger l = HalfInteger::from_doubled(l2);
        for (int i2 = -l2; i2 <= l2; i2 += 2)
            for (int J2 = -l2 - 1; J2 <= l2 + 1; J2 += 2)
                fn(l, coupled_block(l, HalfInteger::from_doubled(i2), HalfInteger::from_doubled(J2), q));
    }
}

double eigen_true(Branch s, HalfInteger l) { return s == Branch::Plus ? l.value() + 0.5 : -(l.value() + 0.5); }

double eigen_naive(Branch s, HalfInteger l, double q)
{
    return s == Branch::Plus ? q_number(l.value(), q * q) : -q_number(l.value() + 1.0, q * q);
}

} // namespace

SpinorVector v_vector(const VIndex& idx, double q, const Truncation& trunc)
{
    if (!idx.valid()) throw InvalidParameter("v_vector: invalid label");
    if (idx.l > trunc.lmax()) throw InvalidParameter("v_vector: spin exceeds truncation");
    const CoupledBlock b = coupled_block(idx.l, idx.i, idx.j, q);
    const double* c = idx.sign == Branch::Plus ? b.plus : b.minus;
    SpinorVector v(trunc);
    if (b.has_up) v.plus[b.up] = c[0];
    if (b.has_down) v.minus[b.down] = c[1];
    return v;
}

double dirac_eigenvalue(DiracKind kind, const VIndex& idx, double q)
{
    switch (kind) {
    case DiracKind::True: return eigen_true(idx.sign, idx.l);
    case DiracKind::Naive: return eigen_naive(idx.sign, idx.l, q);
    case DiracKind::Abs: return idx.l.value() + 0.5;
    }
    return 0.0;
}

SpinorVector dirac_apply(DiracKind kind, const SpinorVector& v, double q)
{
    const Truncation& trunc = v.truncation();
    SpinorVector out(trunc);
    if (kind == DiracKind::Abs) {
        for (const PWIndex& idx : basis_enumerate(trunc)) {
            const double e = idx.n.value() + 0.5;
            out.plus[idx] = e * v.plus[idx];
            out.minus[idx] = e * v.minus[idx];
        }
        return out;
    }
    for_each_block(trunc, q, [&](HalfInteger l, const CoupledBlock& b) {
        const Complex x_up = b.has_up ? v.plus[b.up] : Complex{};
        const Complex x_down = b.has_down ? v.minus[b.down] : Complex{};
        const Complex cp = b.plus[0] * x_up + b.plus[1] * x_down;
        const Complex cm = b.minus[0] * x_up + b.minus[1] * x_down;
        const double lp = kind == DiracKind::True ? eigen_true(Branch::Plus, l) : eigen_naive(Branch::Plus, l, q);
        const double lm = kind == DiracKind::True ? eigen_true(Branch::Minus, l) : eigen_naive(Branch::Minus, l, q);
        if (b.has_up) out.plus[b.up] += lp * cp * b.plus[0] + lm * cm * b.minus[0];
        if (b.has_down) out.minus[b.down] += lp * cp * b.plus[1] + lm * cm * b.minus[1];
    });
    return out;
}

SparseOperator dirac_operator(DiracKind kind, const Truncation& trunc, double q)
{
    const auto n = static_cast<std::ptrdiff_t>(trunc.dimension());
    std::vector<Eigen::Triplet<Complex, std::ptrdiff_t>> trips;
    if (kind == DiracKind::Abs) {
        for (const PWIndex& idx : basis_enumerate(trunc)) {
            const auto k = static_cast<std::ptrdiff_t>(trunc.index_of(idx));
            trips.emplace_back(k, k, idx.n.value() + 0.5);
            trips.emplace_back(k + n, k + n, idx.n.value() + 0.5);
        }
    } else {
        for_each_block(trunc, q, [&](HalfInteger l, const CoupledBlock& b) {
            const double lp = kind == DiracKind::True ? eigen_true(Branch::Plus, l) : eigen_naive(Branch::Plus, l, q);
            const double lm = kind == DiracKind::True ? eigen_true(Branch::Minus, l) : eigen_naive(Branch::Minus, l, q);
            std::ptrdiff_t pos[2] = {-1, -1};
            if (b.has_up) pos[0] = static_cast<std::ptrdiff_t>(trunc.index_of(b.up));
            if (b.has_down) pos[1] = static_cast<std::ptrdiff_t>(trunc.index_of(b.down)) + n;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) {
                    if (pos[r] < 0 || pos[c] < 0) continue;
                    const double val = lp * b.plus[r] * b.plus[c] + lm * b.minus[r] * b.minus[c];
                    if (val != 0.0) trips.emplace_back(pos[r], pos[c], val);
                }
        });
    }
    SparseMatrix m(2 * n, 2 * n);
    m.setFromTriplets(trips.begin(), trips.end());
    return {trunc, std::move(m), HalfInteger{}, 2};
}

std::vector<std::pair<VIndex, Complex>> expand_in_v_basis(const SpinorVector& v, double q)
{
    std::vector<std::pair<VIndex, Complex>> out;
    for_each_block(v.truncation(), q, [&](HalfInteger l, const CoupledBlock& b) {
        const Complex x_up = b.has_up ? v.plus[b.up] : Complex{};
        const Complex x_down = b.has_down ? v.minus[b.down] : Complex{};
        const HalfInteger J = b.up.j + kHalf;
        const VIndex plus{l, b.up.i, J, Branch::Plus};
        const VIndex minus{l, b.up.i, J, Branch::Minus};
        out.emplace_back(plus, b.plus[0] * x_up + b.plus[1] * x_down);
        if (minus.valid()) out.emplace_back(minus, b.minus[0] * x_up + b.minus[1] * x_down);
    });
    return out;
}

double q_relation_check(double q, const Truncation& trunc)
{
    const SparseOperator d = dirac_operator(DiracKind::True, trunc, q);
    const SparseOperator nq = dirac_operator(DiracKind::Naive, trunc, q);
    double worst = 0.0;
    for (const VIndex& idx : v_labels(trunc)) {
        const ComplexVector v = v_vector(idx, q, trunc).stacked();
        const ComplexVector dv = d.apply(v);
        const double lambda = v.dot(dv).real();
        const double eigen_defect = (dv - lambda * v).norm();
        const double relation = (nq.apply(v) - q_number(lambda - 0.5, q * q) * v).norm();
        worst = std::max({worst, eigen_defect, relation});
    }
    return worst;
}

HilbertVector rho_apply(const HilbertVector& v, double q)
{
    HilbertVector out(v.truncation());
    for (const PWIndex& idx : basis_enumerate(v.truncation())) out[idx] = rho_weight(idx, q) * v[idx];
    return out;
}

SpinorVector R_apply(const SpinorVector& v, double q) { return {rho_apply(v.plus, q), rho_apply(v.minus, q)}; }

SpinorVector lift_apply(const SparseOperator& a, const SpinorVector& v) { return {a.apply(v.plus), a.apply(v.minus)}; }

double b_coefficient(HalfInteger l, HalfInteger i, HalfInteger j, HalfInteger m, Branch eps, double q)
{
    Branch through;
    if (m == l + kHalf) through = Branch::Plus;
    else if (m == l - kHalf) through = Branch::Minus;
    else throw InvalidParameter("b_coefficient: m must be l +- 1/2");
    if (m.doubled() < 0) return 0.0;

    const double nu = std::sqrt(q_number(2.0, q) * q_number(2.0 * l.value() + 1.0, q) /
                                q_number(2.0 * m.value() + 1.0, q));
    double sum = 0.0;
    for (HalfInteger m1 : {kHalf, -kHalf}) {
        sum += cg_half(m1, Branch::Plus, l, j - m1, q) * cg_half(kHalf, through, l, i, q) *
               cg_half(kHalf, through, l, j - m1, q) * cg_half(m1, eps, m, j + kHalf - m1, q);
    }
    return sum * nu;
}

double b_minus_closed(HalfInteger l, HalfInteger i, HalfInteger j, double q)
{
    const double lv = l.value();
    const double jv = j.value();
    const double q2l1 = q_number(2.0 * lv + 1.0, q);
    const double q2l2 = q_number(2.0 * lv + 2.0, q);
    const double prefactor = std::pow(q, 0.5 * (lv - 3.0 * jv - 0.5)) * std::sqrt(q_number(lv - jv + 0.5, q)) /
                             (q2l1 * std::sqrt(q2l2));
    const double bracket = q_number(lv + jv + 0.5, q) - q_number(lv + jv + 1.5, q);
    const double tail = cg_half(kHalf, Branch::Plus, l, i, q) * std::sqrt(q_number(2.0, q) * q2l1) / std::sqrt(q2l2);
    return prefactor * bracket * tail;
}

} // namespace qsu2
