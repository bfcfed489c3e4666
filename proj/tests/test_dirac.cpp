#include <doctest.h>

#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "qsu2/algebra.hpp"
#include "qsu2/dirac.hpp"
#include "qsu2/errors.hpp"
#include "support.hpp"

using namespace qsu2;
using namespace qsu2::literals;
using qsu2::testing::Gen;

namespace {

Eigen::MatrixXcd v_matrix(const std::vector<VIndex>& labels, double q, const Truncation& trunc)
{
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(2 * trunc.dimension()), static_cast<Eigen::Index>(labels.size()));
    for (std::size_t k = 0; k < labels.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = v_vector(labels[k], q, trunc).stacked();
    return m;
}

SpinorVector random_spinor(Gen& g, const Truncation& trunc, int max_doubled)
{
    return {g.hilbert_vector(trunc, max_doubled), g.hilbert_vector(trunc, max_doubled)};
}

} // namespace

TEST_CASE("v-labels: validity and counting")
{
    for (int l2 = 0; l2 <= 16; ++l2) {
        const HalfInteger l = HalfInteger::from_doubled(l2);
        const auto labels = v_labels(l);
        std::size_t plus = 0, minus = 0;
        for (const VIndex& v : labels) {
            CHECK(v.valid());
            (v.sign == Branch::Plus ? plus : minus) += 1;
        }
        CHECK(plus == static_cast<std::size_t>((l2 + 1) * (l2 + 2)));
        CHECK(minus == static_cast<std::size_t>((l2 + 1) * l2));
        CHECK(labels.size() == static_cast<std::size_t>(2 * (l2 + 1) * (l2 + 1)));
    }
    CHECK_FALSE(VIndex{HalfInteger{}, HalfInteger{}, kHalf, Branch::Minus}.valid());
    CHECK(VIndex{kHalf, kHalf, HalfInteger{}, Branch::Plus}.valid());
    CHECK_FALSE(VIndex{kHalf, kHalf, kHalf, Branch::Plus}.valid());
    CHECK(VIndex{kHalf, kHalf, HalfInteger::from_int(1), Branch::Plus}.valid());
    CHECK_FALSE(VIndex{kHalf, kHalf, HalfInteger::from_int(1), Branch::Minus}.valid());
}

TEST_CASE("v-vectors: lowest vector, norms and Gram matrix")
{
    const double q = 1.2;
    const Truncation trunc = Truncation::from_doubled(16);
    const SpinorVector v0 = v_vector({HalfInteger{}, HalfInteger{}, kHalf, Branch::Plus}, q, trunc);
    CHECK(std::abs(v0.plus[PWIndex{}] - 1.0) < 1e-15);
    CHECK(v0.norm() == doctest::Approx(1.0).epsilon(1e-15));

    double worst = 0.0;
    for (const VIndex& v : v_labels(trunc)) worst = std::max(worst, std::abs(v_vector(v, q, trunc).norm() - 1.0));
    CHECK(worst < 1e-13);

    const Truncation small = Truncation::from_doubled(6);
    const Eigen::MatrixXcd m = v_matrix(v_labels(small), q, small);
    CHECK(m.cols() == m.rows());
    const Eigen::MatrixXcd gram = m.adjoint() * m;
    CHECK((gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(v_vector({HalfInteger::from_int(4), HalfInteger{}, kHalf, Branch::Plus}, q, small), InvalidParameter);
}

TEST_CASE("Dirac eigenvalues")
{
    const double q = 1.2;
    const Truncation trunc = Truncation::from_doubled(8);
    const VIndex low{HalfInteger{}, HalfInteger{}, kHalf, Branch::Plus};
    const SpinorVector v0 = v_vector(low, q, trunc);
    CHECK(((dirac_apply(DiracKind::True, v0, q) - Complex(0.5) * v0).norm()) < 1e-15);

    const double rq = std::sqrt(2.0);
    const VIndex half_minus{kHalf, kHalf, HalfInteger{}, Branch::Minus};
    const SpinorVector vm = v_vector(half_minus, rq, trunc);
    // -[3/2]_2 = -(2^{3/2} - 2^{-3/2}) / (2 - 1/2)
    const double expect = -(std::pow(2.0, 1.5) - std::pow(2.0, -1.5)) / 1.5;
    CHECK(expect == doctest::Approx(-1.6499158).epsilon(1e-7));
    CHECK(dirac_eigenvalue(DiracKind::Naive, half_minus, rq) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(((dirac_apply(DiracKind::Naive, vm, rq) - Complex(expect) * vm).norm()) < 1e-14);

    for (const PWIndex& p : basis_enumerate(trunc)) {
        SpinorVector e(trunc);
        e.plus[p] = 1.0;
        const SpinorVector a = dirac_apply(DiracKind::Abs, e, q);
        CHECK(std::abs(a.plus[p] - (p.n.value() + 0.5)) < 1e-15);
        CHECK(a.norm() == doctest::Approx(p.n.value() + 0.5));
    }
}

TEST_CASE("D, Q and |D| are simultaneously diagonal on the v-basis")
{
    const double q = 1.3;
    const Truncation trunc = Truncation::from_doubled(10);
    for (const VIndex& idx : v_labels(trunc)) {
        const SpinorVector v = v_vector(idx, q, trunc);
        const double d = dirac_eigenvalue(DiracKind::True, idx, q);
        const double n = dirac_eigenvalue(DiracKind::Naive, idx, q);
        CHECK((dirac_apply(DiracKind::True, v, q) - Complex(d) * v).norm() < 1e-13);
        CHECK((dirac_apply(DiracKind::Naive, v, q) - Complex(n) * v).norm() < 1e-12 * (1.0 + std::abs(n)));
        CHECK((dirac_apply(DiracKind::Abs, v, q) - Complex(std::abs(d)) * v).norm() < 1e-13);
    }
}

TEST_CASE("assembled Dirac operators match dirac_apply and are Hermitian")
{
    const double q = 1.2;
    const Truncation trunc = Truncation::from_doubled(8);
    Gen g;
    for (DiracKind kind : {DiracKind::True, DiracKind::Naive, DiracKind::Abs}) {
        const SparseOperator op = dirac_operator(kind, trunc, q);
        CHECK(op.copies() == 2);
        CHECK((SparseMatrix(op.matrix().adjoint()) - op.matrix()).norm() < 1e-13);
        const SpinorVector v = random_spinor(g, trunc, 8);
        const ComplexVector a = op.apply(v.stacked());
        const ComplexVector b = dirac_apply(kind, v, q).stacked();
        CHECK((a - b).norm() < 1e-12 * (1.0 + b.norm()));
    }
}

TEST_CASE("q-relation between the true and naive operators")
{
    CHECK(q_relation_check(1.2, Truncation::from_doubled(20)) < 1e-12);
    CHECK(q_relation_check(2.0, Truncation::from_doubled(8)) < 1e-10);
    for (const VIndex& v : v_labels(Truncation::from_doubled(20))) {
        const double lambda = dirac_eigenvalue(DiracKind::True, v, 1.2);
        CHECK(dirac_eigenvalue(DiracKind::Naive, v, 1.2) == doctest::Approx(q_number(lambda - 0.5, 1.44)).epsilon(1e-13));
    }
}

TEST_CASE("expansion in the v-basis is an isometry")
{
    const double q = 1.2;
    const Truncation trunc = Truncation::from_doubled(8);
    Gen g;
    for (int trial = 0; trial < 5; ++trial) {
        const SpinorVector v = random_spinor(g, trunc, 8);
        const auto coeffs = expand_in_v_basis(v, q);
        CHECK(coeffs.size() == v_labels(trunc).size());
        double norm2 = 0.0;
        SpinorVector rebuilt(trunc);
        for (const auto& [idx, c] : coeffs) {
            norm2 += std::norm(c);
            rebuilt += c * v_vector(idx, q, trunc);
        }
        CHECK(std::sqrt(norm2) == doctest::Approx(v.norm()).epsilon(1e-13));
        CHECK((rebuilt - v).norm() < 1e-12);
    }
}

TEST_CASE("R = I (x) rho")
{
    const double q = 1.2;
    const Truncation trunc = Truncation::from_doubled(6);
    SpinorVector e(trunc);
    e.plus[PWIndex{}] = 1.0;
    CHECK((R_apply(e, q) - e).norm() == 0.0);
    SpinorVector f(trunc);
    f.minus[{kHalf, kHalf, kHalf}] = 1.0;
    CHECK((R_apply(f, q) - Complex(1.0 / (q * q)) * f).norm() < 1e-15);

    const SparseOperator r = rho_operator(trunc, q, 2);
    const SparseOperator d = dirac_operator(DiracKind::Abs, trunc, q);
    CHECK(SparseMatrix(r.matrix() * d.matrix() - d.matrix() * r.matrix()).norm() == 0.0);
    CHECK(r.matrix().coeffs().real().minCoeff() > 0.0);
    Gen g;
    const SpinorVector v = random_spinor(g, trunc, 6);
    CHECK((R_apply(v, q).stacked() - r.apply(v.stacked())).norm() < 1e-14);
}

TEST_CASE("b-coefficients: sum formula, closed form and operator application")
{
    const double q = 1.2;
    double closed = 0.0;
    for (int l2 = 0; l2 <= 16; ++l2) {
        const HalfInteger l = HalfInteger::from_doubled(l2);
        for (int i2 = -l2; i2 <= l2; i2 += 2)
            for (int j2 = -l2 - 1; j2 <= l2 + 1; j2 += 2) {
                const HalfInteger i = HalfInteger::from_doubled(i2), j = HalfInteger::from_doubled(j2);
                closed = std::max(closed, std::abs(b_coefficient(l, i, j, l + kHalf, Branch::Minus, q) -
                                                   b_minus_closed(l, i, j, q)));
            }
    }
    CHECK(closed < 1e-10);

    const GeneratorTable table = GeneratorTable::build(q, Truncation::from_doubled(14));
    const SparseOperator& a = table.cell_operator({kHalf, kHalf});
    double applied = 0.0;
    for (int l2 = 0; l2 <= 12; ++l2) {
        const HalfInteger l = HalfInteger::from_doubled(l2);
        for (int i2 = -l2; i2 <= l2; i2 += 2)
            for (int j2 = -l2 - 1; j2 <= l2 + 1; j2 += 2) {
                const VIndex src{l, HalfInteger::from_doubled(i2), HalfInteger::from_doubled(j2), Branch::Plus};
                std::map<VIndex, Complex> expansion;
                for (const auto& [idx, c] : expand_in_v_basis(lift_apply(a, v_vector(src, q, table.truncation())), q))
                    expansion[idx] = c;
                for (HalfInteger m : {l - kHalf, l + kHalf}) {
                    if (m.doubled() < 0) continue;
                    for (Branch eps : {Branch::Plus, Branch::Minus}) {
                        const VIndex dst{m, src.i + kHalf, src.j + kHalf, eps};
                        const Complex c = dst.valid() ? expansion[dst] : Complex{};
                        applied = std::max(applied, std::abs(c - b_coefficient(l, src.i, src.j, m, eps, q)));
                    }
                }
            }
    }
    CHECK(applied < 1e-10);
    CHECK_THROWS_AS(b_coefficient(2_half, HalfInteger{}, kHalf, 5_half, Branch::Plus, q), InvalidParameter);
}

TEST_CASE("the witness coefficient converges to a nonzero limit")
{
    const double q = 1.2;
    auto witness = [q](int l) {
        const HalfInteger L = HalfInteger::from_int(l);
        return std::abs(b_minus_closed(L, L, -L - kHalf, q));
    };
    const double b20 = witness(20), b25 = witness(25), b30 = witness(30);
    CHECK(b30 > 0.1);
    CHECK(std::abs(b25 - b20) < 1e-3);
    CHECK(std::abs(b30 - b25) < 1e-3);
}
