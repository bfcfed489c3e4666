#pragma once

#include <compare>
#include <vector>

#include "qsu2/peterweyl.hpp"
#include "qsu2/qarith.hpp"

namespace qsu2 {

/// Vector of C^2 (x) h, split into its e_+ and e_- components.
class SpinorVector {
public:
    explicit SpinorVector(const Truncation& trunc) : plus(trunc), minus(trunc) {}
    SpinorVector(HilbertVector p, HilbertVector m) : plus(std::move(p)), minus(std::move(m)) {}

    const Truncation& truncation() const noexcept { return plus.truncation(); }
    double norm() const;
    Complex dot(const SpinorVector& other) const { return plus.dot(other.plus) + minus.dot(other.minus); }
    /// Stacked coefficients (e_+ block first), matching spinor SparseOperators.
    ComplexVector stacked() const;
    static SpinorVector from_stacked(const Truncation& trunc, const ComplexVector& v);

    SpinorVector& operator+=(const SpinorVector& o);
    SpinorVector& operator-=(const SpinorVector& o);
    friend SpinorVector operator-(SpinorVector a, const SpinorVector& b) { return a -= b; }
    friend SpinorVector operator*(Complex s, SpinorVector v);

    HilbertVector plus;
    HilbertVector minus;
};

/// Label of the Dirac eigenvector v^{l,sign}_{ij}.
///
/// sign = Plus: |i| <= l, |j| <= l + 1/2.  sign = Minus: l >= 1/2, |i| <= l, |j| <= l - 1/2.
/// (The j range is wider than |j| <= l; only these ranges give 2(2l+1)^2 vectors per spin.)
struct VIndex {
    HalfInteger l;
    HalfInteger i;
    HalfInteger j;
    Branch sign = Branch::Plus;

    bool valid() const noexcept;
    friend constexpr auto operator<=>(const VIndex&, const VIndex&) = default;
};

/// All v-labels of spin l, ordered by i, j, then sign.
std::vector<VIndex> v_labels(HalfInteger l);
std::vector<VIndex> v_labels(const Truncation& trunc);

/// v^{l,+}_{ij} = C^{1/2,l,l+1/2}_{1/2,j-1/2,j} e_+ (x) t~^l_{i,j-1/2} + C^{1/2,l,l+1/2}_{-1/2,j+1/2,j} e_- (x) t~^l_{i,j+1/2}
/// and likewise for v^{l,-} with the l - 1/2 coefficients. Out-of-range terms are dropped.
SpinorVector v_vector(const VIndex& idx, double q, const Truncation& trunc);

enum class DiracKind { True, Naive, Abs };

/// Eigenvalue on v^{l,+-}: True -> +-(l+1/2); Naive -> [l]_{q^2}, -[l+1]_{q^2}; Abs -> l+1/2.
double dirac_eigenvalue(DiracKind kind, const VIndex& idx, double q);

/// Applies D, Q or |D|. D and Q act through the 2x2 v-basis blocks; |D| = I_2 (x) A
/// is diagonal in the product basis with eigenvalue n + 1/2.
SpinorVector dirac_apply(DiracKind kind, const SpinorVector& v, double q);

/// The operator as a sparse matrix on C^2 (x) h (shell_depth 0).
SparseOperator dirac_operator(DiracKind kind, const Truncation& trunc, double q);

/// Coefficients of v in the v-basis: <v^{idx}, v> for every label of the truncation.
std::vector<std::pair<VIndex, Complex>> expand_in_v_basis(const SpinorVector& v, double q);

/// Worst of ||D v - lambda v|| and ||Q v - [lambda - 1/2]_{q^2} v|| over the v-basis,
/// with lambda = <v, D v> read off the assembled operator.
double q_relation_check(double q, const Truncation& trunc);

HilbertVector rho_apply(const HilbertVector& v, double q);
/// R = I_2 (x) rho.
SpinorVector R_apply(const SpinorVector& v, double q);

/// (I_2 (x) a) v for an operator a on h.
SpinorVector lift_apply(const SparseOperator& a, const SpinorVector& v);

/// Coefficient of v^{m,eps}_{i+1/2,j+1/2} in t~^{1/2}_{1/2,1/2} v^{l,+}_{ij}, from the
/// four-fold Clebsch-Gordan sum. m must be l - 1/2 or l + 1/2.
double b_coefficient(HalfInteger l, HalfInteger i, HalfInteger j, HalfInteger m, Branch eps, double q);

/// Closed form of b^-_{l+1/2}(i,j).
double b_minus_closed(HalfInteger l, HalfInteger i, HalfInteger j, double q);

} // namespace qsu2
