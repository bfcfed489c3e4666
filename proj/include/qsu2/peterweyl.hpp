#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "qsu2/half_integer.hpp"

namespace qsu2 {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor, std::ptrdiff_t>;

/// Label (n, i, j) of the Peter-Weyl basis vector t~^n_{ij}.
struct PWIndex {
    HalfInteger n;
    HalfInteger i;
    HalfInteger j;

    /// |i|, |j| <= n and n - i, n - j integral.
    bool valid() const noexcept;

    friend constexpr auto operator<=>(const PWIndex&, const PWIndex&) = default;
};

/// Truncation of the GNS space to spins n <= lmax.
class Truncation {
public:
    explicit Truncation(HalfInteger lmax);
    static Truncation from_doubled(int lmax_doubled) { return Truncation(HalfInteger::from_doubled(lmax_doubled)); }

    HalfInteger lmax() const noexcept { return lmax_; }
    std::size_t dimension() const noexcept { return dimension_; }

    bool contains(const PWIndex& idx) const noexcept { return idx.valid() && idx.n <= lmax_; }
    /// Position of idx in the enumeration order; idx must be contained.
    std::size_t index_of(const PWIndex& idx) const noexcept;
    PWIndex at(std::size_t position) const;
    /// First position belonging to spin n (so the spins <= n - 1/2 occupy [0, offset(n))).
    static std::size_t offset(HalfInteger n) noexcept;

    friend bool operator==(const Truncation&, const Truncation&) = default;

private:
    HalfInteger lmax_;
    std::size_t dimension_;
};

/// All basis labels of the truncation, ordered by 2n, then i, then j.
std::vector<PWIndex> basis_enumerate(const Truncation& trunc);

/// psi((t^a)^* t^b) = delta [2n+1]_q^{-1} q^{2i}.
double pw_inner_unnormalized(const PWIndex& a, const PWIndex& b, double q);
/// psi(t^a (t^b)^*) = delta [2n+1]_q^{-1} q^{-2j}.
double pw_inner_unnormalized_conj(const PWIndex& a, const PWIndex& b, double q);
/// [2n+1]_q^{1/2} q^{-i}, the factor turning t^n_{ij} into the unit vector t~^n_{ij}.
double normalization_factor(const PWIndex& idx, double q);
/// Eigenvalue q^{-2i-2j} of the modular operator rho on t~^n_{ij}.
double rho_weight(const PWIndex& idx, double q);

/// Finite coefficient vector over the orthonormal basis {t~^n_{ij}}.
class HilbertVector {
public:
    explicit HilbertVector(const Truncation& trunc);
    HilbertVector(const Truncation& trunc, ComplexVector coeffs);

    static HilbertVector basis_vector(const Truncation& trunc, const PWIndex& idx);

    const Truncation& truncation() const noexcept { return trunc_; }
    const ComplexVector& coeffs() const noexcept { return coeffs_; }
    ComplexVector& coeffs() noexcept { return coeffs_; }

    Complex operator[](const PWIndex& idx) const;
    Complex& operator[](const PWIndex& idx);

    double norm() const { return coeffs_.norm(); }
    Complex dot(const HilbertVector& other) const { return coeffs_.dot(other.coeffs_); }
    /// Largest spin carrying a nonzero coefficient (|c| > cutoff); -1/2 for the zero vector.
    HalfInteger max_spin(double cutoff = 0.0) const;

private:
    Truncation trunc_;
    ComplexVector coeffs_;
};

/// Sparse linear map on the truncated h, or on `copies` stacked copies of it
/// (copies = 2 for the spinor space C^2 (x) h, e_+ block first).
///
/// shell_depth is the largest spin shift the operator can produce. Acting on
/// vectors supported on spins <= lmax - shell_depth the truncated matrix
/// agrees with the infinite-dimensional operator.
class SparseOperator {
public:
    SparseOperator(const Truncation& trunc, SparseMatrix matrix, HalfInteger shell_depth, int copies = 1);

    static SparseOperator identity(const Truncation& trunc, int copies = 1);
    static SparseOperator diagonal(const Truncation& trunc, const std::function<Complex(const PWIndex&)>& weight,
                                   int copies = 1);

    const Truncation& truncation() const noexcept { return trunc_; }
    const SparseMatrix& matrix() const noexcept { return matrix_; }
    HalfInteger shell_depth() const noexcept { return shell_depth_; }
    int copies() const noexcept { return copies_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

    /// Largest spin s with s + shell_depth <= lmax; negative when the safe shell is empty.
    HalfInteger safe_shell() const noexcept { return trunc_.lmax() - shell_depth_; }

    ComplexVector apply(const ComplexVector& v) const { return matrix_ * v; }
    HilbertVector apply(const HilbertVector& v) const;

    SparseOperator adjoint() const;
    /// I_2 (x) this, for an operator on h.
    SparseOperator spinor_lift() const;

    friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
    friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
    friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
    friend SparseOperator operator*(Complex s, const SparseOperator& a);

    /// Max |entry| of (this - other) over columns whose basis spin is <= shell.
    double max_difference_on_shell(const SparseOperator& other, HalfInteger shell) const;

private:
    Truncation trunc_;
    SparseMatrix matrix_;
    HalfInteger shell_depth_;
    int copies_;
};

/// Diagonal operator rho with weights q^{-2i-2j}.
SparseOperator rho_operator(const Truncation& trunc, double q, int copies = 1);

/// Max |entry| over the columns of `matrix` indexed by spins <= shell (all copies).
double max_abs_on_shell(const SparseMatrix& matrix, const Truncation& trunc, HalfInteger shell, int copies = 1);

} // namespace qsu2
