#include "qsu2/peterweyl.hpp"

#include <cmath>
#include <stdexcept>

#include "qsu2/errors.hpp"
#include "qsu2/qarith.hpp"

namespace qsu2 {

bool PWIndex::valid() const noexcept
{
    if (n.doubled() < 0) return false;
    if (abs(i) > n || abs(j) > n) return false;
    return (n - i).is_integral() && (n - j).is_integral();
}

Truncation::Truncation(HalfInteger lmax) : lmax_(lmax)
{
    if (lmax.doubled() < 0) throw InvalidParameter("truncation spin must be >= 0");
    dimension_ = offset(lmax + kHalf);
}

std::size_t Truncation::offset(HalfInteger n) noexcept
{
    // sum_{k=1}^{2n} k^2
    const auto n2 = static_cast<std::size_t>(n.doubled() < 0 ? 0 : n.doubled());
    return n2 * (n2 + 1) * (2 * n2 + 1) / 6;
}

std::size_t Truncation::index_of(const PWIndex& idx) const noexcept
{
    const int n2 = idx.n.doubled();
    const auto row = static_cast<std::size_t>((idx.i.doubled() + n2) / 2);
    const auto col = static_cast<std::size_t>((idx.j.doubled() + n2) / 2);
    return offset(idx.n) + row * static_cast<std::size_t>(n2 + 1) + col;
}

PWIndex Truncation::at(std::size_t position) const
{
    if (position >= dimension_) throw std::out_of_range("Truncation::at");
    int n2 = 0;
    while (offset(HalfInteger::from_doubled(n2 + 1)) <= position) ++n2;
    const std::size_t local = position - offset(HalfInteger::from_doubled(n2));
    const auto side = static_cast<std::size_t>(n2 + 1);
    const int row = static_cast<int>(local / side);
    const int col = static_cast<int>(local % side);
    return {HalfInteger::from_doubled(n2), HalfInteger::from_doubled(2 * row - n2),
            HalfInteger::from_doubled(2 * col - n2)};
}

std::vector<PWIndex> basis_enumerate(const Truncation& trunc)
{
    std::vector<PWIndex> out;
    out.reserve(trunc.dimension());
    for (int n2 = 0; n2 <= trunc.lmax().doubled(); ++n2)
        for (int i2 = -n2; i2 <= n2; i2 += 2)
            for (int j2 = -n2; j2 <= n2; j2 += 2)
                out.push_back({HalfInteger::from_doubled(n2), HalfInteger::from_doubled(i2),
                               HalfInteger::from_doubled(j2)});
    return out;
}

double pw_inner_unnormalized(const PWIndex& a, const PWIndex& b, double q)
{
    if (a != b) return 0.0;
    return std::pow(q, static_cast<double>(a.i.doubled())) / q_number(2.0 * a.n.value() + 1.0, q);
}

double pw_inner_unnormalized_conj(const PWIndex& a, const PWIndex& b, double q)
{
    if (a != b) return 0.0;
    return std::pow(q, -static_cast<double>(a.j.doubled())) / q_number(2.0 * a.n.value() + 1.0, q);
}

double normalization_factor(const PWIndex& idx, double q)
{
    return std::sqrt(q_number(2.0 * idx.n.value() + 1.0, q)) * std::pow(q, -idx.i.value());
}

double rho_weight(const PWIndex& idx, double q)
{
    return std::pow(q, -static_cast<double>(idx.i.doubled() + idx.j.doubled()));
}

// ---------------------------------------------------------------------------

HilbertVector::HilbertVector(const Truncation& trunc)
    : trunc_(trunc), coeffs_(ComplexVector::Zero(static_cast<Eigen::Index>(trunc.dimension())))
{
}

HilbertVector::HilbertVector(const Truncation& trunc, ComplexVector coeffs)
    : trunc_(trunc), coeffs_(std::move(coeffs))
{
    if (static_cast<std::size_t>(coeffs_.size()) != trunc_.dimension())
        throw InvalidParameter("HilbertVector: coefficient count does not match truncation");
}

HilbertVector HilbertVector::basis_vector(const Truncation& trunc, const PWIndex& idx)
{
    HilbertVector v(trunc);
    v[idx] = 1.0;
    return v;
}

Complex HilbertVector::operator[](const PWIndex& idx) const
{
    if (!trunc_.contains(idx)) return 0.0;
    return coeffs_[static_cast<Eigen::Index>(trunc_.index_of(idx))];
}

Complex& HilbertVector::operator[](const PWIndex& idx)
{
    if (!trunc_.contains(idx)) throw std::out_of_range("HilbertVector: index outside truncation");
    return coeffs_[static_cast<Eigen::Index>(trunc_.index_of(idx))];
}

HalfInteger HilbertVector::max_spin(double cutoff) const
{
    for (Eigen::Index k = coeffs_.size() - 1; k >= 0; --k)
        if (std::abs(coeffs_[k]) > cutoff) return trunc_.at(static_cast<std::size_t>(k)).n;
    return -kHalf;
}

// ---------------------------------------------------------------------------

SparseOperator::SparseOperator(const Truncation& trunc, SparseMatrix matrix, HalfInteger shell_depth, int copies)
    : trunc_(trunc), matrix_(std::move(matrix)), shell_depth_(shell_depth), copies_(copies)
{
    const auto dim = static_cast<Eigen::Index>(trunc_.dimension()) * copies_;
    if (matrix_.rows() != dim || matrix_.cols() != dim)
        throw InvalidParameter("SparseOperator: matrix shape does not match truncation");
    matrix_.makeCompressed();
}

SparseOperator SparseOperator::identity(const Truncation& trunc, int copies)
{
    const auto dim = static_cast<Eigen::Index>(trunc.dimension()) * copies;
    SparseMatrix m(dim, dim);
    m.setIdentity();
    return {trunc, std::move(m), HalfInteger{}, copies};
}

SparseOperator SparseOperator::diagonal(const Truncation& trunc,
                                        const std::function<Complex(const PWIndex&)>& weight, int copies)
{
    const auto n = static_cast<Eigen::Index>(trunc.dimension());
    SparseMatrix m(n * copies, n * copies);
    m.reserve(Eigen::VectorXi::Constant(n * copies, 1));
    const auto labels = basis_enumerate(trunc);
    for (int c = 0; c < copies; ++c)
        for (Eigen::Index k = 0; k < n; ++k)
            m.insert(c * n + k, c * n + k) = weight(labels[static_cast<std::size_t>(k)]);
    return {trunc, std::move(m), HalfInteger{}, copies};
}

HilbertVector SparseOperator::apply(const HilbertVector& v) const
{
    if (copies_ != 1) throw InvalidParameter("SparseOperator::apply: spinor operator applied to h-vector");
    if (!(v.truncation() == trunc_)) throw InvalidParameter("SparseOperator::apply: truncation mismatch");
    return {trunc_, matrix_ * v.coeffs()};
}

SparseOperator SparseOperator::adjoint() const
{
    SparseMatrix adj = matrix_.adjoint();
    return {trunc_, std::move(adj), shell_depth_, copies_};
}

SparseOperator SparseOperator::spinor_lift() const
{
    if (copies_ != 1) throw InvalidParameter("spinor_lift: operator is already on the spinor space");
    const auto n = matrix_.rows();
    SparseMatrix lifted(2 * n, 2 * n);
    std::vector<Eigen::Triplet<Complex, std::ptrdiff_t>> trips;
    trips.reserve(static_cast<std::size_t>(2 * matrix_.nonZeros()));
    for (Eigen::Index col = 0; col < matrix_.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(matrix_, col); it; ++it) {
            trips.emplace_back(it.row(), it.col(), it.value());
            trips.emplace_back(it.row() + n, it.col() + n, it.value());
        }
    lifted.setFromTriplets(trips.begin(), trips.end());
    return {trunc_, std::move(lifted), shell_depth_, 2};
}

namespace {
void require_compatible(const SparseOperator& a, const SparseOperator& b)
{
    if (!(a.truncation() == b.truncation()) || a.copies() != b.copies())
        throw InvalidParameter("SparseOperator: incompatible operands");
}
} // namespace

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b)
{
    require_compatible(a, b);
    SparseMatrix prod = (a.matrix_ * b.matrix_).pruned();
    return {a.trunc_, std::move(prod), a.shell_depth_ + b.shell_depth_, a.copies_};
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b)
{
    require_compatible(a, b);
    SparseMatrix sum = a.matrix_ + b.matrix_;
    return {a.trunc_, std::move(sum), std::max(a.shell_depth_, b.shell_depth_), a.copies_};
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b)
{
    require_compatible(a, b);
    SparseMatrix diff = a.matrix_ - b.matrix_;
    return {a.trunc_, std::move(diff), std::max(a.shell_depth_, b.shell_depth_), a.copies_};
}

SparseOperator operator*(Complex s, const SparseOperator& a)
{
    SparseMatrix scaled = s * a.matrix_;
    return {a.trunc_, std::move(scaled), a.shell_depth_, a.copies_};
}

double SparseOperator::max_difference_on_shell(const SparseOperator& other, HalfInteger shell) const
{
    require_compatible(*this, other);
    SparseMatrix diff = matrix_ - other.matrix_;
    return max_abs_on_shell(diff, trunc_, shell, copies_);
}

SparseOperator rho_operator(const Truncation& trunc, double q, int copies)
{
    return SparseOperator::diagonal(trunc, [q](const PWIndex& idx) { return Complex(rho_weight(idx, q)); }, copies);
}

double max_abs_on_shell(const SparseMatrix& matrix, const Truncation& trunc, HalfInteger shell, int copies)
{
    if (shell.doubled() < 0) return 0.0;
    const auto n = static_cast<Eigen::Index>(trunc.dimension());
    const auto limit = static_cast<Eigen::Index>(Truncation::offset(std::min(shell, trunc.lmax()) + kHalf));
    double worst = 0.0;
    for (int c = 0; c < copies; ++c)
        for (Eigen::Index col = c * n; col < c * n + limit; ++col)
            for (SparseMatrix::InnerIterator it(matrix, col); it; ++it)
                worst = std::max(worst, std::abs(it.value()));
    return worst;
}

} // namespace qsu2
