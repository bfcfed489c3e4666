#pragma once

#include <array>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsu2/half_integer.hpp"
#include "qsu2/peterweyl.hpp"

namespace qsu2 {

/// The four generators alpha, alpha*, gamma, gamma*.
enum class Letter : std::uint8_t { Alpha, AlphaStar, Gamma, GammaStar };

inline constexpr std::array<Letter, 4> kLetters = {Letter::Alpha, Letter::AlphaStar, Letter::Gamma,
                                                   Letter::GammaStar};

Letter star(Letter l) noexcept;
std::string_view letter_name(Letter l) noexcept;

using Word = std::vector<Letter>;

/// Parses a space separated word such as "a g* a*" (letters a, a*, g, g*).
Word parse_word(std::string_view text);
std::string to_string(const Word& w);

/// Normal-form word alpha^a gamma^b (gamma*)^c (alpha > 0), (alpha*)^a gamma^b (gamma*)^c
/// (alpha < 0, a = -alpha), or gamma^b (gamma*)^c (alpha == 0).
struct Monomial {
    int alpha = 0;
    int gamma = 0;
    int gamma_star = 0;

    int degree() const noexcept { return (alpha < 0 ? -alpha : alpha) + gamma + gamma_star; }
    Word word() const;
    std::string str() const;

    friend constexpr auto operator<=>(const Monomial&, const Monomial&) = default;
};

/// Every normal-form monomial of degree <= max_degree, in a fixed order.
std::vector<Monomial> monomials_up_to(int max_degree);

/// Element of the *-algebra written in normal form.
class NCPolynomial {
public:
    using TermMap = std::map<Monomial, Complex>;

    NCPolynomial() = default;
    static NCPolynomial constant(Complex c);
    static NCPolynomial from_monomial(const Monomial& m, Complex c = 1.0);
    static NCPolynomial from_letter(Letter l);

    const TermMap& terms() const noexcept { return terms_; }
    int degree() const noexcept;
    HalfInteger shell_depth() const noexcept { return HalfInteger::from_doubled(degree()); }
    /// Largest |coefficient| (0 for the zero polynomial).
    double max_abs_coefficient() const noexcept;
    double coefficient_l1() const noexcept;
    Complex coefficient(const Monomial& m) const;

    void add_term(const Monomial& m, Complex c);
    NCPolynomial& operator+=(const NCPolynomial& other);
    NCPolynomial& operator-=(const NCPolynomial& other);
    friend NCPolynomial operator+(NCPolynomial a, const NCPolynomial& b) { return a += b; }
    friend NCPolynomial operator-(NCPolynomial a, const NCPolynomial& b) { return a -= b; }
    friend NCPolynomial operator*(Complex s, NCPolynomial p);

    /// Drops coefficients with |c| <= tol.
    NCPolynomial pruned(double tol) const;
    std::string str() const;

private:
    TermMap terms_;
};

/// Linear combination of arbitrary (not necessarily normal) words.
using Expression = std::vector<std::pair<Word, Complex>>;

/// Rewrites to normal form with the defining relations
///   a* a + g* g = 1,  a a* + q^2 g* g = 1,  g* g = g g*,  a g = q g a,  a g* = q g* a
/// and their adjoints. Without an rng the leftmost redex is rewritten first;
/// with one, the redex is chosen at random (used to test confluence).
NCPolynomial normal_order(const Expression& expr, double q, std::mt19937_64* rng = nullptr);
NCPolynomial normal_order(const Word& word, double q, std::mt19937_64* rng = nullptr);

NCPolynomial multiply(const NCPolynomial& a, const NCPolynomial& b, double q);
NCPolynomial adjoint(const NCPolynomial& p, double q);

// ---------------------------------------------------------------------------
// GNS action

/// One of the four spin-1/2 Peter-Weyl elements t~^{1/2}_{r,s}.
struct GeneratorCell {
    HalfInteger r;
    HalfInteger s;
    friend constexpr bool operator==(const GeneratorCell&, const GeneratorCell&) = default;
};

/// letter = scalar * t~^{1/2}_{cell}.
struct Identification {
    Letter letter;
    GeneratorCell cell;
    double scalar;
};

struct RelationResidual {
    std::string identity;
    double residual;
};

/// Left-multiplication operators of the spin-1/2 elements on a truncation,
/// acting by
///
///   t~^{1/2}_{r,s} t~^l_{i,j} = sum_{m = l +- 1/2} C^{1/2,l,m}_{r,i,i+r} C^{1/2,l,m}_{s,j,j+s}
///                                 sqrt([2]_q [2l+1]_q / [2m+1]_q) t~^m_{i+r,j+s}
///
/// with the spin-1/2 coefficients of cg_half. No extra q-power correction is
/// needed: with phi = 0 every defining relation and both adjointness
/// conditions hold to rounding. The fitted identification is
///
///   alpha   =  sqrt(q / [2]_q)     t~_{+,+}      alpha*  = (q [2]_q)^{-1/2} t~_{-,-}
///   gamma   =  (q [2]_q)^{-1/2}    t~_{-,+}      gamma*  = -(q [2]_q)^{-1/2} t~_{+,-}
///
/// build() recomputes the scalars from the relations and refuses to return a
/// table whose relation battery fails.
class GeneratorTable {
public:
    static GeneratorTable build(double q, const Truncation& trunc, double tolerance = 1e-10);

    double q() const noexcept { return q_; }
    const Truncation& truncation() const noexcept { return trunc_; }

    const SparseOperator& cell_operator(GeneratorCell cell) const;
    const SparseOperator& letter_operator(Letter l) const;
    const Identification& identification(Letter l) const;
    /// t~^{1/2}_{cell} written as a polynomial (a multiple of one generator).
    NCPolynomial cell_polynomial(GeneratorCell cell) const;
    const std::vector<RelationResidual>& battery() const noexcept { return battery_; }
    double worst_residual() const noexcept;

private:
    GeneratorTable(double q, const Truncation& trunc);

    double q_;
    Truncation trunc_;
    std::vector<SparseOperator> cells_;    // (+,+), (+,-), (-,+), (-,-)
    std::vector<SparseOperator> letters_;  // indexed by Letter
    std::vector<Identification> ident_;    // indexed by Letter
    std::vector<RelationResidual> battery_;
};

/// Product-rule operator of t~^{1/2}_{r,s} with no validation.
SparseOperator raw_cell_operator(GeneratorCell cell, const Truncation& trunc, double q);

/// Validated left-multiplication operator of t~^{1/2}_{r,s}.
SparseOperator generator_operator(GeneratorCell cell, const Truncation& trunc, double q);

/// Left multiplication by p; shell_depth = degree(p) / 2.
SparseOperator mult_operator(const NCPolynomial& p, const GeneratorTable& table);
/// Applies p to a vector letter by letter, without forming the operator.
HilbertVector apply_polynomial(const NCPolynomial& p, const GeneratorTable& table, const HilbertVector& v);

/// psi(p) = <t~^0_{00}, p t~^0_{00}>; exact whenever degree(p)/2 <= lmax.
Complex haar_state(const NCPolynomial& p, const GeneratorTable& table);
Complex haar_state(const NCPolynomial& p, const Truncation& trunc, double q);

} // namespace qsu2
