#include "qsu2/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsu2/errors.hpp"
#include "qsu2/qarith.hpp"

namespace qsu2 {

Letter star(Letter l) noexcept
{
    switch (l) {
    case Letter::Alpha: return Letter::AlphaStar;
    case Letter::AlphaStar: return Letter::Alpha;
    case Letter::Gamma: return Letter::GammaStar;
    case Letter::GammaStar: return Letter::Gamma;
    }
    return l;
}

std::string_view letter_name(Letter l) noexcept
{
    switch (l) {
    case Letter::Alpha: return "a";
    case Letter::AlphaStar: return "a*";
    case Letter::Gamma: return "g";
    case Letter::GammaStar: return "g*";
    }
    return "?";
}

Word parse_word(std::string_view text)
{
    Word w;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char c = text[pos];
        if (c == ' ' || c == '\t') {
            ++pos;
            continue;
        }
        if (c != 'a' && c != 'g') throw InvalidParameter("parse_word: unexpected character '" + std::string(1, c) + "'");
        const bool starred = pos + 1 < text.size() && text[pos + 1] == '*';
        if (c == 'a') w.push_back(starred ? Letter::AlphaStar : Letter::Alpha);
        else w.push_back(starred ? Letter::GammaStar : Letter::Gamma);
        pos += starred ? 2 : 1;
    }
    return w;
}

std::string to_string(const Word& w)
{
    if (w.empty()) return "1";
    std::string out;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k) out += ' ';
        out += letter_name(w[k]);
    }
    return out;
}

Word Monomial::word() const
{
    Word w;
    const Letter a = alpha >= 0 ? Letter::Alpha : Letter::AlphaStar;
    w.insert(w.end(), static_cast<std::size_t>(alpha >= 0 ? alpha : -alpha), a);
    w.insert(w.end(), static_cast<std::size_t>(gamma), Letter::Gamma);
    w.insert(w.end(), static_cast<std::size_t>(gamma_star), Letter::GammaStar);
    return w;
}

std::string Monomial::str() const { return to_string(word()); }

std::vector<Monomial> monomials_up_to(int max_degree)
{
    std::vector<Monomial> out;
    for (int a = -max_degree; a <= max_degree; ++a)
        for (int b = 0; b + std::abs(a) <= max_degree; ++b)
            for (int c = 0; c + b + std::abs(a) <= max_degree; ++c) out.push_back({a, b, c});
    std::stable_sort(out.begin(), out.end(),
                     [](const Monomial& x, const Monomial& y) { return x.degree() < y.degree(); });
    return out;
}

// ---------------------------------------------------------------------------

NCPolynomial NCPolynomial::constant(Complex c) { return from_monomial({}, c); }

NCPolynomial NCPolynomial::from_monomial(const Monomial& m, Complex c)
{
    NCPolynomial p;
    p.add_term(m, c);
    return p;
}

NCPolynomial NCPolynomial::from_letter(Letter l)
{
    switch (l) {
    case Letter::Alpha: return from_monomial({1, 0, 0});
    case Letter::AlphaStar: return from_monomial({-1, 0, 0});
    case Letter::Gamma: return from_monomial({0, 1, 0});
    case Letter::GammaStar: return from_monomial({0, 0, 1});
    }
    return {};
}

int NCPolynomial::degree() const noexcept
{
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
}

double NCPolynomial::max_abs_coefficient() const noexcept
{
    double r = 0.0;
    for (const auto& [m, c] : terms_) r = std::max(r, std::abs(c));
    return r;
}

double NCPolynomial::coefficient_l1() const noexcept
{
    double r = 0.0;
    for (const auto& [m, c] : terms_) r += std::abs(c);
    return r;
}

Complex NCPolynomial::coefficient(const Monomial& m) const
{
    auto it = terms_.find(m);
    return it == terms_.end() ? Complex{} : it->second;
}

void NCPolynomial::add_term(const Monomial& m, Complex c)
{
    if (c == Complex{}) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == Complex{}) terms_.erase(it);
    }
}

NCPolynomial& NCPolynomial::operator+=(const NCPolynomial& other)
{
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
}

NCPolynomial& NCPolynomial::operator-=(const NCPolynomial& other)
{
    for (const auto& [m, c] : other.terms_) add_term(m, -c);
    return *this;
}

NCPolynomial operator*(Complex s, NCPolynomial p)
{
    NCPolynomial out;
    for (const auto& [m, c] : p.terms_) out.add_term(m, s * c);
    return out;
}

NCPolynomial NCPolynomial::pruned(double tol) const
{
    NCPolynomial out;
    for (const auto& [m, c] : terms_)
        if (std::abs(c) > tol) out.add_term(m, c);
    return out;
}

std::string NCPolynomial::str() const
{
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(12);
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        if (c.imag() == 0.0) os << c.real();
        else os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
        if (m.degree() > 0) os << "*[" << m.str() << "]";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Rewriting

namespace {

int rank(Letter l) noexcept
{
    switch (l) {
    case Letter::Alpha:
    case Letter::AlphaStar: return 0;
    case Letter::Gamma: return 1;
    case Letter::GammaStar: return 2;
    }
    return 0;
}

bool is_redex(Letter x, Letter y) noexcept
{
    return rank(x) > rank(y) || (rank(x) == rank(y) && x != y);
}

Monomial to_monomial(const Word& w)
{
    Monomial m;
    for (Letter l : w) {
        switch (l) {
        case Letter::Alpha: ++m.alpha; break;
        case Letter::AlphaStar: --m.alpha; break;
        case Letter::Gamma: ++m.gamma; break;
        case Letter::GammaStar: ++m.gamma_star; break;
        }
    }
    return m;
}

Word splice(const Word& w, std::size_t pos, std::initializer_list<Letter> replacement)
{
    Word out;
    out.reserve(w.size());
    out.insert(out.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(pos));
    out.insert(out.end(), replacement);
    out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(pos + 2), w.end());
    return out;
}

// Rewrites the redex at pos; results are appended to `out`.
void rewrite(const Word& w, std::size_t pos, Complex coef, double q, std::vector<std::pair<Word, Complex>>& out)
{
    const Letter x = w[pos];
    const Letter y = w[pos + 1];
    using L = Letter;
    if (x == L::Gamma && y == L::Alpha) out.emplace_back(splice(w, pos, {L::Alpha, L::Gamma}), coef / q);
    else if (x == L::GammaStar && y == L::Alpha) out.emplace_back(splice(w, pos, {L::Alpha, L::GammaStar}), coef / q);
    else if (x == L::Gamma && y == L::AlphaStar) out.emplace_back(splice(w, pos, {L::AlphaStar, L::Gamma}), coef * q);
    else if (x == L::GammaStar && y == L::AlphaStar)
        out.emplace_back(splice(w, pos, {L::AlphaStar, L::GammaStar}), coef * q);
    else if (x == L::GammaStar && y == L::Gamma) out.emplace_back(splice(w, pos, {L::Gamma, L::GammaStar}), coef);
    else if (x == L::AlphaStar && y == L::Alpha) {
        out.emplace_back(splice(w, pos, {}), coef);
        out.emplace_back(splice(w, pos, {L::Gamma, L::GammaStar}), -coef);
    } else if (x == L::Alpha && y == L::AlphaStar) {
        out.emplace_back(splice(w, pos, {}), coef);
        out.emplace_back(splice(w, pos, {L::Gamma, L::GammaStar}), -coef * q * q);
    }
}

} // namespace

NCPolynomial normal_order(const Expression& expr, double q, std::mt19937_64* rng)
{
    std::map<Word, Complex> pending;
    for (const auto& [w, c] : expr) pending[w] += c;

    NCPolynomial result;
    std::vector<std::size_t> redexes;
    std::vector<std::pair<Word, Complex>> produced;
    while (!pending.empty()) {
        auto node = pending.extract(pending.begin());
        const Word& w = node.key();
        const Complex c = node.mapped();
        if (c == Complex{}) continue;

        redexes.clear();
        for (std::size_t p = 0; p + 1 < w.size(); ++p)
            if (is_redex(w[p], w[p + 1])) redexes.push_back(p);
        if (redexes.empty()) {
            result.add_term(to_monomial(w), c);
            continue;
        }
        std::size_t pos = redexes.front();
        if (rng) pos = redexes[std::uniform_int_distribution<std::size_t>(0, redexes.size() - 1)(*rng)];
        produced.clear();
        rewrite(w, pos, c, q, produced);
        for (auto& [nw, nc] : produced) pending[std::move(nw)] += nc;
    }
    return result;
}

NCPolynomial normal_order(const Word& word, double q, std::mt19937_64* rng)
{
    return normal_order(Expression{{word, 1.0}}, q, rng);
}

NCPolynomial multiply(const NCPolynomial& a, const NCPolynomial& b, double q)
{
    Expression expr;
    for (const auto& [ma, ca] : a.terms()) {
        const Word wa = ma.word();
        for (const auto& [mb, cb] : b.terms()) {
            Word w = wa;
            const Word wb = mb.word();
            w.insert(w.end(), wb.begin(), wb.end());
            expr.emplace_back(std::move(w), ca * cb);
        }
    }
    return normal_order(expr, q);
}

NCPolynomial adjoint(const NCPolynomial& p, double q)
{
    Expression expr;
    for (const auto& [m, c] : p.terms()) {
        Word w = m.word();
        std::reverse(w.begin(), w.end());
        for (Letter& l : w) l = star(l);
        expr.emplace_back(std::move(w), std::conj(c));
    }
    return normal_order(expr, q);
}

// ---------------------------------------------------------------------------
// Generator operators

namespace {

std::size_t cell_slot(GeneratorCell cell)
{
    if (std::abs(cell.r.doubled()) != 1 || std::abs(cell.s.doubled()) != 1)
        throw InvalidParameter("generator cell indices must be +-1/2");
    return static_cast<std::size_t>((cell.r.doubled() > 0 ? 0 : 2) + (cell.s.doubled() > 0 ? 0 : 1));
}

constexpr GeneratorCell kPP{kHalf, kHalf};
constexpr GeneratorCell kPM{kHalf, -kHalf};
constexpr GeneratorCell kMP{-kHalf, kHalf};
constexpr GeneratorCell kMM{-kHalf, -kHalf};

// Least-squares scalar k with target ~ k * basis over the given column range.
double fit_ratio(const SparseMatrix& target, const SparseMatrix& basis)
{
    const Complex num = SparseMatrix(basis.adjoint() * target).diagonal().sum();
    const double den = basis.squaredNorm();
    return num.real() / den;
}

struct FittedScalars {
    double alpha;
    double alpha_star;
    double gamma;
    double gamma_star;
};

// The scalars are fixed by two relations evaluated on the cyclic vector and
// by the adjointness of alpha/alpha* and gamma/gamma*; alpha and gamma are
// taken positive.
FittedScalars fit_scalars(double q)
{
    const Truncation small = Truncation::from_doubled(2);
    const SparseOperator xpp = raw_cell_operator(kPP, small, q);
    const SparseOperator xpm = raw_cell_operator(kPM, small, q);
    const SparseOperator xmp = raw_cell_operator(kMP, small, q);
    const SparseOperator xmm = raw_cell_operator(kMM, small, q);

    const SparseMatrix xpp_adj = xpp.matrix().adjoint();
    const SparseMatrix xmp_adj = xmp.matrix().adjoint();
    const double kappa_alpha = fit_ratio(xpp_adj, xmm.matrix());
    const double kappa_gamma = fit_ratio(xmp_adj, xpm.matrix());

    auto vacuum = [&](const SparseOperator& a, const SparseOperator& b) {
        return SparseMatrix(a.matrix() * b.matrix()).coeff(0, 0).real();
    };
    const double p1 = vacuum(xmm, xpp);
    const double p2 = vacuum(xpm, xmp);
    const double p3 = vacuum(xpp, xmm);
    // u p1 + w p2 = 1, u p3 + q^2 w p2 = 1
    const double det = p1 * q * q * p2 - p2 * p3;
    if (det == 0.0) throw ValidationFailure("scalar fit: singular system", 0.0);
    const double u = (q * q * p2 - p2) / det;
    const double w = (p1 - p3) / det;
    if (!(u / kappa_alpha > 0.0) || !(w / kappa_gamma > 0.0))
        throw ValidationFailure("scalar fit: relations admit no *-compatible scalars", std::abs(u) + std::abs(w));

    FittedScalars f{};
    f.alpha = std::sqrt(u / kappa_alpha);
    f.alpha_star = f.alpha * kappa_alpha;
    f.gamma = std::sqrt(w / kappa_gamma);
    f.gamma_star = f.gamma * kappa_gamma;
    return f;
}

} // namespace

SparseOperator raw_cell_operator(GeneratorCell cell, const Truncation& trunc, double q)
{
    cell_slot(cell);
    const auto dim = static_cast<Eigen::Index>(trunc.dimension());
    std::vector<Eigen::Triplet<Complex, std::ptrdiff_t>> trips;
    trips.reserve(static_cast<std::size_t>(2 * dim));
    const double q2 = q_number(2.0, q);
    for (const PWIndex& src : basis_enumerate(trunc)) {
        for (Branch br : {Branch::Plus, Branch::Minus}) {
            const HalfInteger m = src.n + HalfInteger::from_doubled(sign(br));
            if (m.doubled() < 0 || m > trunc.lmax()) continue;
            const PWIndex dst{m, src.i + cell.r, src.j + cell.s};
            if (!dst.valid()) continue;
            const double c = cg_half(cell.r, br, src.n, src.i, q) * cg_half(cell.s, br, src.n, src.j, q);
            if (c == 0.0) continue;
            const double nu = std::sqrt(q2 * q_number(2.0 * src.n.value() + 1.0, q) /
                                        q_number(2.0 * m.value() + 1.0, q));
            trips.emplace_back(static_cast<std::ptrdiff_t>(trunc.index_of(dst)),
                               static_cast<std::ptrdiff_t>(trunc.index_of(src)), c * nu);
        }
    }
    SparseMatrix mat(dim, dim);
    mat.setFromTriplets(trips.begin(), trips.end());
    return {trunc, std::move(mat), kHalf};
}

GeneratorTable::GeneratorTable(double q, const Truncation& trunc) : q_(q), trunc_(trunc) {}

GeneratorTable GeneratorTable::build(double q, const Truncation& trunc, double tolerance)
{
    DeformationParameter checked(q);
    GeneratorTable t(checked.q(), trunc);
    for (GeneratorCell cell : {kPP, kPM, kMP, kMM}) t.cells_.push_back(raw_cell_operator(cell, trunc, q));

    const FittedScalars f = fit_scalars(q);
    t.ident_ = {{Letter::Alpha, kPP, f.alpha},
                {Letter::AlphaStar, kMM, f.alpha_star},
                {Letter::Gamma, kMP, f.gamma},
                {Letter::GammaStar, kPM, f.gamma_star}};
    for (const Identification& id : t.ident_)
        t.letters_.push_back(Complex(id.scalar) * t.cells_[cell_slot(id.cell)]);

    const SparseOperator& a = t.letter_operator(Letter::Alpha);
    const SparseOperator& as = t.letter_operator(Letter::AlphaStar);
    const SparseOperator& g = t.letter_operator(Letter::Gamma);
    const SparseOperator& gs = t.letter_operator(Letter::GammaStar);
    const SparseOperator one = SparseOperator::identity(trunc);
    const Complex qc(q);
    const HalfInteger shell2 = trunc.lmax() - HalfInteger::from_int(1);
    const HalfInteger shell1 = trunc.lmax() - kHalf;

    auto record = [&](std::string name, const SparseOperator& lhs, const SparseOperator& rhs, HalfInteger shell) {
        t.battery_.push_back({std::move(name), lhs.max_difference_on_shell(rhs, shell)});
    };
    record("a* a + g* g = 1", as * a + gs * g, one, shell2);
    record("a a* + q^2 g* g = 1", a * as + (qc * qc) * (gs * g), one, shell2);
    record("g* g = g g*", gs * g, g * gs, shell2);
    record("a g = q g a", a * g, qc * (g * a), shell2);
    record("a g* = q g* a", a * gs, qc * (gs * a), shell2);
    record("g* a* = q a* g*", gs * as, qc * (as * gs), shell2);
    record("g a* = q a* g", g * as, qc * (as * g), shell2);
    // adjointness is exact on columns whose images stay inside the truncation
    record("a* = adjoint(a)", as, a.adjoint(), shell1);
    record("g* = adjoint(g)", gs, g.adjoint(), shell1);

    const double worst = t.worst_residual();
    if (!(worst < tolerance)) {
        auto it = std::max_element(t.battery_.begin(), t.battery_.end(),
                                   [](const auto& x, const auto& y) { return x.residual < y.residual; });
        throw ValidationFailure(it->identity, it->residual);
    }
    return t;
}

const SparseOperator& GeneratorTable::cell_operator(GeneratorCell cell) const { return cells_[cell_slot(cell)]; }

const SparseOperator& GeneratorTable::letter_operator(Letter l) const
{
    return letters_[static_cast<std::size_t>(l)];
}

const Identification& GeneratorTable::identification(Letter l) const { return ident_[static_cast<std::size_t>(l)]; }

NCPolynomial GeneratorTable::cell_polynomial(GeneratorCell cell) const
{
    for (const Identification& id : ident_)
        if (id.cell == cell) return Complex(1.0 / id.scalar) * NCPolynomial::from_letter(id.letter);
    throw InvalidParameter("cell_polynomial: unknown cell");
}

double GeneratorTable::worst_residual() const noexcept
{
    double w = 0.0;
    for (const auto& r : battery_) w = std::max(w, r.residual);
    return w;
}

SparseOperator generator_operator(GeneratorCell cell, const Truncation& trunc, double q)
{
    return GeneratorTable::build(q, trunc).cell_operator(cell);
}

namespace {
void require_safe_shell(const NCPolynomial& p, const Truncation& trunc)
{
    if (p.shell_depth() > trunc.lmax())
        throw EmptySafeShell("polynomial of degree " + std::to_string(p.degree()) +
                             " has an empty safe shell at lmax " + trunc.lmax().str());
}
} // namespace

SparseOperator mult_operator(const NCPolynomial& p, const GeneratorTable& table)
{
    const Truncation& trunc = table.truncation();
    require_safe_shell(p, trunc);
    const auto dim = static_cast<Eigen::Index>(trunc.dimension());
    SparseOperator result(trunc, SparseMatrix(dim, dim), HalfInteger{});
    for (const auto& [m, c] : p.terms()) {
        SparseOperator term = SparseOperator::identity(trunc);
        for (Letter l : m.word()) term = term * table.letter_operator(l);
        result = result + c * term;
    }
    return result;
}

HilbertVector apply_polynomial(const NCPolynomial& p, const GeneratorTable& table, const HilbertVector& v)
{
    HilbertVector out(table.truncation());
    for (const auto& [m, c] : p.terms()) {
        ComplexVector x = v.coeffs();
        const Word w = m.word();
        for (auto it = w.rbegin(); it != w.rend(); ++it) x = table.letter_operator(*it).apply(x);
        out.coeffs() += c * x;
    }
    return out;
}

Complex haar_state(const NCPolynomial& p, const GeneratorTable& table)
{
    require_safe_shell(p, table.truncation());
    const PWIndex vac{};
    const HilbertVector e0 = HilbertVector::basis_vector(table.truncation(), vac);
    return apply_polynomial(p, table, e0)[vac];
}

Complex haar_state(const NCPolynomial& p, const Truncation& trunc, double q)
{
    return haar_state(p, GeneratorTable::build(q, trunc));
}

} // namespace qsu2
