#include <doctest.h>

#include <cmath>

#include "qsu2/algebra.hpp"
#include "qsu2/errors.hpp"
#include "qsu2/gns_oracle.hpp"
#include "support.hpp"

using namespace qsu2;
using namespace qsu2::oracle;
using qsu2::testing::Gen;

namespace {

// Two results agree when both annihilate the state or they land on the same state.
bool same(const LadderResult& a, const LadderResult& b, double tol = 1e-15)
{
    if (a.amplitude == 0.0 || b.amplitude == 0.0) return std::abs(a.amplitude - b.amplitude) <= tol;
    return std::abs(a.amplitude - b.amplitude) <= tol && a.state.k == b.state.k &&
           a.state.winding == b.state.winding;
}

NCPolynomial poly(const std::string& word, double q) { return normal_order(parse_word(word), q); }

} // namespace

TEST_CASE("ladder action examples")
{
    const double q = 1.2;
    for (int k = 0; k <= 10; ++k) {
        const LadderResult r = rep_apply(parse_word("a* a"), k, q, 20);
        CHECK(r.amplitude == doctest::Approx(1.0 - std::pow(q, -2.0 * (k + 1))));
        CHECK(r.state.k == k);
        CHECK(r.state.winding == 0);
        const LadderResult s = rep_apply(parse_word("g* g"), k, q, 20);
        CHECK(s.amplitude == doctest::Approx(std::pow(q, -2.0 * (k + 1))));
        CHECK(s.state.winding == 0);
    }
    CHECK(rep_apply(parse_word("a*"), 0, q, 5).amplitude == 0.0);
}

TEST_CASE("ladder action satisfies the defining relations on every length-2 word")
{
    for (double q : {1.2, 2.0, 3.5})
        for (int k = 0; k <= 15; ++k) {
            auto amp = [&](const char* w) { return rep_apply(parse_word(w), k, q, 30); };
            CHECK(amp("a* a").amplitude + amp("g* g").amplitude == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(amp("a a*").amplitude + q * q * amp("g* g").amplitude == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(same(amp("g* g"), amp("g g*")));
            auto scaled = [&](const char* w, double f) {
                LadderResult r = amp(w);
                r.amplitude *= f;
                return r;
            };
            CHECK(same(amp("a g"), scaled("g a", q), 1e-14));
            CHECK(same(amp("a g*"), scaled("g* a", q), 1e-14));
            CHECK(same(amp("g* a*"), scaled("a* g*", q), 1e-14));
            CHECK(same(amp("g a*"), scaled("a* g", q), 1e-14));
        }
}

TEST_CASE("ladder errors")
{
    CHECK_THROWS_AS(rep_apply(parse_word("a a"), 4, 1.2, 5), LevelOverflow);
    CHECK_THROWS_AS(rep_apply(parse_word("a"), 6, 1.2, 5), LevelOverflow);
    CHECK_THROWS_AS(rep_apply(parse_word("a"), -1, 1.2, 5), LevelOverflow);
    CHECK_THROWS_AS(rep_apply(parse_word("a"), 0, 0.8, 5), InvalidParameter);
    CHECK_THROWS_AS(oracle_haar(NCPolynomial::constant(1.0), -1, 1.2), InvalidParameter);
    CHECK_THROWS_AS(oracle_haar(NCPolynomial::constant(1.0), 10, 0.9), InvalidParameter);
}

TEST_CASE("oracle Haar values")
{
    const double q = 1.2;
    const int K = 40;
    CHECK(oracle_haar(NCPolynomial::constant(1.0), K, q).real() ==
          doctest::Approx(1.0 - std::pow(q, -2.0 * (K + 1))).epsilon(1e-15));
    CHECK(std::abs(oracle_haar(poly("g* g", 2.0), 30, 2.0) - 0.2) < 1e-12);
    CHECK(std::abs(oracle_haar(poly("a", q), K, q)) == 0.0);
    CHECK(std::abs(oracle_haar(poly("g", q), K, q)) == 0.0);
    const double ratio = oracle_haar(poly("a a*", q), 120, q).real() / oracle_haar(poly("a* a", q), 120, q).real();
    CHECK(ratio == doctest::Approx(1.0 / (q * q)).epsilon(1e-10));
}

TEST_CASE("oracle converges geometrically in K")
{
    const double q = 1.5;
    const NCPolynomial p = poly("g g*", q);
    const Complex limit = oracle_haar(p, 200, q);
    for (int K : {5, 10, 20}) {
        const double err = std::abs(oracle_haar(p, K, q) - limit);
        CHECK(err <= 2.0 * std::pow(q, -2.0 * (K + 1)));
    }
}

TEST_CASE("oracle is a positive functional")
{
    Gen g;
    for (int trial = 0; trial < 60; ++trial) {
        const double q = g.uniform(1.1, 3.0);
        const NCPolynomial p = g.polynomial(3, 4, q);
        const Complex v = oracle_haar(multiply(adjoint(p, q), p, q), 80, q);
        CHECK(v.real() >= -1e-12);
    }
}

TEST_CASE("oracle agrees with the Peter-Weyl path on all monomials of degree <= 6")
{
    for (double q : {1.2, 2.0}) {
        const GeneratorTable t = GeneratorTable::build(q, Truncation::from_doubled(20));
        double worst = 0.0;
        for (const Monomial& m : monomials_up_to(6)) {
            const NCPolynomial p = NCPolynomial::from_monomial(m);
            worst = std::max(worst, std::abs(haar_state(p, t) - oracle_haar(p, 60, q)));
        }
        CHECK(worst < 1e-9);
    }
}
