#include "qsu2/gns_oracle.hpp"

#include <cmath>
#include <string>

#include "qsu2/errors.hpp"

namespace qsu2::oracle {

LadderResult rep_apply(const Word& word, int k, double q, int ceiling)
{
    if (!(q > 1.0)) throw InvalidParameter("rep_apply: the ladder model needs q > 1");
    if (k < 0 || k > ceiling) throw LevelOverflow("rep_apply: start level outside [0, ceiling]");
    LadderResult r{1.0, {k, 0}};
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        const int level = r.state.k;
        switch (*it) {
        case Letter::Alpha:
            if (level + 1 > ceiling)
                throw LevelOverflow("rep_apply: level " + std::to_string(level + 1) + " exceeds ceiling " +
                                    std::to_string(ceiling));
            r.amplitude *= std::sqrt(1.0 - std::pow(q, -2.0 * (level + 1)));
            r.state.k = level + 1;
            break;
        case Letter::AlphaStar:
            if (level == 0) return {0.0, {0, r.state.winding}};
            r.amplitude *= std::sqrt(1.0 - std::pow(q, -2.0 * level));
            r.state.k = level - 1;
            break;
        case Letter::Gamma:
            r.amplitude *= std::pow(q, -(level + 1.0));
            ++r.state.winding;
            break;
        case Letter::GammaStar:
            r.amplitude *= std::pow(q, -(level + 1.0));
            --r.state.winding;
            break;
        }
    }
    return r;
}

Complex oracle_haar(const NCPolynomial& p, int K, double q)
{
    if (K < 0) throw InvalidParameter("oracle_haar: K must be >= 0");
    if (!(q > 1.0)) throw InvalidParameter("oracle_haar: the ladder model needs q > 1");
    const int ceiling = K + p.degree();
    Complex total{};
    for (const auto& [m, c] : p.terms()) {
        const Word w = m.word();
        double sum = 0.0;
        for (int k = K; k >= 0; --k) {
            const LadderResult r = rep_apply(w, k, q, ceiling);
            if (r.state.k == k && r.state.winding == 0) sum += std::pow(q, -2.0 * k) * r.amplitude;
        }
        total += c * sum;
    }
    return (1.0 - std::pow(q, -2.0)) * total;
}

} // namespace qsu2::oracle
