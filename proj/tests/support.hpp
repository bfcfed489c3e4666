#pragma once

// Seeded random generators for the property tests. Every generator draws from
// one mt19937_64 stream, so a failing case is reproduced by its seed alone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qsu2/algebra.hpp"
#include "qsu2/peterweyl.hpp"

namespace qsu2::testing {

inline constexpr std::uint64_t kSeed = 0x5eed'2024'0601ULL;

class Gen {
public:
    explicit Gen(std::uint64_t seed = kSeed) : rng_(seed) {}

    std::mt19937_64& engine() { return rng_; }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    /// q drawn from [1.05, 3] or, with flip, from [1/3, 1/1.05].
    double q(bool allow_below_one = false)
    {
        const double v = uniform(1.05, 3.0);
        return allow_below_one && coin() ? 1.0 / v : v;
    }

    HalfInteger spin(int max_doubled) { return HalfInteger::from_doubled(integer(0, max_doubled)); }

    /// Weight in {-n, -n+1, ..., n}.
    HalfInteger weight(HalfInteger n)
    {
        return HalfInteger::from_doubled(-n.doubled() + 2 * integer(0, n.doubled()));
    }

    PWIndex pw_index(int max_doubled)
    {
        const HalfInteger n = spin(max_doubled);
        return {n, weight(n), weight(n)};
    }

    Letter letter() { return kLetters[static_cast<std::size_t>(integer(0, 3))]; }

    Word word(int length)
    {
        Word w;
        for (int k = 0; k < length; ++k) w.push_back(letter());
        return w;
    }

    Complex complex() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

    /// Normal-ordered polynomial built from `terms` random words of length <= max_degree.
    NCPolynomial polynomial(int max_degree, int terms, double q)
    {
        Expression e;
        for (int k = 0; k < terms; ++k) e.emplace_back(word(integer(0, max_degree)), complex());
        return normal_order(e, q);
    }

    /// Random vector supported on spins <= max_doubled / 2.
    HilbertVector hilbert_vector(const Truncation& trunc, int max_doubled)
    {
        HilbertVector v(trunc);
        const std::size_t n = Truncation::offset(HalfInteger::from_doubled(max_doubled + 1));
        for (std::size_t k = 0; k < n; ++k) v.coeffs()[static_cast<Eigen::Index>(k)] = complex();
        return v;
    }

private:
    std::mt19937_64 rng_;
};

/// Direct evaluation of (b^r - b^-r) / (b - 1/b) in extended precision.
inline double q_number_direct(double r, double b)
{
    const long double bl = b;
    return static_cast<double>((std::pow(bl, static_cast<long double>(r)) - std::pow(bl, -static_cast<long double>(r))) /
                               (bl - 1.0L / bl));
}

inline double relative_difference(double a, double b)
{
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

} // namespace qsu2::testing
