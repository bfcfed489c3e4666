#include "qsu2/qarith.hpp"

#include <cmath>

#include "qsu2/errors.hpp"

namespace qsu2 {

DeformationParameter::DeformationParameter(double q, int precision_bits)
    : q_(q), precision_bits_(precision_bits)
{
    if (!(q > 0.0) || q == 1.0 || !std::isfinite(q))
        throw InvalidParameter("deformation parameter q must be positive and != 1, got " +
                               std::to_string(q));
    if (precision_bits != 53 && precision_bits != 64)
        throw InvalidParameter("precision_bits must be 53 (double) or 64 (long double), got " +
                               std::to_string(precision_bits));
}

std::optional<std::string> DeformationParameter::warning() const
{
    if (q_ < 1.0)
        return "q = " + std::to_string(q_) +
               " < 1: results hold with inverted conventions; q > 1 is the tested regime";
    return std::nullopt;
}

double q_number(double r, double base)
{
    if (!(base > 0.0) || base == 1.0)
        throw InvalidParameter("q_number: base must be positive and != 1");
    if (r == 0.0) return 0.0;
    // sinh form keeps antisymmetry and base inversion exact up to rounding
    const double lb = std::log(base);
    return std::sinh(r * lb) / std::sinh(lb);
}

double log_q_number(double r, double base)
{
    if (!(base > 0.0) || base == 1.0)
        throw InvalidParameter("log_q_number: base must be positive and != 1");
    if (!(r > 0.0)) throw InvalidParameter("log_q_number: r must be positive");
    const double lb = std::abs(std::log(base));
    // log sinh(r lb) - log sinh(lb), each as x + log1p(-e^{-2x}) - log 2
    auto log_sinh = [](double x) { return x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0); };
    return log_sinh(r * lb) - log_sinh(lb);
}

double cg_half(HalfInteger m1, Branch branch, HalfInteger l, HalfInteger m, double q)
{
    if (m1 != kHalf && m1 != -kHalf)
        throw InvalidParameter("cg_half: m1 must be +1/2 or -1/2");
    if (abs(m) > l) return 0.0;
    if (branch == Branch::Minus && l.doubled() < 1) return 0.0;

    const double lv = l.value();
    const double mv = m.value();
    const double denom = q_number(2.0 * lv + 1.0, q);
    const bool up = m1.doubled() > 0;

    if (branch == Branch::Plus) {
        if (up) return std::pow(q, 0.5 * (lv - mv)) * std::sqrt(q_number(lv + mv + 1.0, q) / denom);
        return std::pow(q, -0.5 * (lv + mv)) * std::sqrt(q_number(lv - mv + 1.0, q) / denom);
    }
    if (up) {
        if (m == l) return 0.0;
        return std::pow(q, -0.5 * (lv + mv + 1.0)) * std::sqrt(q_number(lv - mv, q) / denom);
    }
    if (m == -l) return 0.0;
    return -std::pow(q, 0.5 * (lv - mv + 1.0)) * std::sqrt(q_number(lv + mv, q) / denom);
}

} // namespace qsu2
