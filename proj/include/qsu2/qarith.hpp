#pragma once

#include <optional>
#include <string>

#include "qsu2/half_integer.hpp"

namespace qsu2 {

/// The deformation parameter q together with the working precision.
///
/// q > 1 is the standard regime. 0 < q < 1 is accepted (every identity used
/// here is symmetric under the corresponding change of conventions) but
/// warning() reports it so drivers can surface it.
class DeformationParameter {
public:
    explicit DeformationParameter(double q, int precision_bits = 53);

    double q() const noexcept { return q_; }
    int precision_bits() const noexcept { return precision_bits_; }
    std::optional<std::string> warning() const;

private:
    double q_;
    int precision_bits_;
};

/// [r]_base = (base^r - base^-r) / (base - base^-1).
///
/// Throws InvalidParameter for base <= 0 or base == 1.
double q_number(double r, double base);

/// log [r]_base for r > 0, stable for large r (no overflow of base^r).
double log_q_number(double r, double base);

enum class Branch { Plus, Minus };

constexpr int sign(Branch b) noexcept { return b == Branch::Plus ? 1 : -1; }

/// Spin-1/2 q-Clebsch-Gordan coefficient C^{1/2, l, l + b/2}_{m1, m, m + m1}.
///
/// m1 must be +1/2 or -1/2. Out-of-range arguments (|m| > l, or the
/// Minus branch at l = 0) yield 0.
double cg_half(HalfInteger m1, Branch branch, HalfInteger l, HalfInteger m, double q);

} // namespace qsu2
