#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <string>

namespace qsu2 {

/// Exact half-integer, stored as twice its value.
///
/// Spins n, l and weights i, j all live on the half-integer grid; keeping
/// them doubled makes every index computation exact.
class HalfInteger {
public:
    constexpr HalfInteger() = default;

    static constexpr HalfInteger from_doubled(int doubled) noexcept
    {
        HalfInteger h;
        h.doubled_ = doubled;
        return h;
    }
    static constexpr HalfInteger from_int(int value) noexcept
    {
        return from_doubled(2 * value);
    }

    constexpr int doubled() const noexcept { return doubled_; }
    constexpr double value() const noexcept { return 0.5 * doubled_; }
    constexpr bool is_integral() const noexcept { return doubled_ % 2 == 0; }

    constexpr HalfInteger operator-() const noexcept { return from_doubled(-doubled_); }
    constexpr HalfInteger& operator+=(HalfInteger o) noexcept
    {
        doubled_ += o.doubled_;
        return *this;
    }
    constexpr HalfInteger& operator-=(HalfInteger o) noexcept
    {
        doubled_ -= o.doubled_;
        return *this;
    }
    friend constexpr HalfInteger operator+(HalfInteger a, HalfInteger b) noexcept
    {
        return a += b;
    }
    friend constexpr HalfInteger operator-(HalfInteger a, HalfInteger b) noexcept
    {
        return a -= b;
    }

    friend constexpr auto operator<=>(HalfInteger, HalfInteger) = default;
    friend constexpr bool operator==(HalfInteger, HalfInteger) = default;

    std::string str() const
    {
        if (is_integral()) return std::to_string(doubled_ / 2);
        return std::to_string(doubled_) + "/2";
    }

private:
    int doubled_ = 0;
};

inline constexpr HalfInteger kHalf = HalfInteger::from_doubled(1);

constexpr HalfInteger abs(HalfInteger h) noexcept
{
    return HalfInteger::from_doubled(h.doubled() < 0 ? -h.doubled() : h.doubled());
}

inline std::ostream& operator<<(std::ostream& os, HalfInteger h) { return os << h.str(); }

namespace literals {
/// `3_half` is 3/2.
constexpr HalfInteger operator""_half(unsigned long long doubled) noexcept
{
    return HalfInteger::from_doubled(static_cast<int>(doubled));
}
} // namespace literals

} // namespace qsu2

template <>
struct std::hash<qsu2::HalfInteger> {
    std::size_t operator()(qsu2::HalfInteger h) const noexcept
    {
        return std::hash<int>{}(h.doubled());
    }
};
