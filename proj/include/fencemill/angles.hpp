#pragma once
/**
 * @file   angles.hpp
 * @brief  Planar vectors and angle helpers shared by every module.
 *
 * Angles are radians internally, measured from the +x axis, and wrapped to
 * (-pi, pi] wherever they cross a public interface.
 */

#include <cmath>
#include <numbers>

namespace fencemill
{
    inline constexpr double kPi = std::numbers::pi;

    struct Vec2
    {
        double x = 0.0;
        double y = 0.0;

        friend constexpr Vec2 operator+ (Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
        friend constexpr Vec2 operator- (Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
        friend constexpr Vec2 operator* (double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
        friend constexpr bool operator== (Vec2, Vec2) = default;
    };

    [[nodiscard]] constexpr double dot (Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }

    /// z-component of the 3-D cross product.
    [[nodiscard]] constexpr double cross (Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }

    [[nodiscard]] inline double norm (Vec2 a) noexcept { return std::hypot (a.x, a.y); }

    [[nodiscard]] inline Vec2 unit_from_angle (double angle) noexcept { return {std::cos (angle), std::sin (angle)}; }

    [[nodiscard]] constexpr double deg_to_rad (double deg) noexcept { return deg * kPi / 180.0; }
    [[nodiscard]] constexpr double rad_to_deg (double rad) noexcept { return rad * 180.0 / kPi; }

    /// Wrap to (-pi, pi].
    [[nodiscard]] inline double normalize_angle (double angle) noexcept
    {
        double wrapped = std::remainder (angle, 2.0 * kPi);
        if (wrapped <= -kPi)
            wrapped += 2.0 * kPi;
        return wrapped;
    }

    /// Signed shortest rotation taking `from` onto `to`, in (-pi, pi].
    [[nodiscard]] inline double angle_difference (double to, double from) noexcept { return normalize_angle (to - from); }

} // namespace fencemill
