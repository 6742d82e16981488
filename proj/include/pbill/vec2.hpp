#pragma once

#include <cmath>

namespace pbill {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double a) const { return {x * a, y * a}; }
    constexpr Vec2 operator/(double a) const { return {x / a, y / a}; }
    constexpr bool operator==(const Vec2&) const = default;
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

    double norm() const { return std::hypot(x, y); }
    Vec2 normalized() const { const double n = norm(); return {x / n, y / n}; }
    /// Counterclockwise quarter turn.
    constexpr Vec2 perp() const { return {-y, x}; }
};

constexpr Vec2 operator*(double a, Vec2 v) { return {a * v.x, a * v.y}; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline Vec2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }
inline double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps an angle into (-pi, pi].
inline double wrap_pi(double a) {
    a = std::fmod(a, kTwoPi);
    if (a <= -kPi) a += kTwoPi;
    if (a > kPi) a -= kTwoPi;
    return a;
}

/// Wraps an angle into [0, 2pi).
inline double wrap_two_pi(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0) a += kTwoPi;
    if (a >= kTwoPi) a -= kTwoPi;
    return a;
}

/// Distance between two angles on the circle.
inline double angle_distance(double a, double b) { return std::abs(wrap_pi(a - b)); }

}  // namespace pbill
