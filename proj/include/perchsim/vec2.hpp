#pragma once

#include <cmath>

namespace perchsim {

// Planar vector in the x-z plane (x forward, z up).
struct Vec2 {
  double x{0.0};
  double z{0.0};

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double z_) : x(x_), z(z_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, z + o.z}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, z - o.z}; }
  constexpr Vec2 operator-() const { return {-x, -z}; }
  constexpr Vec2 operator*(double s) const { return {x * s, z * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, z / s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    z += o.z;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    z -= o.z;
    return *this;
  }
  Vec2& operator*=(double s) {
    x *= s;
    z *= s;
    return *this;
  }

  constexpr double dot(const Vec2& o) const { return x * o.x + z * o.z; }
  // Out-of-plane component of the cross product (positive = counterclockwise).
  constexpr double cross(const Vec2& o) const { return x * o.z - z * o.x; }
  double norm() const { return std::hypot(x, z); }
  constexpr double squared_norm() const { return x * x + z * z; }
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, z / n} : Vec2{0.0, 0.0};
  }
  // Counterclockwise quarter turn.
  constexpr Vec2 rot90() const { return {-z, x}; }
  bool finite() const { return std::isfinite(x) && std::isfinite(z); }
};

inline constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Rotate by angle (counterclockwise, radians).
inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.z, s * v.x + c * v.z};
}

// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  a = std::fmod(a, two_pi);
  if (a <= -M_PI) a += two_pi;
  if (a > M_PI) a -= two_pi;
  return a;
}

}  // namespace perchsim
