#pragma once

#include <cmath>

namespace mrr {

// Game-space vector in meters. Origin is anchored to the tank.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Distance in the table plane, ignoring depth.
inline double planar_distance(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Returns v rescaled so that its length does not exceed max_len.
inline Vec3 truncate(const Vec3& v, double max_len) {
  const double n = norm(v);
  if (n <= max_len || n == 0.0) return v;
  return v * (max_len / n);
}

// Unit vector along v, or the zero vector when v is zero.
inline Vec3 unit_or_zero(const Vec3& v) {
  const double n = norm(v);
  return n > 0.0 ? v * (1.0 / n) : Vec3{};
}

// Axis-aligned box. min <= max componentwise.
struct Aabb {
  Vec3 min;
  Vec3 max;

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
           p.z >= min.z && p.z <= max.z;
  }
  Vec3 center() const { return (min + max) * 0.5; }
  bool empty() const { return !(min.x <= max.x && min.y <= max.y && min.z <= max.z); }
  Vec3 clamp(const Vec3& p) const;

  friend bool operator==(const Aabb&, const Aabb&) = default;
};

inline Vec3 Aabb::clamp(const Vec3& p) const {
  auto c = [](double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); };
  return {c(p.x, min.x, max.x), c(p.y, min.y, max.y), c(p.z, min.z, max.z)};
}

}  // namespace mrr
