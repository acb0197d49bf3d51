#pragma once

// Small fixed-size vector/matrix types that work over any AD scalar.

#include <algorithm>
#include <cmath>
#include <limits>

#include "nprace/ad/dual.hpp"

namespace nprace {

template <typename T>
struct Vec3 {
  T x{}, y{}, z{};

  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
};

template <typename T>
Vec3<T> operator+(Vec3<T> a, const Vec3<T>& b) {
  return a += b;
}
template <typename T>
Vec3<T> operator-(Vec3<T> a, const Vec3<T>& b) {
  return a -= b;
}
template <typename T>
Vec3<T> operator-(const Vec3<T>& a) {
  return {-a.x, -a.y, -a.z};
}
template <typename T, typename S>
Vec3<T> operator*(const S& s, const Vec3<T>& a) {
  return {T(s * a.x), T(s * a.y), T(s * a.z)};
}
template <typename T, typename S>
Vec3<T> operator*(const Vec3<T>& a, const S& s) {
  return {T(a.x * s), T(a.y * s), T(a.z * s)};
}
template <typename T, typename S>
Vec3<T> operator/(const Vec3<T>& a, const S& s) {
  return {T(a.x / s), T(a.y / s), T(a.z / s)};
}

template <typename T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
template <typename T>
Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
template <typename T>
T norm(const Vec3<T>& a) {
  using nprace::sqrt;
  return sqrt(dot(a, a));
}

/// Lifts a double vector into an AD scalar type (zero derivatives).
template <typename T>
Vec3<T> lift(const Vec3<double>& a) {
  return {T(a.x), T(a.y), T(a.z)};
}
template <typename T>
Vec3<double> value(const Vec3<T>& a) {
  return {ad::value(a.x), ad::value(a.y), ad::value(a.z)};
}

template <typename T>
struct Vec2 {
  T a{}, b{};
};

/// Row-major 2x2 matrix [[m11, m12], [m21, m22]].
template <typename T>
struct Mat2 {
  T m11{}, m12{}, m21{}, m22{};

  T det() const { return m11 * m22 - m12 * m21; }
  Mat2 inverse() const {
    const T inv = T(1.0) / det();
    return {m22 * inv, -m12 * inv, -m21 * inv, m11 * inv};
  }
  Mat2 transpose() const { return {m11, m21, m12, m22}; }
  static Mat2 identity() { return {T(1.0), T(0.0), T(0.0), T(1.0)}; }
};

template <typename T>
Mat2<T> operator*(const Mat2<T>& a, const Mat2<T>& b) {
  return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
          a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}
template <typename T>
Vec2<T> operator*(const Mat2<T>& a, const Vec2<T>& v) {
  return {a.m11 * v.a + a.m12 * v.b, a.m21 * v.a + a.m22 * v.b};
}
template <typename T>
Mat2<T> operator-(const Mat2<T>& a, const Mat2<T>& b) {
  return {a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
}
template <typename T, typename S>
Mat2<T> operator*(const S& s, const Mat2<T>& a) {
  return {T(s * a.m11), T(s * a.m12), T(s * a.m21), T(s * a.m22)};
}

/// Infinity-norm condition number of a 2x2 matrix.
inline double condition_number(const Mat2<double>& a) {
  const double det = a.det();
  if (det == 0.0) return std::numeric_limits<double>::infinity();
  const double n = std::max(std::abs(a.m11) + std::abs(a.m12), std::abs(a.m21) + std::abs(a.m22));
  const double ni = std::max(std::abs(a.m22) + std::abs(a.m12), std::abs(a.m21) + std::abs(a.m11)) / std::abs(det);
  return n * ni;
}

}  // namespace nprace
