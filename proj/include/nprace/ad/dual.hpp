#pragma once

// Forward-mode automatic differentiation.
//
// Dual<T, N> carries a value and N directional derivatives; T may itself be
// an AD type, so Dual<Dual<double, 1>, 1> gives second time derivatives.
// Second<N> carries a value, gradient and packed symmetric Hessian over N
// seeded directions and is what the NLP uses for Lagrangian Hessians.

#include <array>
#include <cmath>
#include <type_traits>

namespace nprace {

using std::abs;
using std::acos;
using std::asin;
using std::atan;
using std::atan2;
using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;
using std::tan;

namespace ad {

/// Number of local decision variables at one collocation node; also the
/// direction count of the Jacobian/Hessian scalars.
inline constexpr int kDirections = 19;

template <typename T, int N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  constexpr Dual() = default;
  constexpr Dual(double x) : v(x) {}  // NOLINT(google-explicit-constructor)
  template <typename U = T>
    requires(!std::is_same_v<U, double>)
  constexpr Dual(const T& x) : v(x) {}  // NOLINT(google-explicit-constructor)

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }
  Dual& operator*=(double s) {
    v *= s;
    for (auto& x : d) x *= s;
    return *this;
  }
};

template <typename T>
struct is_dual : std::false_type {};
template <typename T, int N>
struct is_dual<Dual<T, N>> : std::true_type {};

// Unary function rule: f(a) with f' supplied.
template <typename T, int N>
Dual<T, N> chain(const Dual<T, N>& a, const T& fv, const T& dfv) {
  Dual<T, N> r;
  r.v = fv;
  for (int i = 0; i < N; ++i) r.d[i] = dfv * a.d[i];
  return r;
}

template <typename T, int N>
Dual<T, N> operator-(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.v = -a.v;
  for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}
template <typename T, int N>
Dual<T, N> operator+(const Dual<T, N>& a) {
  return a;
}

template <typename T, int N>
Dual<T, N> operator+(Dual<T, N> a, const Dual<T, N>& b) {
  return a += b;
}
template <typename T, int N>
Dual<T, N> operator-(Dual<T, N> a, const Dual<T, N>& b) {
  return a -= b;
}
template <typename T, int N>
Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.v = a.v * b.v;
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
template <typename T, int N>
Dual<T, N> operator/(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  const T inv = T(1.0) / b.v;
  r.v = a.v * inv;
  for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
  return r;
}

// Mixed with the inner scalar type.
template <typename T, int N>
Dual<T, N> operator+(Dual<T, N> a, const T& b) {
  a.v += b;
  return a;
}
template <typename T, int N>
Dual<T, N> operator+(const T& b, Dual<T, N> a) {
  a.v += b;
  return a;
}
template <typename T, int N>
Dual<T, N> operator-(Dual<T, N> a, const T& b) {
  a.v -= b;
  return a;
}
template <typename T, int N>
Dual<T, N> operator-(const T& b, const Dual<T, N>& a) {
  Dual<T, N> r = -a;
  r.v += b;
  return r;
}
template <typename T, int N>
Dual<T, N> operator*(Dual<T, N> a, const T& b) {
  a.v *= b;
  for (auto& x : a.d) x *= b;
  return a;
}
template <typename T, int N>
Dual<T, N> operator*(const T& b, Dual<T, N> a) {
  return a * b;
}
template <typename T, int N>
Dual<T, N> operator/(Dual<T, N> a, const T& b) {
  const T inv = T(1.0) / b;
  return a * inv;
}
template <typename T, int N>
Dual<T, N> operator/(const T& a, const Dual<T, N>& b) {
  return Dual<T, N>(a) / b;
}

// Mixed with double when the inner type is itself an AD type.
#define NPRACE_DUAL_DOUBLE_OPS(OP)                                   \
  template <typename T, int N>                                       \
    requires(!std::is_same_v<T, double>)                             \
  Dual<T, N> operator OP(const Dual<T, N>& a, double b) {            \
    return a OP Dual<T, N>(b);                                       \
  }                                                                  \
  template <typename T, int N>                                       \
    requires(!std::is_same_v<T, double>)                             \
  Dual<T, N> operator OP(double a, const Dual<T, N>& b) {            \
    return Dual<T, N>(a) OP b;                                       \
  }
NPRACE_DUAL_DOUBLE_OPS(+)
NPRACE_DUAL_DOUBLE_OPS(-)
NPRACE_DUAL_DOUBLE_OPS(*)
NPRACE_DUAL_DOUBLE_OPS(/)
#undef NPRACE_DUAL_DOUBLE_OPS

template <typename T, int N>
Dual<T, N> sin(const Dual<T, N>& a) {
  using nprace::cos;
  using nprace::sin;
  return chain(a, T(sin(a.v)), T(cos(a.v)));
}
template <typename T, int N>
Dual<T, N> cos(const Dual<T, N>& a) {
  using nprace::cos;
  using nprace::sin;
  return chain(a, T(cos(a.v)), T(-sin(a.v)));
}
template <typename T, int N>
Dual<T, N> tan(const Dual<T, N>& a) {
  using nprace::tan;
  const T t = tan(a.v);
  return chain(a, t, T(1.0 + t * t));
}
template <typename T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  using nprace::sqrt;
  const T r = sqrt(a.v);
  return chain(a, r, T(0.5 / r));
}
template <typename T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
  using nprace::exp;
  const T e = exp(a.v);
  return chain(a, e, e);
}
template <typename T, int N>
Dual<T, N> log(const Dual<T, N>& a) {
  using nprace::log;
  return chain(a, T(log(a.v)), T(1.0 / a.v));
}
template <typename T, int N>
Dual<T, N> asin(const Dual<T, N>& a) {
  using nprace::asin;
  using nprace::sqrt;
  return chain(a, T(asin(a.v)), T(1.0 / sqrt(1.0 - a.v * a.v)));
}
template <typename T, int N>
Dual<T, N> acos(const Dual<T, N>& a) {
  using nprace::acos;
  using nprace::sqrt;
  return chain(a, T(acos(a.v)), T(-1.0 / sqrt(1.0 - a.v * a.v)));
}
template <typename T, int N>
Dual<T, N> atan(const Dual<T, N>& a) {
  using nprace::atan;
  return chain(a, T(atan(a.v)), T(1.0 / (1.0 + a.v * a.v)));
}
template <typename T, int N>
Dual<T, N> atan2(const Dual<T, N>& y, const Dual<T, N>& x) {
  using nprace::atan2;
  Dual<T, N> r;
  r.v = atan2(y.v, x.v);
  const T inv = T(1.0) / (x.v * x.v + y.v * y.v);
  for (int i = 0; i < N; ++i) r.d[i] = (x.v * y.d[i] - y.v * x.d[i]) * inv;
  return r;
}

/// Packed value/gradient/Hessian over N directions (lower triangle, row-major).
template <int N>
struct Second {
  static constexpr int kPacked = N * (N + 1) / 2;
  double v = 0.0;
  std::array<double, N> g{};
  std::array<double, kPacked> h{};

  constexpr Second() = default;
  constexpr Second(double x) : v(x) {}  // NOLINT(google-explicit-constructor)

  static constexpr int index(int i, int j) { return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i; }
  double hessian(int i, int j) const { return h[index(i, j)]; }

  Second& operator+=(const Second& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) g[i] += o.g[i];
    for (int k = 0; k < kPacked; ++k) h[k] += o.h[k];
    return *this;
  }
  Second& operator-=(const Second& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) g[i] -= o.g[i];
    for (int k = 0; k < kPacked; ++k) h[k] -= o.h[k];
    return *this;
  }
  Second& operator*=(const Second& o) { return *this = *this * o; }
  Second& operator/=(const Second& o) { return *this = *this / o; }
};

template <typename T>
struct is_second : std::false_type {};
template <int N>
struct is_second<Second<N>> : std::true_type {};

// f(a) given f, f', f''.
template <int N>
Second<N> chain(const Second<N>& a, double f0, double f1, double f2) {
  Second<N> r;
  r.v = f0;
  for (int i = 0; i < N; ++i) r.g[i] = f1 * a.g[i];
  int k = 0;
  for (int i = 0; i < N; ++i) {
    const double gi = f2 * a.g[i];
    for (int j = 0; j <= i; ++j, ++k) r.h[k] = f1 * a.h[k] + gi * a.g[j];
  }
  return r;
}

template <int N>
Second<N> operator-(const Second<N>& a) {
  Second<N> r;
  r.v = -a.v;
  for (int i = 0; i < N; ++i) r.g[i] = -a.g[i];
  for (int k = 0; k < Second<N>::kPacked; ++k) r.h[k] = -a.h[k];
  return r;
}
template <int N>
Second<N> operator+(const Second<N>& a) {
  return a;
}
template <int N>
Second<N> operator+(Second<N> a, const Second<N>& b) {
  return a += b;
}
template <int N>
Second<N> operator-(Second<N> a, const Second<N>& b) {
  return a -= b;
}
template <int N>
Second<N> operator*(const Second<N>& a, const Second<N>& b) {
  Second<N> r;
  r.v = a.v * b.v;
  for (int i = 0; i < N; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  int k = 0;
  for (int i = 0; i < N; ++i) {
    const double agi = a.g[i];
    const double bgi = b.g[i];
    for (int j = 0; j <= i; ++j, ++k) {
      r.h[k] = a.h[k] * b.v + a.v * b.h[k] + agi * b.g[j] + a.g[j] * bgi;
    }
  }
  return r;
}
template <int N>
Second<N> reciprocal(const Second<N>& b) {
  const double inv = 1.0 / b.v;
  return chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}
template <int N>
Second<N> operator/(const Second<N>& a, const Second<N>& b) {
  return a * reciprocal(b);
}

template <int N>
Second<N> operator+(Second<N> a, double b) {
  a.v += b;
  return a;
}
template <int N>
Second<N> operator+(double b, Second<N> a) {
  a.v += b;
  return a;
}
template <int N>
Second<N> operator-(Second<N> a, double b) {
  a.v -= b;
  return a;
}
template <int N>
Second<N> operator-(double b, const Second<N>& a) {
  Second<N> r = -a;
  r.v += b;
  return r;
}
template <int N>
Second<N> operator*(Second<N> a, double b) {
  a.v *= b;
  for (auto& x : a.g) x *= b;
  for (auto& x : a.h) x *= b;
  return a;
}
template <int N>
Second<N> operator*(double b, Second<N> a) {
  return a * b;
}
template <int N>
Second<N> operator/(const Second<N>& a, double b) {
  return a * (1.0 / b);
}
template <int N>
Second<N> operator/(double a, const Second<N>& b) {
  return a * reciprocal(b);
}

template <int N>
Second<N> sin(const Second<N>& a) {
  const double s = std::sin(a.v);
  return chain(a, s, std::cos(a.v), -s);
}
template <int N>
Second<N> cos(const Second<N>& a) {
  const double c = std::cos(a.v);
  return chain(a, c, -std::sin(a.v), -c);
}
template <int N>
Second<N> tan(const Second<N>& a) {
  const double t = std::tan(a.v);
  const double d1 = 1.0 + t * t;
  return chain(a, t, d1, 2.0 * t * d1);
}
template <int N>
Second<N> sqrt(const Second<N>& a) {
  const double r = std::sqrt(a.v);
  return chain(a, r, 0.5 / r, -0.25 / (r * a.v));
}
template <int N>
Second<N> exp(const Second<N>& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}
template <int N>
Second<N> log(const Second<N>& a) {
  return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}
template <int N>
Second<N> asin(const Second<N>& a) {
  const double q = 1.0 - a.v * a.v;
  const double d1 = 1.0 / std::sqrt(q);
  return chain(a, std::asin(a.v), d1, a.v * d1 / q);
}
template <int N>
Second<N> acos(const Second<N>& a) {
  const double q = 1.0 - a.v * a.v;
  const double d1 = 1.0 / std::sqrt(q);
  return chain(a, std::acos(a.v), -d1, -a.v * d1 / q);
}
template <int N>
Second<N> atan(const Second<N>& a) {
  const double q = 1.0 / (1.0 + a.v * a.v);
  return chain(a, std::atan(a.v), q, -2.0 * a.v * q * q);
}
template <int N>
Second<N> atan2(const Second<N>& y, const Second<N>& x) {
  // atan2(y, x) = atan(y/x) + branch constant; derivatives agree with the
  // two-argument form everywhere off the origin.
  const double r2 = x.v * x.v + y.v * y.v;
  const double inv = 1.0 / r2;
  // First derivatives with respect to (y, x).
  const double fy = x.v * inv;
  const double fx = -y.v * inv;
  // Second derivatives.
  const double fyy = -2.0 * x.v * y.v * inv * inv;
  const double fxx = -fyy;
  const double fxy = (y.v * y.v - x.v * x.v) * inv * inv;
  Second<N> r;
  r.v = std::atan2(y.v, x.v);
  for (int i = 0; i < N; ++i) r.g[i] = fy * y.g[i] + fx * x.g[i];
  int k = 0;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j <= i; ++j, ++k) {
      r.h[k] = fy * y.h[k] + fx * x.h[k] + fyy * y.g[i] * y.g[j] + fxx * x.g[i] * x.g[j] +
               fxy * (x.g[i] * y.g[j] + y.g[i] * x.g[j]);
    }
  }
  return r;
}

template <int N>
bool operator<(const Second<N>& a, double b) {
  return a.v < b;
}
template <int N>
bool operator>(const Second<N>& a, double b) {
  return a.v > b;
}

/// Jacobian scalar for one node.
using Grad = Dual<double, kDirections>;
/// Hessian scalar for one node.
using Hess = Second<kDirections>;

inline double value(double x) { return x; }
template <typename T, int N>
double value(const Dual<T, N>& x) {
  return value(x.v);
}
template <int N>
double value(const Second<N>& x) {
  return x.v;
}

template <typename T>
inline constexpr bool is_ad_v = is_dual<T>::value || is_second<T>::value;

/// Independent variable seeded in direction i.
template <typename T>
T seed(double x, int i) {
  if constexpr (std::is_same_v<T, double>) {
    (void)i;
    return x;
  } else if constexpr (is_second<T>::value) {
    T r(x);
    r.g[i] = 1.0;
    return r;
  } else {
    T r(x);
    r.d[i] = 1.0;
    return r;
  }
}

template <typename T>
T sqr(const T& x) {
  return x * x;
}

}  // namespace ad
}  // namespace nprace
