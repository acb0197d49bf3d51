#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "nprace/ad/dual.hpp"

namespace nprace::geometry {

/// Value and first two derivatives of a scalar spline.
template <typename T>
struct SplineValue {
  T f{}, df{}, ddf{};
};

/// Interpolating cubic spline in one variable. Periodic splines close the
/// curve between the last knot and `period`; otherwise natural end
/// conditions are used and evaluation extrapolates the end segments.
class CubicSpline {
 public:
  CubicSpline() = default;
  /// knots strictly increasing; for periodic splines period > knots.back() - knots.front().
  CubicSpline(std::vector<double> knots, const std::vector<double>& values, bool periodic, double period);

  template <typename T>
  SplineValue<T> eval(const T& s) const {
    const double sv = ad::value(s);
    const int seg = segment(sv);
    const T t = s - T(knots_[seg]);
    const auto& c = coef_[seg];
    SplineValue<T> out;
    out.f = T(c[0]) + t * (T(c[1]) + t * (T(c[2]) + t * c[3]));
    out.df = T(c[1]) + t * (T(2.0 * c[2]) + t * (3.0 * c[3]));
    out.ddf = T(2.0 * c[2]) + t * (6.0 * c[3]);
    return out;
  }

  const std::vector<double>& knots() const { return knots_; }

 private:
  int segment(double s) const;

  std::vector<double> knots_;  // n knots (periodic: plus implicit knots_[0] + period)
  std::vector<std::array<double, 4>> coef_;
  bool periodic_ = false;
  double period_ = 0.0;
};

}  // namespace nprace::geometry
