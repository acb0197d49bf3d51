#pragma once

// Parametric road surfaces x^p(s, y) and the differential-geometric
// quantities the road model needs at a point.

#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "nprace/ad/dual.hpp"
#include "nprace/errors.hpp"
#include "nprace/linalg.hpp"

namespace nprace::geometry {

/// Position and its partial derivatives up to second order.
template <typename T>
struct SurfacePartials {
  Vec3<T> x, xs, xy, xss, xsy, xyy;
};

/// Everything the road model uses at one surface point.
///
/// normal = (x_s x x_y) / |x_s x x_y|; form1 and form2 are the first and
/// second fundamental forms; theta_p measures how far x_y leans away from
/// the in-plane perpendicular of x_s (zero for orthogonal parametrizations).
template <typename T>
struct BasicSurfaceSample {
  Vec3<T> position, x_s, x_y, x_ss, x_sy, x_yy;
  Vec3<T> normal;
  Mat2<T> form1, form2;
  T norm_xs{}, norm_xy{};
  T theta_p{};
};

using SurfaceSample = BasicSurfaceSample<double>;

struct LateralBounds {
  double y_min = 0.0;
  double y_max = 0.0;
};

/// Minimum |x_s x x_y| accepted as regular.
inline constexpr double kMinArea = 1e-9;
/// Margin on |theta_p| below pi/2.
inline constexpr double kThetaPMargin = 1e-6;

/// Abstract parametric surface. Evaluation is a pure function of (s, y) and
/// safe to call concurrently.
///
/// Evaluation is provided for every scalar type the library differentiates
/// through; concrete surfaces implement a single template via SurfaceModel.
class Surface {
 public:
  Surface(std::string name, double length, bool periodic, LateralBounds bounds)
      : name_(std::move(name)), length_(length), periodic_(periodic), bounds_(bounds) {}
  virtual ~Surface() = default;

  virtual SurfacePartials<double> partials(double s, double y) const = 0;
  virtual SurfacePartials<ad::Grad> partials(const ad::Grad& s, const ad::Grad& y) const = 0;
  virtual SurfacePartials<ad::Hess> partials(const ad::Hess& s, const ad::Hess& y) const = 0;

  /// Lateral domain at s (after periodic reduction).
  virtual LateralBounds lateral_bounds(double s) const {
    (void)s;
    return bounds_;
  }

  const std::string& name() const { return name_; }
  double length() const { return length_; }
  bool periodic() const { return periodic_; }

  /// Reduces s into [0, L) for periodic surfaces; identity otherwise.
  double reduce(double s) const {
    if (!periodic_) return s;
    double r = std::fmod(s, length_);
    if (r < 0.0) r += length_;
    return r;
  }

 private:
  std::string name_;
  double length_;
  bool periodic_;
  LateralBounds bounds_;
};

using SurfacePtr = std::shared_ptr<const Surface>;

/// CRTP adapter: Derived provides
///   template <typename T> SurfacePartials<T> eval(const T& s, const T& y) const;
template <typename Derived>
class SurfaceModel : public Surface {
 public:
  using Surface::Surface;

  SurfacePartials<double> partials(double s, double y) const override { return self().eval(s, y); }
  SurfacePartials<ad::Grad> partials(const ad::Grad& s, const ad::Grad& y) const override {
    return self().eval(s, y);
  }
  SurfacePartials<ad::Hess> partials(const ad::Hess& s, const ad::Hess& y) const override {
    return self().eval(s, y);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

/// Fundamental forms, normal and theta_p from raw partials. No checks.
template <typename T>
BasicSurfaceSample<T> make_sample(const SurfacePartials<T>& p) {
  using nprace::asin;
  BasicSurfaceSample<T> out;
  out.position = p.x;
  out.x_s = p.xs;
  out.x_y = p.xy;
  out.x_ss = p.xss;
  out.x_sy = p.xsy;
  out.x_yy = p.xyy;
  const Vec3<T> c = cross(p.xs, p.xy);
  const T area = norm(c);
  out.normal = c / area;
  const T ss = dot(p.xs, p.xs);
  const T sy = dot(p.xs, p.xy);
  const T yy = dot(p.xy, p.xy);
  out.form1 = {ss, sy, sy, yy};
  const T lss = dot(p.xss, out.normal);
  const T lsy = dot(p.xsy, out.normal);
  const T lyy = dot(p.xyy, out.normal);
  out.form2 = {lss, lsy, lsy, lyy};
  out.norm_xs = sqrt(ss);
  out.norm_xy = sqrt(yy);
  out.theta_p = -asin(sy / (out.norm_xs * out.norm_xy));
  return out;
}

/// Throws RegularityError when the parametrization is degenerate at the
/// sample (values only; derivative parts are ignored).
template <typename T>
void check_regular(const SurfacePartials<T>& p, double s, double y) {
  const Vec3<double> xs = value(p.xs);
  const Vec3<double> xy = value(p.xy);
  const double area = norm(cross(xs, xy));
  const double nxs = norm(xs);
  const double nxy = norm(xy);
  if (!(area >= kMinArea) || nxs == 0.0 || nxy == 0.0) {
    throw RegularityError("degenerate tangents at (s=" + std::to_string(s) + ", y=" + std::to_string(y) + ")");
  }
  const double sin_tp = dot(xs, xy) / (nxs * nxy);
  if (std::abs(std::asin(std::clamp(sin_tp, -1.0, 1.0))) >= std::numbers::pi / 2 - kThetaPMargin) {
    throw RegularityError("|theta_p| reaches pi/2 at (s=" + std::to_string(s) + ", y=" + std::to_string(y) + ")");
  }
}

/// Sample with regularity check, for any supported scalar type. s is reduced
/// modulo the period on periodic surfaces; no lateral-domain check.
template <typename T>
BasicSurfaceSample<T> sample_at(const Surface& surface, const T& s, const T& y) {
  const double sv = ad::value(s);
  const double reduced = surface.reduce(sv);
  const T s_red = s + T(reduced - sv);
  const SurfacePartials<T> p = surface.partials(s_red, y);
  check_regular(p, reduced, ad::value(y));
  return make_sample(p);
}

/// Public evaluation entry point: checks the domain, reduces s, checks
/// regularity. Throws DomainError or RegularityError.
SurfaceSample evaluate_surface(const Surface& surface, double s, double y);

}  // namespace nprace::geometry
