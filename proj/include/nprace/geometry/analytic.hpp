#pragma once

// Closed-form surfaces with exact derivatives. Used as oracles in tests and
// as quick benchmark tracks.

#include <numbers>

#include "nprace/geometry/surface.hpp"

namespace nprace::geometry {

/// Affine plane x = origin + s*u + y*w. With u=(1,0,0), w=(0,1,0) this is the
/// canonical flat road; other choices give skewed or scaled parametrizations.
class Plane : public SurfaceModel<Plane> {
 public:
  Plane(double length, LateralBounds bounds, bool periodic = true, Vec3<double> u = {1, 0, 0},
        Vec3<double> w = {0, 1, 0}, Vec3<double> origin = {0, 0, 0})
      : SurfaceModel("plane", length, periodic, bounds), u_(u), w_(w), origin_(origin) {}

  template <typename T>
  SurfacePartials<T> eval(const T& s, const T& y) const {
    SurfacePartials<T> p;
    p.x = lift<T>(origin_) + s * lift<T>(u_) + y * lift<T>(w_);
    p.xs = lift<T>(u_);
    p.xy = lift<T>(w_);
    return p;
  }

 private:
  Vec3<double> u_, w_, origin_;
};

/// Circular cylinder of radius R with axis along world y. s is arclength
/// around the circle (period 2*pi*R), y runs along the axis. The concave
/// variant is a valley (normal toward the axis, form2_ss = +1/R); the convex
/// variant is a crest (form2_ss = -1/R).
class Cylinder : public SurfaceModel<Cylinder> {
 public:
  Cylinder(double radius, LateralBounds bounds, bool concave = true)
      : SurfaceModel("cylinder", 2 * std::numbers::pi * radius, true, bounds), r_(radius), concave_(concave) {}

  double radius() const { return r_; }

  template <typename T>
  SurfacePartials<T> eval(const T& s, const T& y) const {
    const T a = s / r_;
    const T sa = sin(a);
    const T ca = cos(a);
    const double k = concave_ ? 1.0 : -1.0;
    SurfacePartials<T> p;
    p.x = {T(r_ * sa), y, T(k * (r_ - r_ * ca))};
    p.xs = {ca, T(0.0), T(k * sa)};
    p.xy = {T(0.0), T(1.0), T(0.0)};
    p.xss = {T(-sa / r_), T(0.0), T(k * ca / r_)};
    return p;
  }

 private:
  double r_;
  bool concave_;
};

/// Sphere of radius R parametrized by arclength along the equator (s) and
/// along meridians (y); outward normal, so form2 = -form1 / R.
class SpherePatch : public SurfaceModel<SpherePatch> {
 public:
  SpherePatch(double radius, LateralBounds bounds)
      : SurfaceModel("sphere", 2 * std::numbers::pi * radius, true, bounds), r_(radius) {}

  template <typename T>
  SurfacePartials<T> eval(const T& s, const T& y) const {
    const T a = s / r_;
    const T b = y / r_;
    const T sa = sin(a), ca = cos(a), sb = sin(b), cb = cos(b);
    SurfacePartials<T> p;
    p.x = {T(r_ * cb * ca), T(r_ * cb * sa), T(r_ * sb)};
    p.xs = {T(-cb * sa), T(cb * ca), T(0.0)};
    p.xy = {T(-sb * ca), T(-sb * sa), cb};
    p.xss = {T(-cb * ca / r_), T(-cb * sa / r_), T(0.0)};
    p.xsy = {T(sb * sa / r_), T(-sb * ca / r_), T(0.0)};
    p.xyy = {T(-cb * ca / r_), T(-cb * sa / r_), T(-sb / r_)};
    return p;
  }

 private:
  double r_;
};

/// Counter-clockwise ring of centerline radius R, s = arclength along the
/// centerline, y positive toward the center. The road rises toward +y at
/// the bank angle; bank = 0 is the flat ring.
class Ring : public SurfaceModel<Ring> {
 public:
  Ring(double radius, LateralBounds bounds, double bank = 0.0)
      : SurfaceModel(bank == 0.0 ? "flat_ring" : "banked_ring", 2 * std::numbers::pi * radius, true, bounds),
        r_(radius),
        cb_(std::cos(bank)),
        sb_(std::sin(bank)) {}

  double radius() const { return r_; }

  template <typename T>
  SurfacePartials<T> eval(const T& s, const T& y) const {
    const T phi = s / r_;
    const T cp = cos(phi), sp = sin(phi);
    const T rho = r_ - y * cb_;
    SurfacePartials<T> p;
    p.x = {T(rho * cp), T(rho * sp), T(y * sb_)};
    const T k = rho / r_;
    p.xs = {T(-k * sp), T(k * cp), T(0.0)};
    p.xy = {T(-cb_ * cp), T(-cb_ * sp), T(sb_)};
    p.xss = {T(-k * cp / r_), T(-k * sp / r_), T(0.0)};
    p.xsy = {T(cb_ * sp / r_), T(-cb_ * cp / r_), T(0.0)};
    return p;
  }

 private:
  double r_;
  double cb_, sb_;
};

}  // namespace nprace::geometry
