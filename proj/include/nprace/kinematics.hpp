#pragma once

// Kinematics of a body frame held tangent to a parametric surface at a fixed
// normal offset n: pose rates, induced in-plane angular velocity and
// acceleration, and the body frame expressed in world coordinates.

#include <cmath>
#include <numbers>

#include "nprace/errors.hpp"
#include "nprace/geometry/surface.hpp"
#include "nprace/linalg.hpp"

namespace nprace::kinematics {

using geometry::BasicSurfaceSample;

/// Largest accepted condition number of (I - n II).
inline constexpr double kMaxOffsetCondition = 1e8;

template <typename T>
struct BasicPose {
  T s{}, y{}, theta_s{};
  double n = 0.0;
};
using Pose = BasicPose<double>;

template <typename T>
struct BasicBodyVelocity {
  T v1{}, v2{}, w3{};
};
using BodyVelocity = BasicBodyVelocity<double>;

template <typename T>
struct PoseRates {
  T s_dot{}, y_dot{}, theta_s_dot{};
};

/// In-plane angular velocity (or acceleration) components (w1, w2).
template <typename T>
struct InPlaneRates {
  T w1{}, w2{};
};

template <typename T>
struct BodyFrame {
  Vec3<T> e1, e2, e3;
};

/// Which mixed term enters the heading-rate curvature correction.
///
/// Derived uses x_sy (the term obtained by differentiating the heading
/// definition); Printed uses x_yy in its place. The two agree whenever
/// (x_sy x x_s).n == (x_yy x x_s).n, e.g. on rings, cylinders and planes
/// with unit-speed y, and differ on twisted or y-reparametrized surfaces.
enum class HeadingRateForm { Derived, Printed };

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

/// Jacobian between surface parameters and body frame,
/// J = [[x_s.e1, x_s.e2], [x_y.e1, x_y.e2]], via its closed form in theta_s.
template <typename T>
Mat2<T> surface_jacobian(const BasicSurfaceSample<T>& sample, const T& theta_s) {
  if (std::abs(ad::value(sample.theta_p)) >= std::numbers::pi / 2 - geometry::kThetaPMargin) {
    throw RegularityError("|theta_p| reaches pi/2");
  }
  const T ct = cos(theta_s);
  const T st = sin(theta_s);
  const T d = theta_s - sample.theta_p;
  return {ct * sample.norm_xs, -st * sample.norm_xs, sin(d) * sample.norm_xy, cos(d) * sample.norm_xy};
}

/// I - n II, checked for invertibility.
template <typename T>
Mat2<T> offset_metric(const BasicSurfaceSample<T>& sample, double n) {
  const Mat2<T> m = sample.form1 - n * sample.form2;
  const Mat2<double> mv{ad::value(m.m11), ad::value(m.m12), ad::value(m.m21), ad::value(m.m22)};
  const double cond = condition_number(mv);
  if (!(cond <= kMaxOffsetCondition)) {
    throw OffsetSingularityError("(I - n II) is singular at offset n=" + std::to_string(n) +
                                 " (condition " + std::to_string(cond) + ")");
  }
  return m;
}

/// Parameter-space rates [s_dot, y_dot] = (I - n II)^-1 J [v1, v2].
template <typename T>
Vec2<T> parameter_rates(const BasicSurfaceSample<T>& sample, const Mat2<T>& jac, double n, const T& v1,
                        const T& v2) {
  const Mat2<T> inv = offset_metric(sample, n).inverse();
  return inv * (jac * Vec2<T>{v1, v2});
}

/// Heading-rate curvature coefficients: theta_s_dot = w3 + ks*s_dot + ky*y_dot.
template <typename T>
Vec2<T> heading_curvature(const BasicSurfaceSample<T>& sample, HeadingRateForm form = HeadingRateForm::Derived) {
  const T xs2 = dot(sample.x_s, sample.x_s);
  const T ks = dot(cross(sample.x_ss, sample.x_s), sample.normal) / xs2;
  const Vec3<T>& second = form == HeadingRateForm::Derived ? sample.x_sy : sample.x_yy;
  const T ky = dot(cross(second, sample.x_s), sample.normal) / xs2;
  return {ks, ky};
}

template <typename T>
PoseRates<T> pose_rates(const BasicPose<T>& pose, const BasicBodyVelocity<T>& vel, const BasicSurfaceSample<T>& sample,
                        HeadingRateForm form = HeadingRateForm::Derived) {
  const Mat2<T> jac = surface_jacobian(sample, pose.theta_s);
  const Vec2<T> q = parameter_rates(sample, jac, pose.n, vel.v1, vel.v2);
  const Vec2<T> k = heading_curvature(sample, form);
  return {q.a, q.b, vel.w3 + k.a * q.a + k.b * q.b};
}

/// M with [-w2, w1] = M [v1, v2]: M = J^-1 II (I - n II)^-1 J.
template <typename T>
Mat2<T> induced_rate_map(const BasicSurfaceSample<T>& sample, const T& theta_s, double n) {
  const Mat2<T> jac = surface_jacobian(sample, theta_s);
  const Mat2<T> inv = offset_metric(sample, n).inverse();
  return jac.inverse() * (sample.form2 * (inv * jac));
}

template <typename T>
InPlaneRates<T> apply_rate_map(const Mat2<T>& m, const T& a1, const T& a2) {
  const Vec2<T> r = m * Vec2<T>{a1, a2};
  return {r.b, -r.a};
}

/// (w1, w2) the body frame must have to stay tangent to the surface.
template <typename T>
InPlaneRates<T> induced_angular_velocity(const BasicPose<T>& pose, const BasicBodyVelocity<T>& vel,
                                         const BasicSurfaceSample<T>& sample) {
  return apply_rate_map(induced_rate_map(sample, pose.theta_s, pose.n), vel.v1, vel.v2);
}

/// (w1_dot, w2_dot) from (v1_dot, v2_dot), neglecting the time variation of
/// the surface curvature and of J along the path.
template <typename T>
InPlaneRates<T> induced_angular_acceleration(const BasicPose<T>& pose, const T& v1_dot, const T& v2_dot,
                                             const BasicSurfaceSample<T>& sample) {
  return apply_rate_map(induced_rate_map(sample, pose.theta_s, pose.n), v1_dot, v2_dot);
}

/// I^-1 J: coefficients of e1, e2 on the tangent basis (x_s, x_y).
template <typename T>
Mat2<T> tangent_coefficients(const BasicSurfaceSample<T>& sample, const T& theta_s) {
  return sample.form1.inverse() * surface_jacobian(sample, theta_s);
}

/// [e1 e2] = [x_s x_y] I^-1 J, e3 = normal.
template <typename T>
BodyFrame<T> body_frame_in_world(const BasicPose<T>& pose, const BasicSurfaceSample<T>& sample) {
  const Mat2<T> c = tangent_coefficients(sample, pose.theta_s);
  return {c.m11 * sample.x_s + c.m21 * sample.x_y, c.m12 * sample.x_s + c.m22 * sample.x_y, sample.normal};
}

/// Body-frame components of a world vector g (e.g. gravity acceleration):
/// [e1.g, e2.g] = [x_s.g, x_y.g] I^-1 J and e3.g = normal.g.
template <typename T>
Vec3<T> gravity_components(const BasicPose<T>& pose, const BasicSurfaceSample<T>& sample, const Vec3<double>& g) {
  const Vec3<T> gv = lift<T>(g);
  const T gs = dot(sample.x_s, gv);
  const T gy = dot(sample.x_y, gv);
  const Mat2<T> c = tangent_coefficients(sample, pose.theta_s);
  return {gs * c.m11 + gy * c.m21, gs * c.m12 + gy * c.m22, dot(sample.normal, gv)};
}

}  // namespace nprace::kinematics
