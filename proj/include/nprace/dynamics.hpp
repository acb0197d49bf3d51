#pragma once

// Motorcycle DAE on a surface: z' = f(z, u, a), 0 = g(z, u, a).
//
// g compares the net force and moment required by the motion (momentum
// rates about the COM) with the applied gravity, tire and drag loads, all in
// body-frame components. Momentum rates are assembled with time-dual numbers
// so every chain-rule term through c(t), d(t) and the body-frame rotation is
// produced mechanically.

#include <array>

#include "nprace/ad/dual.hpp"
#include "nprace/geometry/surface.hpp"
#include "nprace/kinematics.hpp"
#include "nprace/linalg.hpp"
#include "nprace/motorcycle.hpp"
#include "nprace/tires.hpp"

namespace nprace::dynamics {

using geometry::BasicSurfaceSample;
using kinematics::HeadingRateForm;

inline constexpr int kStateSize = 10;
inline constexpr int kAlgebraicSize = 6;
inline constexpr int kInputSize = 4;

template <typename T>
struct BasicState {
  T s{}, y{}, theta_s{};
  T v1{}, v2{}, w3{};
  T c{}, c_dot{};
  T d{}, d_dot{};
};
using State = BasicState<double>;

template <typename T>
struct BasicAlgebraic {
  T v1_dot{}, v2_dot{}, w3_dot{}, c_ddot{};
  T Fz_f{}, Fz_r{};
};
using AlgebraicState = BasicAlgebraic<double>;

template <typename T>
struct BasicInput {
  T gamma{}, d_ddot{}, Fx_f{}, Fx_r{};
};
using Input = BasicInput<double>;

template <typename T>
struct Wrench {
  Vec3<T> force, moment;
};

struct ModelOptions {
  HeadingRateForm heading = HeadingRateForm::Derived;
};

/// Surface-induced quantities shared by all terms at one evaluation.
template <typename T>
struct KinematicTerms {
  kinematics::InPlaneRates<T> w;      // (w1, w2)
  kinematics::InPlaneRates<T> w_dot;  // (w1_dot, w2_dot)
  Vec3<T> gravity;                    // body components of the gravity acceleration
};

template <typename T>
kinematics::BasicPose<T> pose_of(const BasicState<T>& z, const MotorcycleParams& p) {
  return {z.s, z.y, z.theta_s, p.r};
}

template <typename T>
KinematicTerms<T> kinematic_terms(const BasicState<T>& z, const BasicAlgebraic<T>& a,
                                  const BasicSurfaceSample<T>& sample, const MotorcycleParams& p) {
  const auto pose = pose_of(z, p);
  const Mat2<T> m = kinematics::induced_rate_map(sample, z.theta_s, p.r);
  return {kinematics::apply_rate_map(m, z.v1, z.v2), kinematics::apply_rate_map(m, a.v1_dot, a.v2_dot),
          kinematics::gravity_components(pose, sample, {0.0, 0.0, -p.g})};
}

/// COM relative to the reference location, body components:
/// (h - r) e3^m + d e2^m with e2^m = cos c e2 - sin c e3, e3^m = sin c e2 + cos c e3.
template <typename T>
Vec3<T> com_position(const T& c, const T& d, const MotorcycleParams& p) {
  const double a = p.h - p.r;
  const T sc = sin(c), cc = cos(c);
  return {T(0.0), a * sc + d * cc, a * cc - d * sc};
}

namespace detail {

template <typename T>
using Td = ad::Dual<T, 1>;  // (value, time derivative)

template <typename T>
Td<T> td(const T& v, const T& dv) {
  Td<T> r(v);
  r.d[0] = dv;
  return r;
}

template <typename T>
Vec3<T> rate(const Vec3<Td<T>>& a) {
  return {a.x.d[0], a.y.d[0], a.z.d[0]};
}

template <typename T>
Vec3<T> val(const Vec3<Td<T>>& a) {
  return {a.x.v, a.y.v, a.z.v};
}

template <typename T>
Vec3<Td<T>> body_rate(const KinematicTerms<T>& k, const BasicState<T>& z, const BasicAlgebraic<T>& a) {
  return {td(k.w.w1, k.w_dot.w1), td(k.w.w2, k.w_dot.w2), td(z.w3, a.w3_dot)};
}

}  // namespace detail

/// m dV/dt of the COM, body components.
template <typename T>
Vec3<T> net_force_mechanics(const BasicState<T>& z, const BasicAlgebraic<T>& a, const BasicInput<T>& u,
                            const KinematicTerms<T>& k, const MotorcycleParams& p) {
  using D1 = detail::Td<T>;
  using D2 = ad::Dual<D1, 1>;
  D2 c2(detail::td(z.c, z.c_dot));
  c2.d[0] = detail::td(z.c_dot, a.c_ddot);
  D2 d2(detail::td(z.d, z.d_dot));
  d2.d[0] = detail::td(z.d_dot, u.d_ddot);
  const Vec3<D2> r2 = com_position(c2, d2, p);
  const Vec3<D1> r{r2.x.v, r2.y.v, r2.z.v};
  const Vec3<D1> r_dot{r2.x.d[0], r2.y.d[0], r2.z.d[0]};
  const Vec3<D1> w = detail::body_rate(k, z, a);
  const Vec3<D1> v{detail::td(z.v1, a.v1_dot), detail::td(z.v2, a.v2_dot), D1(0.0)};
  const Vec3<D1> vc = v + r_dot + cross(w, r);
  const Vec3<T> vcom = detail::val(vc);
  return p.m * (detail::rate(vc) + cross(detail::val(w), vcom));
}

/// dL/dt about the COM, body components. L combines the chassis inertia
/// (constant in the motorcycle frame) with both wheel spin momenta.
template <typename T>
Vec3<T> net_moment_mechanics(const BasicState<T>& z, const BasicAlgebraic<T>& a, const BasicInput<T>& u,
                             const KinematicTerms<T>& k, const MotorcycleParams& p) {
  (void)u;
  using D1 = detail::Td<T>;
  const Vec3<D1> w = detail::body_rate(k, z, a);
  const D1 c = detail::td(z.c, z.c_dot);
  const D1 c_dot = detail::td(z.c_dot, a.c_ddot);
  const D1 sc = sin(c), cc = cos(c);
  // Motorcycle-frame angular velocity; the frame is the body frame rolled by -c about e1.
  const D1 wm1 = w.x - c_dot;
  const D1 wm2 = w.y * cc - w.z * sc;
  const D1 wm3 = w.y * sc + w.z * cc;
  const D1 vt1 = detail::td(z.v1, a.v1_dot) - w.y * p.r;
  const D1 spin = wheel_spin_momentum(vt1, p.front) + wheel_spin_momentum(vt1, p.rear);
  const D1 l1 = p.I11 * wm1 + p.I12 * wm2 + p.I13 * wm3;
  const D1 l2 = p.I12 * wm1 + p.I22 * wm2 + p.I23 * wm3 + spin;
  const D1 l3 = p.I13 * wm1 + p.I23 * wm2 + p.I33 * wm3;
  const Vec3<D1> lb{l1, l2 * cc + l3 * sc, -l2 * sc + l3 * cc};
  return detail::rate(lb) + cross(detail::val(w), detail::val(lb));
}

template <typename T>
struct TireLoad {
  T camber{}, steer{}, slip{}, Fy{};
  Vec3<T> force;  // body components
};

/// Tire loads in body components. A vehicle at rest (zero body velocity)
/// carries no lateral force; otherwise slip must be defined.
template <typename T>
TireLoad<T> tire_load(const BasicState<T>& z, const BasicInput<T>& u, const T& Fz, const KinematicTerms<T>& k,
                      const MotorcycleParams& p, Wheel wheel) {
  const TireParams& tp = wheel == Wheel::Front ? p.front : p.rear;
  const T& Fx = wheel == Wheel::Front ? u.Fx_f : u.Fx_r;
  TireLoad<T> out;
  const TireAngles<T> ang = wheel == Wheel::Front ? front_tire_angles(z.c, u.gamma, p.epsilon) : rear_tire_angles(z.c);
  out.camber = ang.camber;
  out.steer = ang.steer;
  const bool at_rest = ad::value(z.v1) == 0.0 && ad::value(z.v2) == 0.0 && ad::value(z.w3) == 0.0 &&
                       ad::value(k.w.w1) == 0.0 && ad::value(k.w.w2) == 0.0;
  if (at_rest) {
    out.slip = T(0.0);
    out.Fy = T(0.0);
  } else {
    const ContactVelocity<T> vt = tire_contact_velocity(z.v1, z.v2, k.w.w1, k.w.w2, z.w3, p, wheel);
    out.slip = slip_angle(vt.v1, vt.v2, ang.steer);
    out.Fy = lateral_force(out.slip, ang.camber, Fz, Fx, tp);
  }
  const T cs = cos(ang.steer), ss = sin(ang.steer);
  out.force = {Fx * cs - out.Fy * ss, Fx * ss + out.Fy * cs, Fz};
  return out;
}

/// Gravity, tire and (optional) drag loads; moments about the COM.
template <typename T>
Wrench<T> applied_force_moment(const BasicState<T>& z, const BasicAlgebraic<T>& a, const BasicInput<T>& u,
                               const KinematicTerms<T>& k, const MotorcycleParams& p) {
  const Vec3<T> rc = com_position(z.c, z.d, p);
  Wrench<T> w;
  w.force = p.m * k.gravity;
  for (Wheel wheel : {Wheel::Front, Wheel::Rear}) {
    const T& Fz = wheel == Wheel::Front ? a.Fz_f : a.Fz_r;
    const TireLoad<T> t = tire_load(z, u, Fz, k, p, wheel);
    const double x = wheel == Wheel::Front ? p.lf : -p.lr;
    const Vec3<T> arm = Vec3<T>{T(x), T(0.0), T(-p.r)} - rc;
    w.force += t.force;
    w.moment += cross(arm, t.force);
  }
  if (p.drag.enabled) {
    const T v = z.v1;
    const T mag = (0.5 * p.drag.rho * p.drag.CdA) * v * (ad::value(v) >= 0.0 ? v : -v);
    w.force.x -= mag;
  }
  return w;
}

/// g = [F_mech - F_applied; K_mech - K_applied].
template <typename T>
std::array<T, kAlgebraicSize> dae_residual(const BasicState<T>& z, const BasicInput<T>& u, const BasicAlgebraic<T>& a,
                                           const BasicSurfaceSample<T>& sample, const MotorcycleParams& p) {
  const KinematicTerms<T> k = kinematic_terms(z, a, sample, p);
  const Vec3<T> f = net_force_mechanics(z, a, u, k, p);
  const Vec3<T> m = net_moment_mechanics(z, a, u, k, p);
  const Wrench<T> app = applied_force_moment(z, a, u, k, p);
  return {f.x - app.force.x, f.y - app.force.y, f.z - app.force.z,
          m.x - app.moment.x, m.y - app.moment.y, m.z - app.moment.z};
}

/// z' = (s', y', theta', v1', v2', w3', c', c'', d', d'').
template <typename T>
std::array<T, kStateSize> state_derivative(const BasicState<T>& z, const BasicInput<T>& u, const BasicAlgebraic<T>& a,
                                           const BasicSurfaceSample<T>& sample, const MotorcycleParams& p,
                                           const ModelOptions& opt = {}) {
  const kinematics::BasicBodyVelocity<T> vel{z.v1, z.v2, z.w3};
  const kinematics::PoseRates<T> pr = kinematics::pose_rates(pose_of(z, p), vel, sample, opt.heading);
  return {pr.s_dot, pr.y_dot, pr.theta_s_dot, a.v1_dot, a.v2_dot, a.w3_dot, z.c_dot, a.c_ddot, z.d_dot, u.d_ddot};
}

template <typename T>
std::array<T, kStateSize> to_array(const BasicState<T>& z) {
  return {z.s, z.y, z.theta_s, z.v1, z.v2, z.w3, z.c, z.c_dot, z.d, z.d_dot};
}
template <typename T>
BasicState<T> state_from_array(const std::array<T, kStateSize>& x) {
  return {x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7], x[8], x[9]};
}
template <typename T>
std::array<T, kAlgebraicSize> to_array(const BasicAlgebraic<T>& a) {
  return {a.v1_dot, a.v2_dot, a.w3_dot, a.c_ddot, a.Fz_f, a.Fz_r};
}
template <typename T>
BasicAlgebraic<T> algebraic_from_array(const std::array<T, kAlgebraicSize>& x) {
  return {x[0], x[1], x[2], x[3], x[4], x[5]};
}

}  // namespace nprace::dynamics
