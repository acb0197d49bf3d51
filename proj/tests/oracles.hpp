#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner. Each function returns an error measure; callers decide
// the tolerance.

#include <Eigen/Geometry>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "nprace/dynamics.hpp"
#include "nprace/geometry/analytic.hpp"
#include "nprace/geometry/surface.hpp"
#include "nprace/geometry/track.hpp"
#include "nprace/kinematics.hpp"
#include "nprace/motorcycle.hpp"
#include "nprace/simulator.hpp"
#include "support.hpp"

namespace nprace::oracles {

using Eigen::Matrix3d;
using Eigen::Vector3d;

inline Vector3d ev(const Vec3<double>& v) { return {v.x, v.y, v.z}; }

inline double max_abs_diff(const Vector3d& a, const Vector3d& b) { return (a - b).cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------- geometry

/// Closed-form normal, fundamental forms and theta_p at one point.
struct ExpectedSample {
  Vector3d normal;
  Eigen::Matrix2d form1, form2;
  double theta_p = 0.0;
};

struct GeometryCase {
  std::string label;
  std::shared_ptr<const geometry::Surface> surface;
  std::function<ExpectedSample(double s, double y)> expected;  // empty: FD checks only
  double y_lo = 0.0, y_hi = 0.0;
};

inline std::vector<GeometryCase> analytic_cases() {
  using namespace geometry;
  std::vector<GeometryCase> out;
  out.push_back({"plane", std::make_shared<Plane>(100.0, LateralBounds{-5, 5}),
                 [](double, double) {
                   return ExpectedSample{{0, 0, 1}, Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Zero(), 0.0};
                 },
                 -5, 5});
  out.push_back({"skewed plane",
                 std::make_shared<Plane>(100.0, LateralBounds{-5, 5}, false, Vec3<double>{1, 0, 0},
                                         Vec3<double>{0.3, 1, 0}),
                 [](double, double) {
                   Eigen::Matrix2d f1;
                   f1 << 1.0, 0.3, 0.3, 1.09;
                   return ExpectedSample{{0, 0, 1}, f1, Eigen::Matrix2d::Zero(), -std::asin(0.3 / std::sqrt(1.09))};
                 },
                 -5, 5});
  for (bool concave : {true, false}) {
    const double R = 10.0;
    out.push_back({concave ? "cylinder valley" : "cylinder crest",
                   std::make_shared<Cylinder>(R, LateralBounds{-4, 4}, concave),
                   [R, concave](double s, double) {
                     const double a = s / R, k = concave ? 1.0 : -1.0;
                     Eigen::Matrix2d f2 = Eigen::Matrix2d::Zero();
                     f2(0, 0) = k / R;
                     return ExpectedSample{{-k * std::sin(a), 0, std::cos(a)}, Eigen::Matrix2d::Identity(), f2, 0.0};
                   },
                   -4, 4});
  }
  {
    const double R = 20.0;
    out.push_back({"sphere", std::make_shared<SpherePatch>(R, LateralBounds{-8, 8}),
                   [R](double s, double y) {
                     const double a = s / R, b = y / R;
                     Eigen::Matrix2d f1 = Eigen::Matrix2d::Zero();
                     f1(0, 0) = std::cos(b) * std::cos(b);
                     f1(1, 1) = 1.0;
                     return ExpectedSample{{std::cos(b) * std::cos(a), std::cos(b) * std::sin(a), std::sin(b)}, f1,
                                           -f1 / R, 0.0};
                   },
                   -8, 8});
  }
  for (double bank : {0.0, 20.0 * std::numbers::pi / 180.0}) {
    const double R = 50.0;
    out.push_back({bank == 0.0 ? "flat ring" : "banked ring", std::make_shared<Ring>(R, LateralBounds{-6, 6}, bank),
                   [R, bank](double s, double y) {
                     const double phi = s / R, k = (R - y * std::cos(bank)) / R;
                     Eigen::Matrix2d f1 = Eigen::Matrix2d::Zero(), f2 = Eigen::Matrix2d::Zero();
                     f1(0, 0) = k * k;
                     f1(1, 1) = 1.0;
                     f2(0, 0) = -k * std::sin(bank) / R;
                     return ExpectedSample{
                         {std::sin(bank) * std::cos(phi), std::sin(bank) * std::sin(phi), std::cos(bank)}, f1, f2, 0.0};
                   },
                   -6, 6});
  }
  return out;
}

struct GeometryReport {
  double analytic_error = 0.0;  // max abs error against closed forms
  double fd_error = 0.0;        // max relative error against finite differences
  double symmetry_error = 0.0;  // normal length and form symmetry
};

/// Partials and the normal-derivative form of II against central
/// differences of position and normal.
inline void fd_check_point(const geometry::Surface& surf, double s, double y, GeometryReport& rep) {
  const double h = 1e-5;
  auto P = [&](double a, double b) { return surf.partials(a, b); };
  auto rel = [](const Vector3d& fd, const Vector3d& an) {
    return (fd - an).cwiseAbs().maxCoeff() / std::max(1.0, an.cwiseAbs().maxCoeff());
  };
  const auto p0 = P(s, y);
  const auto ps = P(s + h, y), ms = P(s - h, y), py = P(s, y + h), my = P(s, y - h);
  auto dd = [&](const Vec3<double>& a, const Vec3<double>& b) -> Vector3d { return (ev(a) - ev(b)) / (2 * h); };
  double e = 0.0;
  e = std::max(e, rel(dd(ps.x, ms.x), ev(p0.xs)));
  e = std::max(e, rel(dd(py.x, my.x), ev(p0.xy)));
  e = std::max(e, rel(dd(ps.xs, ms.xs), ev(p0.xss)));
  e = std::max(e, rel(dd(py.xs, my.xs), ev(p0.xsy)));
  e = std::max(e, rel(dd(ps.xy, ms.xy), ev(p0.xsy)));
  e = std::max(e, rel(dd(py.xy, my.xy), ev(p0.xyy)));
  // Weingarten: II_ij = -x_i . dn/dj.
  const auto smp = geometry::make_sample(p0);
  auto nrm = [&](double a, double b) { return ev(geometry::make_sample(P(a, b)).normal); };
  const Vector3d ns = (nrm(s + h, y) - nrm(s - h, y)) / (2 * h);
  const Vector3d ny = (nrm(s, y + h) - nrm(s, y - h)) / (2 * h);
  const double scale = std::max(1.0, std::abs(smp.form2.m11) + std::abs(smp.form2.m12) + std::abs(smp.form2.m22));
  e = std::max(e, std::abs(-ev(smp.x_s).dot(ns) - smp.form2.m11) / scale);
  e = std::max(e, std::abs(-ev(smp.x_s).dot(ny) - smp.form2.m12) / scale);
  e = std::max(e, std::abs(-ev(smp.x_y).dot(ns) - smp.form2.m21) / scale);
  e = std::max(e, std::abs(-ev(smp.x_y).dot(ny) - smp.form2.m22) / scale);
  rep.fd_error = std::max(rep.fd_error, e);
}

inline GeometryReport geometry_suite(int points_per_surface = 200, const std::vector<std::string>& tracks = {}) {
  GeometryReport rep;
  std::mt19937_64 rng(17);
  for (const auto& c : analytic_cases()) {
    std::uniform_real_distribution<double> us(0.0, c.surface->length()), uy(c.y_lo, c.y_hi);
    for (int i = 0; i < points_per_surface; ++i) {
      const double s = us(rng), y = uy(rng);
      const auto smp = geometry::evaluate_surface(*c.surface, s, y);
      const ExpectedSample ex = c.expected(s, y);
      double e = max_abs_diff(ev(smp.normal), ex.normal);
      Eigen::Matrix2d f1, f2;
      f1 << smp.form1.m11, smp.form1.m12, smp.form1.m21, smp.form1.m22;
      f2 << smp.form2.m11, smp.form2.m12, smp.form2.m21, smp.form2.m22;
      e = std::max({e, (f1 - ex.form1).cwiseAbs().maxCoeff(), (f2 - ex.form2).cwiseAbs().maxCoeff(),
                    std::abs(smp.theta_p - ex.theta_p)});
      rep.analytic_error = std::max(rep.analytic_error, e);
      rep.symmetry_error = std::max({rep.symmetry_error, std::abs(ev(smp.normal).norm() - 1.0),
                                     std::abs(smp.form1.m12 - smp.form1.m21), std::abs(smp.form2.m12 - smp.form2.m21)});
      fd_check_point(*c.surface, s, y, rep);
    }
  }
  for (const auto& t : tracks) {
    const auto surf = geometry::build_track(geometry::load_track_file(testing::data_path(t)));
    std::uniform_real_distribution<double> us(0.0, surf->length());
    for (int i = 0; i < points_per_surface; ++i) {
      const double s = us(rng);
      const auto b = surf->lateral_bounds(s);
      const double y = std::uniform_real_distribution<double>(b.y_min, b.y_max)(rng);
      fd_check_point(*surf, s, y, rep);
    }
  }
  return rep;
}

// -------------------------------------------------------------- kinematics

/// Max relative deviation of pose_rates from the planar curvilinear model
/// over random states on a plane and on a flat ring.
inline double flat_reduction_error(int states = 1000) {
  using namespace kinematics;
  const geometry::Plane plane(200.0, {-10, 10});
  const double R = 50.0;
  const geometry::Ring ring(R, {-10, 10});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uy(-8, 8), uth(-1.2, 1.2), uv1(1, 60), uv2(-3, 3), uw(-1, 1), un(0, 1);
  double worst = 0.0;
  for (int i = 0; i < states; ++i) {
    const double s = std::uniform_real_distribution<double>(0, 2 * std::numbers::pi * R)(rng);
    const Pose pose{s, uy(rng), uth(rng), un(rng)};
    const BodyVelocity v{uv1(rng), uv2(rng), uw(rng)};
    const double ct = std::cos(pose.theta_s), st = std::sin(pose.theta_s);
    const double along = v.v1 * ct - v.v2 * st, across = v.v1 * st + v.v2 * ct;
    // Plane: Cartesian rates.
    {
      const auto r = pose_rates(pose, v, geometry::evaluate_surface(plane, pose.s, pose.y));
      worst = std::max({worst, testing::rel_err(r.s_dot, along), testing::rel_err(r.y_dot, across),
                        testing::rel_err(r.theta_s_dot, v.w3)});
    }
    // Ring: Frenet rates with curvature 1/R, y toward the center.
    {
      const double kappa = 1.0 / R;
      const double s_dot = along / (1.0 - kappa * pose.y);
      const auto r = pose_rates(pose, v, geometry::evaluate_surface(ring, pose.s, pose.y));
      worst = std::max({worst, testing::rel_err(r.s_dot, s_dot), testing::rel_err(r.y_dot, across),
                        testing::rel_err(r.theta_s_dot, v.w3 - kappa * s_dot)});
    }
  }
  return worst;
}

/// |(w1, w2)| against the closed form on a cylinder valley, over headings.
inline double cylinder_induced_error() {
  using namespace kinematics;
  const double R = 10.0;
  const geometry::Cylinder cyl(R, {-4, 4});
  double worst = 0.0;
  for (double th : {0.0, 0.3, -0.8, std::numbers::pi / 2}) {
    for (double v : {5.0, 12.0}) {
      const Pose pose{1.3, 0.4, th, 0.0};
      const auto w = induced_angular_velocity(pose, BodyVelocity{v, 0.0, 0.0}, geometry::evaluate_surface(cyl, 1.3, 0.4));
      const double c = std::cos(th), s = std::sin(th);
      worst = std::max({worst, std::abs(w.w1 - (-s * c * v / R)), std::abs(w.w2 - (-c * c * v / R))});
      if (th == 0.0) worst = std::max(worst, std::abs(std::hypot(w.w1, w.w2) - v / R));
    }
  }
  return worst;
}

inline Matrix3d frame_matrix(const kinematics::BodyFrame<double>& f) {
  Matrix3d m;
  m.col(0) = ev(f.e1);
  m.col(1) = ev(f.e2);
  m.col(2) = ev(f.e3);
  return m;
}

/// Body-frame rates from finite differences of the world frame along the
/// path traced by pose_rates: w1 = de2/dt . e3, w2 = -de1/dt . e3.
inline double induced_fd_error(const geometry::Surface& surf, int states, std::uint64_t seed) {
  using namespace kinematics;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uth(-1.0, 1.0), uv1(2, 30), uv2(-2, 2), uw(-0.5, 0.5), un(0, 0.5);
  double worst = 0.0;
  for (int i = 0; i < states; ++i) {
    const double s = std::uniform_real_distribution<double>(0, surf.length())(rng);
    const double y = std::uniform_real_distribution<double>(-2, 2)(rng);
    const Pose pose{s, y, uth(rng), un(rng)};
    const BodyVelocity v{uv1(rng), uv2(rng), uw(rng)};
    const auto smp = geometry::evaluate_surface(surf, s, y);
    const auto r = pose_rates(pose, v, smp);
    const auto w = induced_angular_velocity(pose, v, smp);
    const double h = 1e-6;
    auto frame = [&](double t) {
      const Pose q{s + r.s_dot * t, y + r.y_dot * t, pose.theta_s + r.theta_s_dot * t, pose.n};
      return frame_matrix(body_frame_in_world(q, geometry::evaluate_surface(surf, q.s, q.y)));
    };
    const Matrix3d d = (frame(h) - frame(-h)) / (2 * h);
    const Matrix3d f = frame(0.0);
    const double w1 = d.col(1).dot(f.col(2)), w2 = -d.col(0).dot(f.col(2));
    const double scale = std::max(1.0, std::hypot(w1, w2));
    worst = std::max({worst, std::abs(w.w1 - w1) / scale, std::abs(w.w2 - w2) / scale});
  }
  return worst;
}

/// Worst |w3 - e1_dot . e2| when the pose advances with the given heading
/// form: the yaw rate the frame actually shows against the commanded one.
inline double heading_consistency_error(const geometry::Surface& surf, kinematics::HeadingRateForm form, int states,
                                        std::uint64_t seed) {
  using namespace kinematics;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uth(-1.0, 1.0), uv1(2, 30), uv2(-2, 2), uw(-0.5, 0.5);
  double worst = 0.0;
  for (int i = 0; i < states; ++i) {
    const double s = std::uniform_real_distribution<double>(0, surf.length())(rng);
    const auto b = surf.lateral_bounds(s);
    const double y = std::uniform_real_distribution<double>(0.8 * b.y_min, 0.8 * b.y_max)(rng);
    const Pose pose{s, y, uth(rng), 0.0};
    const BodyVelocity v{uv1(rng), uv2(rng), uw(rng)};
    const auto r = pose_rates(pose, v, geometry::evaluate_surface(surf, s, y), form);
    const double h = 1e-6;
    auto frame = [&](double t) -> Matrix3d {
      const Pose q{s + r.s_dot * t, y + r.y_dot * t, pose.theta_s + r.theta_s_dot * t, pose.n};
      return frame_matrix(body_frame_in_world(q, geometry::evaluate_surface(surf, q.s, q.y)));
    };
    const Matrix3d d = (frame(h) - frame(-h)) / (2 * h);
    const double w3 = d.col(0).dot(frame(0.0).col(1));
    worst = std::max(worst, std::abs(w3 - v.w3) / std::max(1.0, std::abs(v.w3)));
  }
  return worst;
}

// ------------------------------------------------------------ tire geometry

/// Front tire camber/steer against composing the steering rotation about
/// the raked head axis with the body camber roll.
inline double tire_roundtrip_error(double eps = std::numbers::pi / 6.0, int n = 25) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = -0.6 + 1.2 * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double g = -0.7 + 1.4 * j / (n - 1);
      const Vector3d head(-std::sin(eps), 0.0, std::cos(eps));
      const Matrix3d rot = Eigen::AngleAxisd(-c, Vector3d::UnitX()).toRotationMatrix() *
                           Eigen::AngleAxisd(g, head).toRotationMatrix();
      const Vector3d n2 = rot * Vector3d::UnitY();
      const double cam = -std::asin(n2.z());
      const double steer = std::atan2(-n2.x(), n2.y());
      const auto a = front_tire_angles(c, g, eps);
      worst = std::max({worst, std::abs(a.camber - cam), std::abs(a.steer - steer)});
    }
  }
  return worst;
}

/// True when scaling the contact velocity by powers of two leaves the slip
/// angle bit-identical.
inline bool slip_scale_exact() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-30, 30), ug(-0.5, 0.5);
  for (int i = 0; i < 500; ++i) {
    double v1 = u(rng), v2 = u(rng);
    if (std::hypot(v1, v2) < 1.0) v1 += 5.0;
    const double g = ug(rng);
    const double ref = slip_angle(v1, v2, g);
    for (double k : {0.25, 0.5, 2.0, 8.0, 1024.0}) {
      if (slip_angle(k * v1, k * v2, g) != ref) return false;
    }
  }
  return true;
}

// --------------------------------------------------------------- mechanics

/// Smooth scalar q(t) = q0 + q1 t + A sin(w t + phi) with exact derivatives.
struct Smooth {
  double q0 = 0, q1 = 0, A = 0, w = 0, phi = 0;
  double operator()(double t) const { return q0 + q1 * t + A * std::sin(w * t + phi); }
  double d1(double t) const { return q1 + A * w * std::cos(w * t + phi); }
  double d2(double t) const { return -A * w * w * std::sin(w * t + phi); }
};

struct MechanicsReport {
  double force_error = 0.0;   // relative, max over trajectories
  double moment_error = 0.0;
};

namespace detail {

/// World-frame snapshot of the prescribed motion at one instant.
struct Snapshot {
  Vector3d com, contact;
  Matrix3d body, moto;  // columns are unit axes
};

inline Snapshot snapshot(const geometry::Surface& surf, const MotorcycleParams& p, double s, double y, double th,
                         double c, double d) {
  const auto smp = geometry::sample_at(surf, s, y);
  const kinematics::Pose pose{s, y, th, p.r};
  const Matrix3d b = frame_matrix(kinematics::body_frame_in_world(pose, smp));
  const Vector3d ref = ev(smp.position) + p.r * ev(smp.normal);
  const Vec3<double> rc = dynamics::com_position(c, d, p);
  Snapshot out;
  out.body = b;
  out.com = ref + b * Vector3d(rc.x, rc.y, rc.z);
  out.contact = ref + p.lf * b.col(0) - p.r * b.col(2);
  out.moto.col(0) = b.col(0);
  out.moto.col(1) = std::cos(c) * b.col(1) - std::sin(c) * b.col(2);
  out.moto.col(2) = std::sin(c) * b.col(1) + std::cos(c) * b.col(2);
  return out;
}

/// Fourth-order central first derivative; f(k) evaluates at offset k*h.
template <typename F>
auto d1_4(F&& f, double h) {
  using R = decltype(f(0));
  return R((f(-2) - 8.0 * f(-1) + 8.0 * f(1) - f(2)) / (12.0 * h));
}

}  // namespace detail

/// Net force and moment from the dynamics module against m d2x_com/dt2 and
/// dL/dt obtained by finite differences of world-frame positions and axes
/// along prescribed trajectories. The pose follows pose_rates (RK4); on the
/// cylinder the heading is held constant (w3 = 0).
inline MechanicsReport mechanics_suite(int trajectories = 10, std::uint64_t seed = 5) {
  const MotorcycleParams p{};
  const geometry::Plane plane(1000.0, {-20, 20}, false);
  const geometry::Cylinder cyl(10.0, {-20, 20});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), uw(0.5, 2.0), uph(0.0, 2 * std::numbers::pi);
  MechanicsReport rep;

  const double hi = 1e-3;     // grid and inner stencil step
  const int outer = 10;       // outer step in grid units
  const int half = 2 * outer + 2;
  const int substeps = 10;

  for (int tr = 0; tr < trajectories; ++tr) {
    const bool on_cyl = tr % 2 == 1;
    const geometry::Surface& surf = on_cyl ? static_cast<const geometry::Surface&>(cyl) : plane;
    Smooth v1{12.0 + 4 * u(rng), 2.0 * u(rng), 1.5 * u(rng), uw(rng), uph(rng)};
    Smooth v2{0.5 * u(rng), 0.3 * u(rng), 0.5 * u(rng), uw(rng), uph(rng)};
    Smooth w3{on_cyl ? 0.0 : 0.3 * u(rng), 0.0, on_cyl ? 0.0 : 0.2 * u(rng), uw(rng), uph(rng)};
    Smooth c{0.3 * u(rng), 0.1 * u(rng), 0.2 * u(rng), uw(rng), uph(rng)};
    Smooth d{0.02 * u(rng), 0.0, 0.02 * u(rng), uw(rng), uph(rng)};

    // Integrate the pose on the grid t = (i - half) * hi, centered at t = 0.
    const int G = 2 * half + 1;
    std::vector<std::array<double, 3>> pose(G);
    std::array<double, 3> q{on_cyl ? 2.0 : 10.0, on_cyl ? 0.5 * u(rng) : 2.0 * u(rng), 0.6 * u(rng)};
    auto rhs = [&](double t, const std::array<double, 3>& x) {
      const kinematics::Pose ps{x[0], x[1], x[2], p.r};
      const kinematics::BodyVelocity bv{v1(t), v2(t), w3(t)};
      const auto r = kinematics::pose_rates(ps, bv, geometry::sample_at(surf, x[0], x[1]));
      return std::array<double, 3>{r.s_dot, r.y_dot, r.theta_s_dot};
    };
    pose[0] = q;
    const double dt = hi / substeps;
    for (int i = 1; i < G; ++i) {
      double t = (i - 1 - half) * hi;
      for (int k = 0; k < substeps; ++k, t += dt) {
        auto add = [](const std::array<double, 3>& a, const std::array<double, 3>& b, double f) {
          return std::array<double, 3>{a[0] + f * b[0], a[1] + f * b[1], a[2] + f * b[2]};
        };
        const auto k1 = rhs(t, q);
        const auto k2 = rhs(t + dt / 2, add(q, k1, dt / 2));
        const auto k3 = rhs(t + dt / 2, add(q, k2, dt / 2));
        const auto k4 = rhs(t + dt, add(q, k3, dt));
        for (int j = 0; j < 3; ++j) q[j] += dt / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
      }
      pose[i] = q;
    }
    auto snap = [&](int i) {
      const double t = (i - half) * hi;
      return detail::snapshot(surf, p, pose[i][0], pose[i][1], pose[i][2], c(t), d(t));
    };
    std::vector<detail::Snapshot> sn(G);
    for (int i = 0; i < G; ++i) sn[i] = snap(i);

    // Angular momentum about the COM at grid index i (inner stencil).
    const double spin_coef = p.front.I_spin / p.front.radius + p.rear.I_spin / p.rear.radius;
    Matrix3d inertia;
    inertia << p.I11, p.I12, p.I13, p.I12, p.I22, p.I23, p.I13, p.I23, p.I33;
    auto momentum = [&](int i) {
      const Matrix3d Rd = detail::d1_4([&](int k) { return Matrix3d(sn[i + k].moto); }, hi);
      const Matrix3d W = Rd * sn[i].moto.transpose();
      const Matrix3d Ws = 0.5 * (W - W.transpose());
      const Vector3d omega(Ws(2, 1), Ws(0, 2), Ws(1, 0));
      const Vector3d om_m = sn[i].moto.transpose() * omega;
      const Vector3d vcp = detail::d1_4([&](int k) { return Vector3d(sn[i + k].contact); }, hi);
      const double vt1 = vcp.dot(sn[i].body.col(0));
      return Vector3d(sn[i].moto * (inertia * om_m) + spin_coef * vt1 * sn[i].moto.col(1));
    };
    const double ho = outer * hi;
    const Vector3d acc = (-sn[half - 2 * outer].com + 16.0 * sn[half - outer].com - 30.0 * sn[half].com +
                          16.0 * sn[half + outer].com - sn[half + 2 * outer].com) /
                         (12.0 * ho * ho);
    const Vector3d dL = detail::d1_4([&](int k) { return momentum(half + k * outer); }, ho);
    const Matrix3d& B = sn[half].body;
    const Vector3d F_ref = B.transpose() * (p.m * acc);
    const Vector3d K_ref = B.transpose() * dL;

    dynamics::State z{pose[half][0], pose[half][1], pose[half][2], v1(0), v2(0), w3(0), c(0), c.d1(0), d(0), d.d1(0)};
    dynamics::AlgebraicState a{v1.d1(0), v2.d1(0), w3.d1(0), c.d2(0), 0.0, 0.0};
    dynamics::Input in{0.0, d.d2(0), 0.0, 0.0};
    const auto smp = geometry::sample_at(surf, z.s, z.y);
    const auto kt = dynamics::kinematic_terms(z, a, smp, p);
    const Vector3d F = ev(dynamics::net_force_mechanics(z, a, in, kt, p));
    const Vector3d K = ev(dynamics::net_moment_mechanics(z, a, in, kt, p));
    rep.force_error = std::max(rep.force_error, max_abs_diff(F, F_ref) / std::max(1.0, F_ref.cwiseAbs().maxCoeff()));
    rep.moment_error = std::max(rep.moment_error, max_abs_diff(K, K_ref) / std::max(1.0, K_ref.cwiseAbs().maxCoeff()));
  }
  return rep;
}

// -------------------------------------------------------------- equilibria

/// Largest deviation of the static normal loads from half the weight.
inline double static_load_error(const MotorcycleParams& p = {}) {
  const auto a = sim::static_algebraic(p);
  return std::max(std::abs(a.Fz_f - 1177.2), std::abs(a.Fz_r - 1177.2));
}

/// Reference machine with the camber axis lowered to h / 50, the
/// point-mass regime where the lean angle approaches atan(v^2 / (g R)).
inline MotorcycleParams point_mass_params() {
  MotorcycleParams p{};
  p.r = p.h / 50.0;
  return p;
}

/// Worst relative deviation of the trim camber from atan(v^2 / (g R)).
inline double trim_camber_error(const MotorcycleParams& p, double* worst_residual = nullptr) {
  double worst = 0.0, res = 0.0;
  for (double R : {30.0, 50.0, 100.0}) {
    for (double ratio : {0.1, 0.25, 0.5}) {
      const double v = std::sqrt(ratio * p.g * R);
      const auto t = sim::circular_trim(p, v, R);
      const double ref = std::atan(ratio);
      worst = std::max(worst, std::abs(std::abs(t.z.c) - ref) / ref);
      res = std::max(res, t.residual);
    }
  }
  if (worst_residual) *worst_residual = res;
  return worst;
}

// --------------------------------------------------------------- simulator

/// Richardson ratio |z_h - z_h/2| / |z_h/2 - z_h/4| over a 1 s cornering
/// maneuver started from a circular trim with a time-varying steer input.
inline double richardson_ratio(sim::Scheme scheme = sim::Scheme::ImplicitMidpoint, double h = 0.02) {
  const MotorcycleParams p{};
  const geometry::Plane plane(2000.0, {-500, 500}, false);
  const auto trim = sim::circular_trim(p, 12.0, 40.0);
  const sim::Model model{plane, p};
  const sim::Input u0 = trim.u;
  sim::InputSchedule sched = [u0](double t, const sim::State&) {
    sim::Input u = u0;
    u.gamma += 0.01 * std::sin(3.0 * t);
    u.Fx_r += 40.0 * t;
    return u;
  };
  sim::State z0 = trim.z;
  z0.s = 10.0;
  auto run = [&](double step) {
    sim::SimConfig cfg;
    cfg.step_size = step;
    cfg.newton_tol = 1e-13;
    cfg.scheme = scheme;
    const auto traj = sim::simulate(model, z0, sched, 1.0, cfg, trim.a);
    const auto arr = dynamics::to_array(traj.z.back());
    return Eigen::Map<const Eigen::Matrix<double, 10, 1>>(arr.data()).eval();
  };
  const auto z1 = run(h), z2 = run(h / 2), z3 = run(h / 4);
  return (z1 - z2).norm() / (z2 - z3).norm();
}

}  // namespace nprace::oracles
