#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nprace/dynamics.hpp"
#include "oracles.hpp"

using namespace nprace;
using namespace nprace::dynamics;

namespace {

const geometry::Plane& flat() {
  static const geometry::Plane plane(1000.0, {-50, 50}, false);
  return plane;
}

geometry::SurfaceSample at(double s, double y) { return geometry::evaluate_surface(flat(), s, y); }

}  // namespace

TEST_CASE("net force and moment match finite-difference momentum rates") {
  const auto rep = oracles::mechanics_suite(10);
  CHECK(rep.force_error <= 1e-6);
  CHECK(rep.moment_error <= 1e-6);
}

TEST_CASE("COM position") {
  const MotorcycleParams p{};
  auto r = com_position(0.0, 0.0, p);
  CHECK(r.x == 0.0);
  CHECK(r.y == 0.0);
  CHECK(r.z == doctest::Approx(0.4));
  r = com_position(std::numbers::pi / 2, 0.0, p);
  CHECK(r.y == doctest::Approx(0.4));
  CHECK(std::abs(r.z) < 1e-15);
  // 2D rotation of (d, h - r) by c in the e2-e3 plane.
  const double c = 0.3, d = 0.05, a = 0.4;
  r = com_position(c, d, p);
  CHECK(r.y == doctest::Approx(std::cos(c) * d + std::sin(c) * a));
  CHECK(r.z == doctest::Approx(-std::sin(c) * d + std::cos(c) * a));
}

TEST_CASE("static upright balance") {
  const MotorcycleParams p{};
  CHECK(oracles::static_load_error(p) <= 1e-9);
  const State z{10.0, 0.0, 0.0};
  const AlgebraicState a = sim::static_algebraic(p);
  const auto g = dae_residual(z, Input{}, a, at(10.0, 0.0), p);
  for (double gi : g) CHECK(std::abs(gi) <= 1e-9);
  // Perturbing the front load only touches the normal force and pitch rows.
  AlgebraicState b = a;
  b.Fz_f += 100.0;
  const auto h = dae_residual(z, Input{}, b, at(10.0, 0.0), p);
  CHECK(std::abs(h[0]) < 1e-12);
  CHECK(std::abs(h[1]) < 1e-12);
  CHECK(std::abs(h[2]) == doctest::Approx(100.0));
  CHECK(std::abs(h[3]) < 1e-12);
  CHECK(std::abs(h[4]) > 1.0);
  CHECK(std::abs(h[5]) < 1e-12);
}

TEST_CASE("applied loads at rest") {
  const MotorcycleParams p{};
  const State z{10.0, 0.0, 0.0};
  const AlgebraicState a{0, 0, 0, 0, 1000.0, 1000.0};
  const KinematicTerms<double> k = kinematic_terms(z, a, at(10.0, 0.0), p);
  const auto w = applied_force_moment(z, a, Input{}, k, p);
  CHECK(w.force.z == doctest::Approx(2000.0 - 2354.4));
  CHECK(w.force.x == 0.0);
  CHECK(w.force.y == 0.0);
}

TEST_CASE("cambered static state has a heeling moment against the load pair") {
  const MotorcycleParams p{};
  State z{10.0, 0.0, 0.0};
  z.c = 0.2;
  const AlgebraicState a = sim::static_algebraic(p);
  const auto k = kinematic_terms(z, a, at(10.0, 0.0), p);
  const auto w = applied_force_moment(z, a, Input{}, k, p);
  // About the COM the normal loads act with lateral arm -(h - r) sin c.
  CHECK(w.moment.x == doctest::Approx(-(a.Fz_f + a.Fz_r) * (p.h - p.r) * std::sin(0.2)).epsilon(1e-12));
}

TEST_CASE("point-mass and single-axis reductions") {
  const MotorcycleParams p{};
  State z{10.0, 0.0, 0.0};
  z.v1 = 15.0;
  AlgebraicState a{};
  a.v1_dot = 2.0;
  const auto k = kinematic_terms(z, a, at(10.0, 0.0), p);
  const auto f = net_force_mechanics(z, a, Input{}, k, p);
  CHECK(f.x == doctest::Approx(p.m * 2.0));

  State r{10.0, 0.0, 0.0};
  AlgebraicState b{};
  b.c_ddot = 1.5;
  const auto kr = kinematic_terms(r, b, at(10.0, 0.0), p);
  const auto m = net_moment_mechanics(r, b, Input{}, kr, p);
  CHECK(std::abs(m.x) == doctest::Approx(p.I11 * 1.5));

  const State rest{10.0, 0.0, 0.0};
  const auto k0 = kinematic_terms(rest, AlgebraicState{}, at(10.0, 0.0), p);
  const auto f0 = net_force_mechanics(rest, AlgebraicState{}, Input{}, k0, p);
  const auto m0 = net_moment_mechanics(rest, AlgebraicState{}, Input{}, k0, p);
  CHECK(norm(f0) == 0.0);
  CHECK(norm(m0) == 0.0);
}

TEST_CASE("gyroscopic moment of spinning wheels while yawing") {
  MotorcycleParams p{};
  p.I11 = p.I22 = p.I33 = 0.0;
  State z{10.0, 0.0, 0.0};
  z.v1 = 20.0;
  z.w3 = 0.4;
  const auto k = kinematic_terms(z, AlgebraicState{}, at(10.0, 0.0), p);
  const auto m = net_moment_mechanics(z, AlgebraicState{}, Input{}, k, p);
  const double spin = wheel_spin_momentum(20.0, p.front) + wheel_spin_momentum(20.0, p.rear);
  // w x (0, spin, 0) with w = (0, 0, w3).
  CHECK(m.x == doctest::Approx(-0.4 * spin));
  CHECK(std::abs(m.y) < 1e-12);
  CHECK(std::abs(m.z) < 1e-12);
}

TEST_CASE("state derivative plumbing") {
  const MotorcycleParams p{};
  const geometry::Ring ring(50.0, {-6, 6}, 0.2);
  State z{5.0, 1.0, 0.1, 12.0, 0.3, 0.2, 0.1, 0.05, 0.01, 0.0};
  const Input u{0.05, 0.2, 0.0, 100.0};
  const AlgebraicState a{0.5, 0.1, 0.02, 0.3, 1100.0, 1200.0};
  const auto smp = geometry::evaluate_surface(ring, z.s, z.y);
  const auto f = state_derivative(z, u, a, smp, p);
  const auto r = kinematics::pose_rates(pose_of(z, p), kinematics::BodyVelocity{z.v1, z.v2, z.w3}, smp);
  CHECK(f[0] == r.s_dot);
  CHECK(f[1] == r.y_dot);
  CHECK(f[2] == r.theta_s_dot);
  CHECK(f[3] == a.v1_dot);
  CHECK(f[6] == z.c_dot);
  CHECK(f[7] == a.c_ddot);
  CHECK(f[9] == u.d_ddot);
  const auto f0 = state_derivative(z, Input{}, AlgebraicState{}, smp, p);
  for (int i = 3; i < 10; ++i) {
    if (i != 6 && i != 8) CHECK(f0[i] == 0.0);
  }
}

TEST_CASE("straight riding on a plane follows planar kinematics") {
  const MotorcycleParams p{};
  State z{10.0, 0.0, 0.0};
  z.v1 = 20.0;
  const auto f = state_derivative(z, Input{}, sim::static_algebraic(p), at(10.0, 0.0), p);
  CHECK(f[0] == 20.0);
  CHECK(f[1] == 0.0);
  CHECK(f[2] == 0.0);
}

TEST_CASE("drag opposes forward motion") {
  MotorcycleParams p{};
  p.drag.enabled = true;
  State z{10.0, 0.0, 0.0};
  z.v1 = 30.0;
  const auto a = sim::static_algebraic(p);
  const auto k = kinematic_terms(z, a, at(10.0, 0.0), p);
  const auto w = applied_force_moment(z, a, Input{}, k, p);
  CHECK(w.force.x == doctest::Approx(-0.5 * p.drag.rho * p.drag.CdA * 900.0));
}
