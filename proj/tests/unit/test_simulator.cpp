#include <doctest.h>

#include <cmath>

#include "nprace/simulator.hpp"
#include "oracles.hpp"

using namespace nprace;
using namespace nprace::sim;

namespace {

const geometry::Plane& flat() {
  static const geometry::Plane plane(5000.0, {-500, 500}, false);
  return plane;
}

}  // namespace

TEST_CASE("algebraic solve at static and straight-riding states") {
  const MotorcycleParams p{};
  const Model model{flat(), p};
  State z{10.0, 0.0, 0.0};
  auto a = solve_algebraic(model, z, Input{}, AlgebraicState{});
  CHECK(a.Fz_f == doctest::Approx(1177.2).epsilon(1e-12));
  CHECK(a.Fz_r == doctest::Approx(1177.2).epsilon(1e-12));
  CHECK(std::abs(a.v1_dot) < 1e-9);
  z.v1 = 20.0;
  a = solve_algebraic(model, z, Input{}, AlgebraicState{});
  CHECK(std::abs(a.v1_dot) < 1e-9);
  CHECK(std::abs(a.v2_dot) < 1e-9);
  CHECK(std::abs(a.c_ddot) < 1e-9);
  CHECK(a.Fz_f == doctest::Approx(1177.2).epsilon(1e-10));
}

TEST_CASE("circular trim camber approaches the point-mass lean angle") {
  double residual = 0.0;
  CHECK(oracles::trim_camber_error(oracles::point_mass_params(), &residual) <= 0.10);
  CHECK(residual <= 1e-10);
  // With the reference camber-axis height the lean grows well beyond the
  // point-mass angle.
  CHECK(oracles::trim_camber_error(MotorcycleParams{}) > 0.10);
  const MotorcycleParams p{};
  const auto t = circular_trim(p, 15.0, 60.0);
  const auto g = dynamics::dae_residual(t.z, t.u, t.a, geometry::evaluate_surface(flat(), 1.0, 0.0), p);
  for (double gi : g) CHECK(std::abs(gi) <= 1e-8 * p.weight());
}

TEST_CASE("implicit midpoint is second order on a cornering maneuver") {
  const double ratio = oracles::richardson_ratio(Scheme::ImplicitMidpoint);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("rk4 converges faster than second order") {
  CHECK(oracles::richardson_ratio(Scheme::Rk4, 0.05) > 8.0);
}

TEST_CASE("equilibrium and straight riding steps") {
  const MotorcycleParams p{};
  const Model model{flat(), p};
  const State rest{10.0, 0.0, 0.0};
  const InputSchedule none = [](double, const State&) { return Input{}; };
  const auto r = step(model, 0.0, rest, none, static_algebraic(p), SimConfig{});
  const auto x0 = dynamics::to_array(rest), x1 = dynamics::to_array(r.z);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(x1[i] - x0[i]) <= 1e-12);

  State ride = rest;
  ride.v1 = 20.0;
  SimConfig cfg;
  cfg.step_size = 0.05;
  const auto s = step(model, 0.0, ride, none, static_algebraic(p), cfg);
  CHECK(s.z.s == doctest::Approx(11.0).epsilon(1e-12));
  CHECK(std::abs(s.z.y) < 1e-12);
  CHECK(s.z.v1 == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("constant trim inputs hold a constant trajectory") {
  const MotorcycleParams p{};
  const Model model{flat(), p};
  const auto t = circular_trim(p, 10.0, 40.0);
  const Input u = t.u;
  const auto tr = simulate(model, t.z, [u](double, const State&) { return u; }, 0.5, SimConfig{}, t.a);
  const auto& end = tr.z.back();
  CHECK(end.v1 == doctest::Approx(t.z.v1).epsilon(1e-6));
  CHECK(end.c == doctest::Approx(t.z.c).epsilon(1e-4));
  CHECK(end.w3 == doctest::Approx(t.z.w3).epsilon(1e-6));
  CHECK(tr.t.back() == 0.5);
  for (double r : tr.residual) CHECK(r <= 1e-10);
}

TEST_CASE("upright riding is unstable in roll") {
  const MotorcycleParams p{};
  const Model model{flat(), p};
  State z{10.0, 0.0, 0.0};
  z.v1 = 1.0;
  z.c = 1e-4;
  const auto tr = simulate(model, z, [](double, const State&) { return Input{}; }, 0.5);
  CHECK(tr.z.back().c > 2e-4);
  for (std::size_t i = 1; i < tr.z.size(); ++i) CHECK(tr.z[i].c >= tr.z[i - 1].c);
}

TEST_CASE("low speed and bad configuration are rejected") {
  const MotorcycleParams p{};
  const Model model{flat(), p};
  State z{10.0, 0.0, 0.0};
  z.v1 = 0.2;
  const InputSchedule none = [](double, const State&) { return Input{}; };
  CHECK_THROWS_AS(step(model, 0.0, z, none, AlgebraicState{}, SimConfig{}), LowSpeedError);
  SimConfig bad;
  bad.step_size = 0.0;
  z.v1 = 10.0;
  CHECK_THROWS_AS(step(model, 0.0, z, none, AlgebraicState{}, bad), DomainError);
  CHECK_THROWS_AS(simulate(model, z, none, -1.0), DomainError);
}
