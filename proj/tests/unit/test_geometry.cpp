#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nprace/geometry/analytic.hpp"
#include "oracles.hpp"

using namespace nprace;
using namespace nprace::geometry;

TEST_CASE("analytic surfaces match closed-form forms, normals and theta_p") {
  const auto rep = oracles::geometry_suite(100);
  CHECK(rep.analytic_error <= 1e-9);
  CHECK(rep.fd_error <= 1e-6);
  CHECK(rep.symmetry_error <= 1e-12);
}

TEST_CASE("bundled spline tracks have derivatives consistent with finite differences") {
  const auto rep = oracles::geometry_suite(0, {"tracks/flat_ring.json", "tracks/stadium.json",
                                                "tracks/nonplanar_sample.json"});
  CHECK(rep.fd_error <= 1e-6);
}

TEST_CASE("canonical plane sample") {
  const Plane plane(100.0, {-5, 5});
  const auto s = evaluate_surface(plane, 12.0, -3.0);
  CHECK(s.form1.m11 == 1.0);
  CHECK(s.form1.m22 == 1.0);
  CHECK(s.form1.m12 == 0.0);
  CHECK(s.form2.m11 == 0.0);
  CHECK(s.normal.z == 1.0);
  CHECK(s.theta_p == 0.0);
}

TEST_CASE("cylinder valley and crest carry opposite curvature in s") {
  const double R = 10.0;
  const auto v = evaluate_surface(Cylinder(R, {-4, 4}, true), 3.0, 1.0);
  const auto c = evaluate_surface(Cylinder(R, {-4, 4}, false), 3.0, 1.0);
  CHECK(v.form2.m11 == doctest::Approx(1.0 / R).epsilon(1e-12));
  CHECK(c.form2.m11 == doctest::Approx(-1.0 / R).epsilon(1e-12));
  CHECK(std::abs(v.form2.m22) < 1e-15);
  CHECK(std::abs(v.form2.m12) < 1e-15);
}

TEST_CASE("sphere has equal principal curvature magnitudes at the equator") {
  const double R = 20.0;
  const auto s = evaluate_surface(SpherePatch(R, {-8, 8}), 5.0, 0.0);
  CHECK(std::abs(s.form2.m11) == doctest::Approx(1.0 / R).epsilon(1e-12));
  CHECK(std::abs(s.form2.m22) == doctest::Approx(1.0 / R).epsilon(1e-12));
}

TEST_CASE("periodic surfaces agree at s = 0 and s = L") {
  const Ring ring(50.0, {-6, 6}, 0.2);
  for (double y : {-5.0, 0.0, 4.0}) {
    const auto a = ring.partials(0.0, y);
    const auto b = ring.partials(ring.length(), y);
    CHECK(oracles::max_abs_diff(oracles::ev(a.x), oracles::ev(b.x)) < 1e-9);
    CHECK(oracles::max_abs_diff(oracles::ev(a.xs), oracles::ev(b.xs)) < 1e-9);
  }
  const auto track = build_track(load_track_file(testing::data_path("tracks/nonplanar_sample.json")));
  for (double y : {-5.0, 0.0, 5.0}) {
    const auto a = evaluate_surface(*track, 0.0, y);
    const auto b = evaluate_surface(*track, track->length(), y);
    CHECK(oracles::max_abs_diff(oracles::ev(a.position), oracles::ev(b.position)) < 1e-9);
    CHECK(oracles::max_abs_diff(oracles::ev(a.normal), oracles::ev(b.normal)) < 1e-9);
    CHECK(std::abs(a.form2.m11 - b.form2.m11) < 1e-9);
  }
}

TEST_CASE("domain and regularity errors") {
  const Plane open(100.0, {-5, 5}, false);
  CHECK_THROWS_AS(evaluate_surface(open, 50.0, 6.0), DomainError);
  CHECK_THROWS_AS(evaluate_surface(open, 101.0, 0.0), DomainError);
  CHECK_THROWS_AS(evaluate_surface(open, std::nan(""), 0.0), DomainError);
  const Plane degenerate(100.0, {-5, 5}, false, {1, 0, 0}, {2, 0, 0});
  CHECK_THROWS_AS(evaluate_surface(degenerate, 1.0, 0.0), RegularityError);
  const Plane nearly(100.0, {-5, 5}, false, {1, 0, 0}, {1, 1e-8, 0});
  CHECK_THROWS_AS(evaluate_surface(nearly, 1.0, 0.0), RegularityError);
}

TEST_CASE("AD evaluation agrees with the double path") {
  const Ring ring(50.0, {-6, 6}, 0.3);
  const double s = 17.0, y = 2.5;
  const auto d = evaluate_surface(ring, s, y);
  const auto g = sample_at(ring, ad::seed<ad::Grad>(s, 0), ad::seed<ad::Grad>(y, 1));
  CHECK(g.form2.m11.v == doctest::Approx(d.form2.m11).epsilon(1e-15));
  CHECK(g.theta_p.v == doctest::Approx(d.theta_p));
  // d(form1_ss)/dy against a central difference.
  const double fd = testing::central_diff([&](double t) { return evaluate_surface(ring, s, t).form1.m11; }, y, 1e-5);
  CHECK(g.form1.m11.d[1] == doctest::Approx(fd).epsilon(1e-8));
}
