#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "nprace/geometry/analytic.hpp"
#include "nprace/geometry/track.hpp"
#include "nprace/raceline/raceline.hpp"
#include "nprace/raceline/transcription.hpp"
#include "support.hpp"

using namespace nprace;
using namespace nprace::raceline;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

RacelineProblem ring_problem(double bank = 0.0) {
  RacelineProblem p;
  p.surface = std::make_shared<geometry::Ring>(50.0, geometry::LateralBounds{-5, 5}, bank);
  return p;
}

CollocationConfig small_config(int K = 8, int degree = 2) {
  CollocationConfig c;
  c.num_intervals = K;
  c.degree = degree;
  return c;
}

/// Guess plus a small seeded perturbation so no derivative term vanishes.
VectorXd perturbed_guess(const Transcription& tr, std::uint64_t seed) {
  VectorXd x = initial_guess(tr, GuessKind::SteadyState);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < x.size(); ++i) x(i) += 1e-2 * u(rng) * std::max(1.0, std::abs(x(i)) * 0.1);
  return x;
}

MatrixXd dense_jacobian(const Transcription& tr, const VectorXd& x) {
  VectorXd v;
  tr.jacobian_values(x, v);
  MatrixXd J = MatrixXd::Zero(tr.num_constraints(), tr.num_variables());
  const auto& st = tr.jacobian_structure();
  for (std::size_t k = 0; k < st.size(); ++k) J(st[k].first, st[k].second) += v(k);
  return J;
}

}  // namespace

TEST_CASE("layout counts follow the interval formula") {
  const Transcription tr(ring_problem(), small_config(50, 3));
  CHECK(tr.num_variables() == 50 * (9 + 3 * (9 + 6 + 4)));
  CHECK(tr.num_constraints() == 50 * (3 * (9 + 6 + 6) + 9));
  CHECK(tr.node_offset(1, 1) == tr.interval_offset(1) + 9);
  CHECK(tr.interval_length() == doctest::Approx(2 * 3.14159265358979 * 50.0 / 50));
}

TEST_CASE("constraint Jacobian and objective gradient match finite differences") {
  const Transcription tr(ring_problem(0.25), small_config());
  const VectorXd x = perturbed_guess(tr, 1);
  const MatrixXd J = dense_jacobian(tr, x);
  VectorXd g;
  tr.gradient(x, g);
  MatrixXd Jfd(tr.num_constraints(), tr.num_variables());
  VectorXd gfd(tr.num_variables());
  for (int i = 0; i < tr.num_variables(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    VectorXd cp, cm;
    tr.constraints(xp, cp);
    tr.constraints(xm, cm);
    Jfd.col(i) = (cp - cm) / (2 * h);
    gfd(i) = (tr.objective(xp) - tr.objective(xm)) / (2 * h);
  }
  const double jscale = std::max(1.0, J.cwiseAbs().maxCoeff());
  CHECK((J - Jfd).cwiseAbs().maxCoeff() / jscale <= 1e-6);
  CHECK((g - gfd).cwiseAbs().maxCoeff() / std::max(1.0, g.cwiseAbs().maxCoeff()) <= 1e-6);
}

TEST_CASE("Lagrangian Hessian matches finite differences of the gradient") {
  const Transcription tr(ring_problem(0.25), small_config());
  const VectorXd x = perturbed_guess(tr, 2);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXd lambda(tr.num_constraints());
  for (int i = 0; i < lambda.size(); ++i) lambda(i) = u(rng);
  const double sigma = 0.7;
  VectorXd hv;
  tr.hessian_values(x, sigma, lambda, hv);
  MatrixXd H = MatrixXd::Zero(tr.num_variables(), tr.num_variables());
  const auto& hs = tr.hessian_structure();
  for (std::size_t k = 0; k < hs.size(); ++k) {
    CHECK(hs[k].first >= hs[k].second);
    H(hs[k].first, hs[k].second) += hv(k);
  }
  H = H.selfadjointView<Eigen::Lower>();
  auto lag_grad = [&](const VectorXd& z) {
    VectorXd g;
    tr.gradient(z, g);
    return VectorXd(sigma * g + dense_jacobian(tr, z).transpose() * lambda);
  };
  MatrixXd Hfd(tr.num_variables(), tr.num_variables());
  for (int i = 0; i < tr.num_variables(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    Hfd.col(i) = (lag_grad(xp) - lag_grad(xm)) / (2 * h);
  }
  CHECK((H - Hfd).cwiseAbs().maxCoeff() / std::max(1.0, H.cwiseAbs().maxCoeff()) <= 1e-5);
}

TEST_CASE("serial and parallel node kernels are identical") {
  const Transcription tr(ring_problem(0.1), small_config(16, 3));
  const VectorXd x = perturbed_guess(tr, 3);
  CHECK(tr.node_values(x, ExecutionMode::Serial) == tr.node_values(x, ExecutionMode::Parallel));
  std::vector<double> v1, j1, v2, j2;
  tr.node_jacobians(x, ExecutionMode::Serial, v1, j1);
  tr.node_jacobians(x, ExecutionMode::Parallel, v2, j2);
  CHECK(v1 == v2);
  CHECK(j1 == j2);
  const VectorXd lambda = VectorXd::LinSpaced(tr.num_constraints(), -1.0, 1.0);
  CHECK(tr.node_hessians(x, 1.0, lambda, ExecutionMode::Serial) ==
        tr.node_hessians(x, 1.0, lambda, ExecutionMode::Parallel));
}

TEST_CASE("constant-speed centerline gives lap time L / s_dot") {
  const Transcription tr(ring_problem(), small_config(12, 3));
  const VectorXd x = initial_guess(tr, GuessKind::Centerline);
  const double v = initial_guess_speed(tr.problem());
  CHECK(tr.objective(x) == doctest::Approx(2 * 3.14159265358979323846 * 50.0 / v).epsilon(1e-12));
}

TEST_CASE("steady-state guess satisfies the DAE on a flat ring") {
  const Transcription tr(ring_problem(), small_config(12, 3));
  const VectorXd x = initial_guess(tr, GuessKind::SteadyState);
  VectorXd c;
  tr.constraints(x, c);
  double worst = 0.0;
  for (int k = 0; k < tr.num_intervals(); ++k)
    for (int j = 1; j <= tr.degree(); ++j)
      for (int i = 0; i < kNumDae; ++i) worst = std::max(worst, std::abs(c(tr.dae_row(k, j, i))));
  CHECK(worst <= 1e-8);
}

TEST_CASE("guess on the nonplanar track stays finite") {
  RacelineProblem p;
  p.surface = geometry::build_track(geometry::load_track_file(testing::data_path("tracks/nonplanar_sample.json")));
  const Transcription tr(p, small_config(20, 3));
  for (auto kind : {GuessKind::Centerline, GuessKind::SteadyState}) {
    const VectorXd x = initial_guess(tr, kind);
    CHECK(x.allFinite());
    VectorXd c;
    tr.constraints(x, c);
    CHECK(c.allFinite());
  }
}

TEST_CASE("configuration validation") {
  CollocationConfig c = small_config();
  CHECK_NOTHROW(validate(c));
  c.num_intervals = 2;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = small_config();
  c.degree = 7;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = small_config();
  c.attempts = 0;
  CHECK_THROWS_AS(validate(c), ValidationError);
}

TEST_CASE("constant-speed baseline") {
  const MotorcycleParams p{};
  const auto b = constant_speed_baseline(p, 50.0, 2 * 3.14159265358979 * 50.0);
  CHECK(b.speed > 5.0);
  CHECK(b.lap_time == doctest::Approx(2 * 3.14159265358979 * 50.0 / b.speed));
}

TEST_CASE("small raceline solve and solution files") {
  CollocationConfig c = small_config(10, 2);
  const auto sol = solve_raceline(ring_problem(), c);
  REQUIRE(sol.converged);
  CHECK(sol.replay_residual <= kReplayTol);
  CHECK(sol.periodicity_gap <= 1e-6);
  CHECK(sol.lap_time < constant_speed_baseline(MotorcycleParams{}, 50.0, 2 * 3.14159265358979 * 50.0).lap_time);
  const auto again = solution_from_json(solution_to_json(sol));
  CHECK(again.lap_time == sol.lap_time);
  CHECK(again.nodes.size() == sol.nodes.size());
  CHECK(solution_to_json(again) == solution_to_json(sol));
}
