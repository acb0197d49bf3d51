#include "nprace/simulator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "nprace/geometry/analytic.hpp"

namespace nprace::sim {

namespace {

using ad::Grad;
template <int N>
using Vec = Eigen::Matrix<double, N, 1>;
template <int N>
using Mat = Eigen::Matrix<double, N, N>;

bool at_rest(const State& z) { return z.v1 == 0.0 && z.v2 == 0.0 && z.w3 == 0.0; }

void check_speed(const State& z, const SimConfig& cfg) {
  if (!at_rest(z) && !(std::abs(z.v1) >= cfg.min_speed)) {
    throw LowSpeedError("forward speed " + std::to_string(z.v1) + " m/s below the simulation limit " +
                        std::to_string(cfg.min_speed) + " m/s at s=" + std::to_string(z.s));
  }
}

template <typename T>
std::array<T, 6> scale_residual(const std::array<T, 6>& g, const MotorcycleParams& p) {
  const double inv = 1.0 / p.weight();
  std::array<T, 6> out;
  for (int i = 0; i < 6; ++i) out[i] = g[i] * inv;
  return out;
}

template <typename T>
std::array<T, 6> residual_t(const Model& m, const dynamics::BasicState<T>& z, const dynamics::BasicInput<T>& u,
                            const dynamics::BasicAlgebraic<T>& a) {
  const auto sample = geometry::sample_at<T>(m.surface, z.s, z.y);
  return scale_residual(dynamics::dae_residual(z, u, a, sample, m.params), m.params);
}

template <typename T>
dynamics::BasicState<T> lift_state(const State& z) {
  return {T(z.s), T(z.y), T(z.theta_s), T(z.v1), T(z.v2), T(z.w3), T(z.c), T(z.c_dot), T(z.d), T(z.d_dot)};
}
template <typename T>
dynamics::BasicInput<T> lift_input(const Input& u) {
  return {T(u.gamma), T(u.d_ddot), T(u.Fx_f), T(u.Fx_r)};
}

/// Damped Newton. `eval` maps x (seeded Grad) to N residuals.
template <int N, typename F>
Vec<N> newton(F&& eval, Vec<N> x, const SimConfig& cfg, const std::string& what, double* final_norm = nullptr) {
  static_assert(N <= ad::kDirections);
  auto evaluate = [&](const Vec<N>& xv, Mat<N>* jac) {
    std::array<Grad, N> xs;
    for (int i = 0; i < N; ++i) xs[i] = ad::seed<Grad>(xv(i), i);
    const std::array<Grad, N> r = eval(xs);
    Vec<N> out;
    for (int i = 0; i < N; ++i) {
      out(i) = r[i].v;
      if (jac) {
        for (int j = 0; j < N; ++j) (*jac)(i, j) = r[i].d[j];
      }
    }
    return out;
  };
  Mat<N> jac;
  Vec<N> r = evaluate(x, &jac);
  double rn = r.template lpNorm<Eigen::Infinity>();
  for (int it = 0; it < cfg.max_newton_iters && !(rn <= cfg.newton_tol); ++it) {
    if (!r.allFinite() || !jac.allFinite()) throw NonconvergenceError(what + ": non-finite residual or Jacobian");
    Eigen::FullPivLU<Mat<N>> lu(jac);
    if (!lu.isInvertible()) throw ConfigurationError(what + ": singular Jacobian");
    const Vec<N> dx = -lu.solve(r);
    double t = 1.0;
    Vec<N> xn;
    Vec<N> rnew;
    double nn = 0.0;
    for (int k = 0; k < 30; ++k) {
      xn = x + t * dx;
      try {
        rnew = evaluate(xn, nullptr);
        nn = rnew.template lpNorm<Eigen::Infinity>();
      } catch (const Error&) {
        nn = std::numeric_limits<double>::infinity();
      }
      if (std::isfinite(nn) && (nn < rn || t < 1e-3)) break;
      t *= 0.5;
    }
    if (!std::isfinite(nn)) throw NonconvergenceError(what + ": line search failed");
    x = xn;
    r = evaluate(x, &jac);
    rn = r.template lpNorm<Eigen::Infinity>();
  }
  if (final_norm) *final_norm = rn;
  if (!(rn <= cfg.newton_tol)) {
    throw NonconvergenceError(what + ": residual " + std::to_string(rn) + " after " +
                              std::to_string(cfg.max_newton_iters) + " iterations");
  }
  return x;
}

std::array<double, 10> derivative(const Model& m, const State& z, const Input& u, const AlgebraicState& a) {
  const auto sample = geometry::sample_at<double>(m.surface, z.s, z.y);
  return dynamics::state_derivative(z, u, a, sample, m.params, m.options);
}

State add(const State& z, const std::array<double, 10>& dz, double h) {
  auto x = dynamics::to_array(z);
  for (int i = 0; i < 10; ++i) x[i] += h * dz[i];
  return dynamics::state_from_array(x);
}

StepResult step_midpoint(const Model& m, double t, const State& z0, const InputSchedule& uf, const AlgebraicState& ag,
                         const SimConfig& cfg) {
  const double h = cfg.step_size;
  const std::array<double, 10> x0 = dynamics::to_array(z0);
  Vec<16> x;
  {
    // Explicit Euler predictor with the warm-start algebraic state.
    const auto f0 = derivative(m, z0, uf(t, z0), ag);
    for (int i = 0; i < 10; ++i) x(i) = x0[i] + h * f0[i];
    const auto aa = dynamics::to_array(ag);
    for (int i = 0; i < 6; ++i) x(10 + i) = aa[i];
  }
  auto eval = [&](const std::array<Grad, 16>& v) {
    std::array<Grad, 10> zm;
    std::array<double, 10> zmv;
    for (int i = 0; i < 10; ++i) {
      zm[i] = 0.5 * (v[i] + Grad(x0[i]));
      zmv[i] = zm[i].v;
    }
    const auto zs = dynamics::state_from_array(zm);
    const auto u = lift_input<Grad>(uf(t + 0.5 * h, dynamics::state_from_array(zmv)));
    const dynamics::BasicAlgebraic<Grad> a{v[10], v[11], v[12], v[13], v[14], v[15]};
    const auto sample = geometry::sample_at<Grad>(m.surface, zs.s, zs.y);
    const auto f = dynamics::state_derivative(zs, u, a, sample, m.params, m.options);
    const auto g = scale_residual(dynamics::dae_residual(zs, u, a, sample, m.params), m.params);
    std::array<Grad, 16> r;
    for (int i = 0; i < 10; ++i) r[i] = v[i] - Grad(x0[i]) - h * f[i];
    for (int i = 0; i < 6; ++i) r[10 + i] = g[i];
    return r;
  };
  double rn = 0.0;
  x = newton<16>(eval, x, cfg, "implicit midpoint step at t=" + std::to_string(t), &rn);
  StepResult out;
  std::array<double, 10> z1;
  for (int i = 0; i < 10; ++i) z1[i] = x(i);
  out.z = dynamics::state_from_array(z1);
  out.a_stage = {x(10), x(11), x(12), x(13), x(14), x(15)};
  out.max_stage_residual = rn;
  return out;
}

StepResult step_rk4(const Model& m, double t, const State& z0, const InputSchedule& uf, const AlgebraicState& ag,
                    const SimConfig& cfg) {
  const double h = cfg.step_size;
  StepResult out;
  AlgebraicState a = ag;
  auto stage = [&](double ts, const State& zs) {
    const Input u = uf(ts, zs);
    a = solve_algebraic(m, zs, u, a, cfg);
    const auto g = scaled_residual(m, zs, u, a);
    for (double gi : g) out.max_stage_residual = std::max(out.max_stage_residual, std::abs(gi));
    return derivative(m, zs, u, a);
  };
  const auto k1 = stage(t, z0);
  const auto k2 = stage(t + 0.5 * h, add(z0, k1, 0.5 * h));
  const auto k3 = stage(t + 0.5 * h, add(z0, k2, 0.5 * h));
  const auto k4 = stage(t + h, add(z0, k3, h));
  std::array<double, 10> dz;
  for (int i = 0; i < 10; ++i) dz[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
  out.z = add(z0, dz, h);
  out.a_stage = a;
  return out;
}

}  // namespace

std::array<double, 6> scaled_residual(const Model& model, const State& z, const Input& u, const AlgebraicState& a) {
  return residual_t<double>(model, z, u, a);
}

AlgebraicState solve_algebraic(const Model& model, const State& z, const Input& u, const AlgebraicState& guess,
                               const SimConfig& cfg) {
  const auto zs = lift_state<Grad>(z);
  const auto us = lift_input<Grad>(u);
  const auto sample = geometry::sample_at<Grad>(model.surface, zs.s, zs.y);
  auto eval = [&](const std::array<Grad, 6>& v) {
    const dynamics::BasicAlgebraic<Grad> a{v[0], v[1], v[2], v[3], v[4], v[5]};
    return scale_residual(dynamics::dae_residual(zs, us, a, sample, model.params), model.params);
  };
  const auto g0 = dynamics::to_array(guess);
  Vec<6> x;
  for (int i = 0; i < 6; ++i) x(i) = g0[i];
  x = newton<6>(eval, x, cfg, "algebraic solve at s=" + std::to_string(z.s));
  return {x(0), x(1), x(2), x(3), x(4), x(5)};
}

StepResult step(const Model& model, double t, const State& z, const InputSchedule& u, const AlgebraicState& a_guess,
                const SimConfig& cfg) {
  if (!(cfg.step_size > 0.0)) throw DomainError("step size must be positive");
  check_speed(z, cfg);
  StepResult r = cfg.scheme == Scheme::ImplicitMidpoint ? step_midpoint(model, t, z, u, a_guess, cfg)
                                                        : step_rk4(model, t, z, u, a_guess, cfg);
  check_speed(r.z, cfg);
  return r;
}

Trajectory simulate(const Model& model, const State& initial, const InputSchedule& u, double duration,
                    const SimConfig& cfg, const AlgebraicState& a_guess) {
  if (!(duration >= 0.0)) throw DomainError("duration must be non-negative");
  Trajectory tr;
  AlgebraicState a = solve_algebraic(model, initial, u(0.0, initial), a_guess, cfg);
  tr.t.push_back(0.0);
  tr.z.push_back(initial);
  tr.a.push_back(a);
  tr.residual.push_back(0.0);
  double t = 0.0;
  State z = initial;
  const int n = static_cast<int>(std::ceil(duration / cfg.step_size - 1e-9));
  for (int k = 0; k < n; ++k) {
    SimConfig c = cfg;
    c.step_size = std::min(cfg.step_size, duration - t);
    const StepResult r = step(model, t, z, u, a, c);
    t = k + 1 == n ? duration : t + c.step_size;
    z = r.z;
    a = solve_algebraic(model, z, u(t, z), r.a_stage, cfg);
    tr.t.push_back(t);
    tr.z.push_back(z);
    tr.a.push_back(a);
    tr.residual.push_back(r.max_stage_residual);
  }
  return tr;
}

AlgebraicState static_algebraic(const MotorcycleParams& p) {
  const double w = p.weight();
  return {0.0, 0.0, 0.0, 0.0, w * p.lr / (p.lf + p.lr), w * p.lf / (p.lf + p.lr)};
}

TrimPoint circular_trim(const MotorcycleParams& p, double speed, double radius, const SimConfig& cfg) {
  if (!(speed > 0.0) || !(radius > 0.0)) throw DomainError("trim needs positive speed and radius");
  const geometry::Plane plane(1e4, {-1e3, 1e3}, false);
  const Model model{plane, p, cfg.model};
  const double w3 = speed / radius;
  auto eval = [&](const std::array<Grad, 6>& v) {
    dynamics::BasicState<Grad> z{};
    z.s = Grad(1.0);
    z.v1 = Grad(speed);
    z.v2 = v[1];
    z.w3 = Grad(w3);
    z.c = v[0];
    dynamics::BasicInput<Grad> u{};
    u.gamma = v[2];
    u.Fx_r = v[5];
    dynamics::BasicAlgebraic<Grad> a{};
    a.Fz_f = v[3];
    a.Fz_r = v[4];
    return residual_t<Grad>(model, z, u, a);
  };
  const AlgebraicState st = static_algebraic(p);
  Vec<6> x;
  x << std::atan(speed * speed / (p.g * radius)), 0.0, (p.lf + p.lr) / radius, st.Fz_f, st.Fz_r, 0.0;
  TrimPoint out;
  x = newton<6>(eval, x, cfg, "circular trim", &out.residual);
  out.z = {1.0, 0.0, 0.0, speed, x(1), w3, x(0), 0.0, 0.0, 0.0};
  out.u = {x(2), 0.0, 0.0, x(5)};
  out.a = {0.0, 0.0, 0.0, 0.0, x(3), x(4)};
  return out;
}

}  // namespace nprace::sim
