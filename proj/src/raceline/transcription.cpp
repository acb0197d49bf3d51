#include "nprace/raceline/transcription.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "nprace/errors.hpp"
#include "nprace/kinematics.hpp"
#include "nprace/simulator.hpp"

namespace nprace::raceline {

using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kHessPacked = kNumNodeVars * (kNumNodeVars + 1) / 2;

/// Runs body(i) for i in [0, n), serially or with OpenMP, and rethrows the
/// first exception after the loop.
template <typename Body>
void for_each_node(int n, ExecutionMode mode, Body&& body) {
  std::exception_ptr err;
  if (mode == ExecutionMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
#pragma omp critical(nprace_node_error)
        if (!err) err = std::current_exception();
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        if (!err) err = std::current_exception();
        break;
      }
    }
  }
  if (err) std::rethrow_exception(err);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void validate(const CollocationConfig& cfg) {
  auto fail = [](const std::string& field, const std::string& msg) { throw ValidationError(field + ": " + msg); };
  if (cfg.num_intervals < 8) fail("num_intervals", "must be >= 8");
  if (cfg.degree < 2 || cfg.degree > kMaxDegree) fail("degree", "must be in [2, 5]");
  if (!(cfg.nlp_tol > 0.0)) fail("nlp_tol", "must be positive");
  if (cfg.max_iter <= 0) fail("max_iter", "must be positive");
  if (!(cfg.s_dot_min > 0.0)) fail("s_dot_min", "must be positive");
  if (!std::isfinite(cfg.force_scale)) fail("force_scale", "must be finite");
  if (!(cfg.camber_max > 0.0) || cfg.camber_max >= std::numbers::pi / 2) fail("camber_max", "must be in (0, pi/2)");
  if (!(cfg.heading_max > 0.0) || cfg.heading_max >= std::numbers::pi / 2) fail("heading_max", "must be in (0, pi/2)");
  if (!(cfg.v1_min > 0.0) || !(cfg.v1_max > cfg.v1_min)) fail("v1_min", "need 0 < v1_min < v1_max");
  if (!(cfg.mu_init > 0.0)) fail("mu_init", "must be positive");
  if (!(cfg.theta_max_factor > 0.0)) fail("theta_max_factor", "must be positive");
  if (cfg.attempts < 1) fail("attempts", "must be at least 1");
}

Transcription::Transcription(RacelineProblem problem, CollocationConfig config)
    : prob_(std::move(problem)), cfg_(config) {
  validate(cfg_);
  validate(prob_.params);
  if (!prob_.surface) throw ValidationError("surface: missing");
  if (!prob_.surface->periodic()) throw ValidationError("surface: raceline needs a periodic track");
  scheme_ = collocation_nodes(cfg_.degree);
  K_ = cfg_.num_intervals;
  p_ = cfg_.degree;
  block_ = kNumStates + p_ * kNumNodeVars;
  rows_per_interval_ = p_ * (kNumStates + kNumDae + kNumPath) + kNumStates;
  n_ = K_ * block_;
  m_ = K_ * rows_per_interval_;
  h_ = prob_.surface->length() / K_;
  fscale_ = cfg_.force_scale > 0.0 ? cfg_.force_scale : prob_.params.weight();

  // Regularity along the grid, across the lateral domain.
  for (int k = 0; k < K_; ++k) {
    for (int j = 0; j <= p_; ++j) {
      const double s = node_s(k, j);
      const geometry::LateralBounds b = prob_.surface->lateral_bounds(s);
      for (double y : {b.y_min, 0.5 * (b.y_min + b.y_max), b.y_max}) {
        try {
          geometry::sample_at(*prob_.surface, s, y);
        } catch (const Error& e) {
          throw TranscriptionError("surface not regular at (s=" + fmt(s) + ", y=" + fmt(y) + "): " + e.what());
        }
      }
    }
  }
  build_structures();
}

template <typename T>
std::array<T, kNumNodeOutputs> Transcription::eval_node(double s, const std::array<T, kNumNodeVars>& v) const {
  const MotorcycleParams& par = prob_.params;
  const double F = fscale_;
  dynamics::BasicState<T> z;
  z.s = T(s);
  z.y = v[var::y];
  z.theta_s = v[var::theta_s];
  z.v1 = v[var::v1];
  z.v2 = v[var::v2];
  z.w3 = v[var::w3];
  z.c = v[var::c];
  z.c_dot = v[var::c_dot];
  z.d = v[var::d];
  z.d_dot = v[var::d_dot];
  dynamics::BasicAlgebraic<T> a;
  a.v1_dot = v[var::v1_dot];
  a.v2_dot = v[var::v2_dot];
  a.w3_dot = v[var::w3_dot];
  a.c_ddot = v[var::c_ddot];
  a.Fz_f = v[var::Fz_f] * F;
  a.Fz_r = v[var::Fz_r] * F;
  dynamics::BasicInput<T> u;
  u.gamma = v[var::gamma];
  u.d_ddot = v[var::d_ddot];
  u.Fx_f = v[var::Fx_f] * F;
  u.Fx_r = v[var::Fx_r] * F;

  const geometry::BasicSurfaceSample<T> smp = geometry::sample_at(*prob_.surface, z.s, z.y);
  const std::array<T, dynamics::kStateSize> f = dynamics::state_derivative(z, u, a, smp, par, prob_.model);
  const std::array<T, dynamics::kAlgebraicSize> g = dynamics::dae_residual(z, u, a, smp, par);

  std::array<T, kNumNodeOutputs> out;
  const T& sdot = f[0];
  const T inv = 1.0 / sdot;
  for (int i = 0; i < kNumStates; ++i) out[i] = f[i + 1] * inv;
  for (int i = 0; i < kNumDae; ++i) out[kNumStates + i] = g[i] * (1.0 / F);
  const int q = kNumStates + kNumDae;
  out[q + 0] = v[var::Fz_f] + v[var::Fx_f];
  out[q + 1] = v[var::Fz_f] - v[var::Fx_f];
  out[q + 2] = v[var::Fz_r] + v[var::Fx_r];
  out[q + 3] = v[var::Fz_r] - v[var::Fx_r];
  out[q + 4] = 1.0 - v[var::Fx_r] * v[var::v1] * (F / par.P_max);
  out[q + 5] = sdot - cfg_.s_dot_min;
  out[q + kNumPath] = inv;
  return out;
}

void Transcription::build_structures() {
  jac_structure_.clear();
  hess_structure_.clear();
  for (int k = 0; k < K_; ++k) {
    const int base = k * rows_per_interval_;
    for (int j = 1; j <= p_; ++j) {
      for (int i = 0; i < kNumStates; ++i) {
        const int row = base + (j - 1) * kNumStates + i;
        jac_structure_.emplace_back(row, interval_offset(k) + i);
        for (int l = 1; l <= p_; ++l) {
          if (l == j) {
            for (int c = 0; c < kNumNodeVars; ++c) jac_structure_.emplace_back(row, node_offset(k, j) + c);
          } else {
            jac_structure_.emplace_back(row, node_offset(k, l) + i);
          }
        }
      }
    }
    for (int j = 1; j <= p_; ++j) {
      for (int i = 0; i < kNumDae; ++i) {
        for (int c = 0; c < kNumNodeVars; ++c) jac_structure_.emplace_back(dae_row(k, j, i), node_offset(k, j) + c);
      }
    }
    for (int j = 1; j <= p_; ++j) {
      for (int i = 0; i < kNumPath; ++i) {
        for (int c = 0; c < kNumNodeVars; ++c) jac_structure_.emplace_back(path_row(k, j, i), node_offset(k, j) + c);
      }
    }
    const int next = (k + 1) % K_;
    for (int i = 0; i < kNumStates; ++i) {
      const int row = base + p_ * (kNumStates + kNumDae + kNumPath) + i;
      jac_structure_.emplace_back(row, interval_offset(next) + i);
      jac_structure_.emplace_back(row, node_offset(k, p_) + i);
    }
  }
  for (int k = 0; k < K_; ++k) {
    for (int j = 1; j <= p_; ++j) {
      const int off = node_offset(k, j);
      for (int r = 0; r < kNumNodeVars; ++r) {
        for (int c = 0; c <= r; ++c) hess_structure_.emplace_back(off + r, off + c);
      }
    }
  }
}

void Transcription::variable_bounds(VectorXd& lo, VectorXd& hi) const {
  lo = VectorXd::Constant(n_, -kInf);
  hi = VectorXd::Constant(n_, kInf);
  const MotorcycleParams& par = prob_.params;
  auto state_bounds = [&](int off, double s) {
    const geometry::LateralBounds b = prob_.surface->lateral_bounds(s);
    lo(off + var::y) = b.y_min;
    hi(off + var::y) = b.y_max;
    lo(off + var::theta_s) = -cfg_.heading_max;
    hi(off + var::theta_s) = cfg_.heading_max;
    lo(off + var::v1) = cfg_.v1_min;
    hi(off + var::v1) = cfg_.v1_max;
    lo(off + var::c) = -cfg_.camber_max;
    hi(off + var::c) = cfg_.camber_max;
    lo(off + var::d) = -par.d_max;
    hi(off + var::d) = par.d_max;
  };
  for (int k = 0; k < K_; ++k) {
    state_bounds(interval_offset(k), node_s(k, 0));
    for (int j = 1; j <= p_; ++j) {
      const int off = node_offset(k, j);
      state_bounds(off, node_s(k, j));
      lo(off + var::Fz_f) = 0.0;
      lo(off + var::Fz_r) = 0.0;
      lo(off + var::gamma) = -par.gamma_max;
      hi(off + var::gamma) = par.gamma_max;
      lo(off + var::d_ddot) = -par.dddot_max;
      hi(off + var::d_ddot) = par.dddot_max;
    }
  }
}

void Transcription::constraint_bounds(VectorXd& lo, VectorXd& hi) const {
  lo = VectorXd::Zero(m_);
  hi = VectorXd::Zero(m_);
  for (int k = 0; k < K_; ++k) {
    for (int j = 1; j <= p_; ++j) {
      for (int i = 0; i < kNumPath; ++i) hi(path_row(k, j, i)) = kInf;
    }
  }
}

VectorXd Transcription::initial_point() const { return initial_guess(*this, cfg_.guess); }

std::vector<double> Transcription::node_values(const VectorXd& x, ExecutionMode mode) const {
  const int nn = K_ * p_;
  std::vector<double> out(static_cast<std::size_t>(nn) * kNumNodeOutputs);
  for_each_node(nn, mode, [&](int idx) {
    const int k = idx / p_, j = idx % p_ + 1;
    const int off = node_offset(k, j);
    std::array<double, kNumNodeVars> v;
    for (int c = 0; c < kNumNodeVars; ++c) v[c] = x(off + c);
    const auto r = eval_node<double>(node_s(k, j), v);
    std::copy(r.begin(), r.end(), out.begin() + static_cast<std::ptrdiff_t>(idx) * kNumNodeOutputs);
  });
  return out;
}

void Transcription::node_jacobians(const VectorXd& x, ExecutionMode mode, std::vector<double>& values,
                                   std::vector<double>& jac) const {
  const int nn = K_ * p_;
  values.assign(static_cast<std::size_t>(nn) * kNumNodeOutputs, 0.0);
  jac.assign(static_cast<std::size_t>(nn) * kNumNodeOutputs * kNumNodeVars, 0.0);
  for_each_node(nn, mode, [&](int idx) {
    const int k = idx / p_, j = idx % p_ + 1;
    const int off = node_offset(k, j);
    std::array<ad::Grad, kNumNodeVars> v;
    for (int c = 0; c < kNumNodeVars; ++c) v[c] = ad::seed<ad::Grad>(x(off + c), c);
    const auto r = eval_node<ad::Grad>(node_s(k, j), v);
    double* val = values.data() + static_cast<std::ptrdiff_t>(idx) * kNumNodeOutputs;
    double* jb = jac.data() + static_cast<std::ptrdiff_t>(idx) * kNumNodeOutputs * kNumNodeVars;
    for (int o = 0; o < kNumNodeOutputs; ++o) {
      val[o] = r[o].v;
      for (int c = 0; c < kNumNodeVars; ++c) jb[o * kNumNodeVars + c] = r[o].d[c];
    }
  });
}

std::vector<double> Transcription::node_hessians(const VectorXd& x, double sigma, const VectorXd& lambda,
                                                 ExecutionMode mode) const {
  const int nn = K_ * p_;
  std::vector<double> out(static_cast<std::size_t>(nn) * kHessPacked, 0.0);
  for_each_node(nn, mode, [&](int idx) {
    const int k = idx / p_, j = idx % p_ + 1;
    const int off = node_offset(k, j);
    // Output weights: collocation rows carry -h f_i, the objective h w_j / s_dot.
    std::array<double, kNumNodeOutputs> wt{};
    const int base = k * rows_per_interval_;
    for (int i = 0; i < kNumStates; ++i) wt[i] = -h_ * lambda(base + (j - 1) * kNumStates + i);
    for (int i = 0; i < kNumDae; ++i) wt[kNumStates + i] = lambda(dae_row(k, j, i));
    for (int i = 0; i < kNumPath; ++i) wt[kNumStates + kNumDae + i] = lambda(path_row(k, j, i));
    wt[kNumNodeOutputs - 1] = sigma * h_ * scheme_.weights[j - 1];
    std::array<ad::Hess, kNumNodeVars> v;
    for (int c = 0; c < kNumNodeVars; ++c) v[c] = ad::seed<ad::Hess>(x(off + c), c);
    const auto r = eval_node<ad::Hess>(node_s(k, j), v);
    double* hb = out.data() + static_cast<std::ptrdiff_t>(idx) * kHessPacked;
    for (int o = 0; o < kNumNodeOutputs; ++o) {
      if (wt[o] == 0.0) continue;
      for (int q = 0; q < kHessPacked; ++q) hb[q] += wt[o] * r[o].h[q];
    }
  });
  return out;
}

void Transcription::ensure_values(const VectorXd& x) const {
  if (cache_x_values_.size() == x.size() && cache_x_values_ == x) return;
  if (cache_x_jac_.size() == x.size() && cache_x_jac_ == x) {
    cache_values_ = cache_jac_values_;
  } else {
    cache_values_ = node_values(x, cfg_.parallel ? ExecutionMode::Parallel : ExecutionMode::Serial);
  }
  cache_x_values_ = x;
}

void Transcription::ensure_jacobian(const VectorXd& x) const {
  if (cache_x_jac_.size() == x.size() && cache_x_jac_ == x) return;
  cache_x_jac_.resize(0);
  node_jacobians(x, cfg_.parallel ? ExecutionMode::Parallel : ExecutionMode::Serial, cache_jac_values_, cache_jac_);
  cache_x_jac_ = x;
}

double Transcription::objective(const VectorXd& x) const {
  ensure_values(x);
  double t = 0.0;
  for (int k = 0; k < K_; ++k) {
    for (int j = 1; j <= p_; ++j) {
      const int idx = k * p_ + (j - 1);
      t += h_ * scheme_.weights[j - 1] * cache_values_[static_cast<std::size_t>(idx) * kNumNodeOutputs + kNumNodeOutputs - 1];
    }
  }
  return t;
}

void Transcription::gradient(const VectorXd& x, VectorXd& g) const {
  ensure_jacobian(x);
  g = VectorXd::Zero(n_);
  for (int k = 0; k < K_; ++k) {
    for (int j = 1; j <= p_; ++j) {
      const int idx = k * p_ + (j - 1);
      const double w = h_ * scheme_.weights[j - 1];
      const double* jb = cache_jac_.data() + (static_cast<std::size_t>(idx) * kNumNodeOutputs + kNumNodeOutputs - 1) * kNumNodeVars;
      for (int c = 0; c < kNumNodeVars; ++c) g(node_offset(k, j) + c) += w * jb[c];
    }
  }
}

void Transcription::constraints(const VectorXd& x, VectorXd& c) const {
  ensure_values(x);
  c.resize(m_);
  const Eigen::MatrixXd& D = scheme_.diff;
  for (int k = 0; k < K_; ++k) {
    const int base = k * rows_per_interval_;
    for (int j = 1; j <= p_; ++j) {
      const double* nv = cache_values_.data() + static_cast<std::size_t>(k * p_ + j - 1) * kNumNodeOutputs;
      for (int i = 0; i < kNumStates; ++i) {
        double r = D(j - 1, 0) * x(interval_offset(k) + i);
        for (int l = 1; l <= p_; ++l) r += D(j - 1, l) * x(node_offset(k, l) + i);
        c(base + (j - 1) * kNumStates + i) = r - h_ * nv[i];
      }
      for (int i = 0; i < kNumDae; ++i) c(dae_row(k, j, i)) = nv[kNumStates + i];
      for (int i = 0; i < kNumPath; ++i) c(path_row(k, j, i)) = nv[kNumStates + kNumDae + i];
    }
    const int next = (k + 1) % K_;
    for (int i = 0; i < kNumStates; ++i) {
      c(base + p_ * (kNumStates + kNumDae + kNumPath) + i) = x(interval_offset(next) + i) - x(node_offset(k, p_) + i);
    }
  }
}

void Transcription::jacobian_values(const VectorXd& x, VectorXd& values) const {
  ensure_jacobian(x);
  values.resize(static_cast<Eigen::Index>(jac_structure_.size()));
  const Eigen::MatrixXd& D = scheme_.diff;
  Eigen::Index pos = 0;
  auto node_jac = [&](int k, int j, int o) {
    return cache_jac_.data() + (static_cast<std::size_t>(k * p_ + j - 1) * kNumNodeOutputs + o) * kNumNodeVars;
  };
  // Same traversal order as build_structures.
  for (int k = 0; k < K_; ++k) {
    for (int j = 1; j <= p_; ++j) {
      for (int i = 0; i < kNumStates; ++i) {
        values(pos++) = D(j - 1, 0);
        for (int l = 1; l <= p_; ++l) {
          if (l == j) {
            const double* jb = node_jac(k, j, i);
            for (int c = 0; c < kNumNodeVars; ++c) values(pos++) = (c == i ? D(j - 1, j) : 0.0) - h_ * jb[c];
          } else {
            values(pos++) = D(j - 1, l);
          }
        }
      }
    }
    for (int j = 1; j <= p_; ++j) {
      for (int i = 0; i < kNumDae; ++i) {
        const double* jb = node_jac(k, j, kNumStates + i);
        for (int c = 0; c < kNumNodeVars; ++c) values(pos++) = jb[c];
      }
    }
    for (int j = 1; j <= p_; ++j) {
      for (int i = 0; i < kNumPath; ++i) {
        const double* jb = node_jac(k, j, kNumStates + kNumDae + i);
        for (int c = 0; c < kNumNodeVars; ++c) values(pos++) = jb[c];
      }
    }
    for (int i = 0; i < kNumStates; ++i) {
      values(pos++) = 1.0;
      values(pos++) = -1.0;
    }
  }
}

void Transcription::hessian_values(const VectorXd& x, double sigma, const VectorXd& lambda, VectorXd& values) const {
  const std::vector<double> blocks =
      node_hessians(x, sigma, lambda, cfg_.parallel ? ExecutionMode::Parallel : ExecutionMode::Serial);
  values = Eigen::Map<const VectorXd>(blocks.data(), static_cast<Eigen::Index>(blocks.size()));
}

dynamics::State Transcription::node_state(const VectorXd& x, int k, int j) const {
  const int off = j == 0 ? interval_offset(k) : node_offset(k, j);
  dynamics::State z;
  z.s = node_s(k, j);
  z.y = x(off + var::y);
  z.theta_s = x(off + var::theta_s);
  z.v1 = x(off + var::v1);
  z.v2 = x(off + var::v2);
  z.w3 = x(off + var::w3);
  z.c = x(off + var::c);
  z.c_dot = x(off + var::c_dot);
  z.d = x(off + var::d);
  z.d_dot = x(off + var::d_dot);
  return z;
}

dynamics::State Transcription::start_state(const VectorXd& x, int k) const { return node_state(x, k, 0); }

dynamics::AlgebraicState Transcription::node_algebraic(const VectorXd& x, int k, int j) const {
  const int off = node_offset(k, j);
  return {x(off + var::v1_dot), x(off + var::v2_dot), x(off + var::w3_dot), x(off + var::c_ddot),
          x(off + var::Fz_f) * fscale_, x(off + var::Fz_r) * fscale_};
}

dynamics::Input Transcription::node_input(const VectorXd& x, int k, int j) const {
  const int off = node_offset(k, j);
  return {x(off + var::gamma), x(off + var::d_ddot), x(off + var::Fx_f) * fscale_, x(off + var::Fx_r) * fscale_};
}

double initial_guess_speed(const RacelineProblem& problem) {
  const geometry::Surface& surf = *problem.surface;
  const int n = 400;
  double kmax = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = surf.length() * i / n;
    const geometry::SurfaceSample smp = geometry::evaluate_surface(surf, s, 0.0);
    const Vec2<double> kk = kinematics::heading_curvature(smp, problem.model.heading);
    kmax = std::max(kmax, std::abs(kk.a));
  }
  const double g = problem.params.g;
  const double v = kmax > 0.0 ? std::sqrt(0.5 * g / kmax) : 30.0;
  return std::clamp(v, 5.0, 30.0);
}

namespace {

/// Steady-state unknowns at one node: camber, side velocity, steer, normal
/// loads (normalized) and rear drive force (normalized).
using SteadyVars = std::array<double, 6>;

/// Damped Newton on the DAE residual with zero accelerations. Returns false
/// when it fails or lands outside the vehicle limits.
bool solve_steady(const Transcription& tr, const geometry::Surface& surf, double s, double theta, double v1,
                  double w3, SteadyVars& x) {
  const MotorcycleParams& par = tr.problem().params;
  const double F = tr.force_scale();
  auto residual = [&](const SteadyVars& xv, Eigen::Matrix<double, 6, 6>* jac) {
    std::array<ad::Grad, 6> v;
    for (int i = 0; i < 6; ++i) v[i] = ad::seed<ad::Grad>(xv[i], i);
    dynamics::BasicState<ad::Grad> z;
    z.s = ad::Grad(s);
    z.theta_s = ad::Grad(theta);
    z.v1 = ad::Grad(v1);
    z.w3 = ad::Grad(w3);
    z.c = v[0];
    z.v2 = v[1];
    dynamics::BasicInput<ad::Grad> u;
    u.gamma = v[2];
    u.Fx_r = v[5] * F;
    dynamics::BasicAlgebraic<ad::Grad> a;
    a.Fz_f = v[3] * F;
    a.Fz_r = v[4] * F;
    const auto smp = geometry::sample_at(surf, z.s, z.y);
    const auto g = dynamics::dae_residual(z, u, a, smp, par);
    Eigen::Matrix<double, 6, 1> r;
    for (int i = 0; i < 6; ++i) {
      r(i) = g[i].v / F;
      if (jac) {
        for (int c = 0; c < 6; ++c) (*jac)(i, c) = g[i].d[c] / F;
      }
    }
    return r;
  };
  try {
    for (int it = 0; it < 40; ++it) {
      Eigen::Matrix<double, 6, 6> J;
      const Eigen::Matrix<double, 6, 1> r = residual(x, &J);
      const double nr = r.lpNorm<Eigen::Infinity>();
      if (nr < 1e-10) break;
      const Eigen::Matrix<double, 6, 1> dx = J.fullPivLu().solve(-r);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 30 && !moved; ++ls, t *= 0.5) {
        SteadyVars trial = x;
        for (int i = 0; i < 6; ++i) trial[i] += t * dx(i);
        try {
          if (residual(trial, nullptr).lpNorm<Eigen::Infinity>() < (1.0 - 1e-4 * t) * nr) {
            x = trial;
            moved = true;
          }
        } catch (const Error&) {
        }
      }
      if (!moved) return false;
    }
    if (residual(x, nullptr).lpNorm<Eigen::Infinity>() > 1e-8) return false;
  } catch (const Error&) {
    return false;
  }
  return std::abs(x[0]) < 0.95 * tr.config().camber_max && std::abs(x[2]) < par.gamma_max && x[3] > 0.0 &&
         x[4] > 0.0 && std::abs(x[5]) < x[4];
}

}  // namespace

Eigen::VectorXd initial_guess(const Transcription& tr, GuessKind kind) {
  const RacelineProblem& prob = tr.problem();
  const MotorcycleParams& par = prob.params;
  const double v0 = initial_guess_speed(prob);
  const dynamics::AlgebraicState st = sim::static_algebraic(par);
  const double F = tr.force_scale();
  VectorXd x = VectorXd::Zero(tr.num_variables());
  // theta_s' is affine in w3; pick w3 so the heading angle stays constant.
  auto heading_hold = [&](double s, double theta, double v2) {
    const geometry::SurfaceSample smp = geometry::sample_at(*prob.surface, s, 0.0);
    const kinematics::BasicPose<double> pose{s, 0.0, theta, par.r};
    const double r0 = kinematics::pose_rates(pose, kinematics::BasicBodyVelocity<double>{v0, v2, 0.0}, smp,
                                             prob.model.heading).theta_s_dot;
    const double r1 = kinematics::pose_rates(pose, kinematics::BasicBodyVelocity<double>{v0, v2, 1.0}, smp,
                                             prob.model.heading).theta_s_dot;
    return r1 != r0 ? -r0 / (r1 - r0) : 0.0;
  };
  SteadyVars prev{0.0, 0.0, 0.0, st.Fz_f / F, st.Fz_r / F, 0.0};
  auto fill = [&](int off, double s, bool node) {
    double theta = 0.0, w3 = heading_hold(s, 0.0, 0.0);
    SteadyVars sv{0.0, 0.0, 0.0, st.Fz_f / F, st.Fz_r / F, 0.0};
    if (kind == GuessKind::SteadyState) {
      // Side slip turns the body against the path; alternate between the
      // steady solve and the heading that keeps y constant.
      bool ok = false;
      SteadyVars trial = prev;
      for (int pass = 0; pass < 4; ++pass) {
        ok = solve_steady(tr, *prob.surface, s, theta, v0, w3, trial);
        if (!ok) break;
        theta = std::clamp(-std::atan2(trial[1], v0), -0.5 * tr.config().heading_max, 0.5 * tr.config().heading_max);
        w3 = heading_hold(s, theta, trial[1]);
      }
      if (ok) {
        sv = trial;
        prev = trial;
      } else {
        theta = 0.0;
        w3 = heading_hold(s, 0.0, 0.0);
        const double cmax = 0.9 * tr.config().camber_max;
        sv[0] = std::clamp(std::atan(v0 * w3 / par.g), -cmax, cmax);
        sv[2] = std::clamp((par.lf + par.lr) * w3 / v0, -0.9 * par.gamma_max, 0.9 * par.gamma_max);
      }
    }
    x(off + var::theta_s) = theta;
    x(off + var::v1) = v0;
    x(off + var::v2) = sv[1];
    x(off + var::w3) = w3;
    x(off + var::c) = sv[0];
    if (node) {
      x(off + var::gamma) = sv[2];
      x(off + var::Fz_f) = sv[3];
      x(off + var::Fz_r) = sv[4];
      x(off + var::Fx_r) = sv[5];
    }
  };
  for (int k = 0; k < tr.num_intervals(); ++k) {
    fill(tr.interval_offset(k), tr.node_s(k, 0), false);
    for (int j = 1; j <= tr.degree(); ++j) fill(tr.node_offset(k, j), tr.node_s(k, j), true);
  }
  return x;
}

}  // namespace nprace::raceline
