#include "nprace/raceline/raceline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "nprace/errors.hpp"
#include "nprace/simulator.hpp"

namespace nprace::raceline {

using Eigen::VectorXd;

nlp::KktBackend backend_from_env(nlp::KktBackend fallback) {
  const char* env = std::getenv(kSolverEnv);
  if (env == nullptr || *env == '\0') return fallback;
  return nlp::parse_backend(env);
}

std::vector<double> node_times(const Transcription& tr, const VectorXd& x) {
  const std::vector<double> vals = tr.node_values(x, ExecutionMode::Serial);
  const int K = tr.num_intervals(), p = tr.degree();
  const CollocationScheme& sc = tr.scheme();
  const double h = tr.interval_length();
  std::vector<double> t(static_cast<std::size_t>(K * p + 1), 0.0);
  double t0 = 0.0;
  for (int k = 0; k < K; ++k) {
    for (int j = 1; j <= p; ++j) {
      double q = 0.0;
      for (int l = 1; l <= p; ++l) {
        q += sc.integ(j - 1, l - 1) * vals[static_cast<std::size_t>(k * p + l - 1) * kNumNodeOutputs + kNumNodeOutputs - 1];
      }
      t[static_cast<std::size_t>(k * p + j)] = t0 + h * q;
    }
    t0 = t[static_cast<std::size_t>(k * p + p)];
  }
  return t;
}

double replay_residual(const RacelineProblem& problem, const std::vector<NodePoint>& nodes) {
  const sim::Model model{*problem.surface, problem.params, problem.model};
  double worst = 0.0;
  for (const NodePoint& n : nodes) {
    const auto g = sim::scaled_residual(model, n.z, n.u, n.a);
    for (double gi : g) worst = std::max(worst, std::abs(gi));
  }
  return worst;
}

RacelineSolution decode_solution(const Transcription& tr, const VectorXd& x) {
  RacelineSolution sol;
  sol.config = tr.config();
  sol.x = x;
  const int K = tr.num_intervals(), p = tr.degree();
  const std::vector<double> t = node_times(tr, x);
  sol.lap_time = t.back();
  for (int k = 0; k < K; ++k) {
    sol.starts.push_back(tr.start_state(x, k));
    for (int j = 1; j <= p; ++j) {
      NodePoint n;
      n.interval = k;
      n.node = j;
      n.s = tr.node_s(k, j);
      n.time = t[static_cast<std::size_t>(k * p + j)];
      n.z = tr.node_state(x, k, j);
      n.a = tr.node_algebraic(x, k, j);
      n.u = tr.node_input(x, k, j);
      sol.nodes.push_back(n);
    }
  }
  sol.replay_residual = replay_residual(tr.problem(), sol.nodes);

  const int first = tr.interval_offset(0), last = tr.node_offset(K - 1, p);
  for (int i = 0; i < kNumStates; ++i) {
    sol.periodicity_gap = std::max(sol.periodicity_gap, std::abs(x(first + i) - x(last + i)));
  }
  VectorXd c;
  tr.constraints(x, c);
  for (int k = 0; k < K; ++k) {
    for (int j = 1; j <= p; ++j) {
      for (int i = 0; i < kNumPath; ++i) sol.path_violation = std::max(sol.path_violation, -c(tr.path_row(k, j, i)));
    }
  }
  return sol;
}

namespace {

std::vector<std::string> diagnose(const Transcription& tr, const nlp::IpmResult& res) {
  std::vector<std::string> out;
  out.push_back(std::string("solver status: ") + nlp::status_name(res.status) +
                (res.message.empty() ? "" : " (" + res.message + ")"));
  std::ostringstream os;
  os << "final KKT error " << res.kkt_error << ", max violation " << res.primal_inf << " after " << res.iterations
     << " iterations";
  out.push_back(os.str());
  if (res.x.size() != tr.num_variables()) return out;
  VectorXd c;
  try {
    tr.constraints(res.x, c);
  } catch (const Error& e) {
    out.push_back(std::string("constraints not evaluable at the last iterate: ") + e.what());
    return out;
  }
  // Locate the worst row by kind.
  const char* kinds[] = {"collocation", "dae", "path", "continuity"};
  double worst[4] = {0, 0, 0, 0};
  double worst_s[4] = {0, 0, 0, 0};
  const int K = tr.num_intervals(), p = tr.degree();
  const int rows = p * (kNumStates + kNumDae + kNumPath) + kNumStates;
  for (int r = 0; r < tr.num_constraints(); ++r) {
    const int k = r / rows, local = r % rows;
    int kind = 3;
    double viol = std::abs(c(r));
    if (local < p * kNumStates) {
      kind = 0;
    } else if (local < p * (kNumStates + kNumDae)) {
      kind = 1;
    } else if (local < p * (kNumStates + kNumDae + kNumPath)) {
      kind = 2;
      viol = std::max(0.0, -c(r));
    }
    if (viol > worst[kind]) {
      worst[kind] = viol;
      worst_s[kind] = tr.node_s(k, 0);
    }
  }
  for (int i = 0; i < 4; ++i) {
    std::ostringstream w;
    w << kinds[i] << " rows: max violation " << worst[i] << " (interval starting at s=" << worst_s[i] << ")";
    out.push_back(w.str());
  }
  (void)K;
  if (res.status == nlp::IpmStatus::MaxIterations) out.push_back("hint: raise --max-iter or start from a coarser solution");
  if (worst[1] > 1e-3) out.push_back("hint: DAE rows dominate; try a different force scale or more intervals");
  if (worst[2] > 1e-3) out.push_back("hint: path limits violated; lower s_dot_min or check track bounds");
  return out;
}

}  // namespace

RacelineSolution solve_raceline(const RacelineProblem& problem, const CollocationConfig& config,
                                const std::optional<VectorXd>& guess) {
  CollocationConfig cfg = config;
  cfg.backend = backend_from_env(cfg.backend);
  const Transcription tr(problem, cfg);
  if (guess && guess->size() != tr.num_variables()) {
    throw ValidationError("initial guess has " + std::to_string(guess->size()) + " entries, expected " +
                          std::to_string(tr.num_variables()));
  }

  // Solve a copy whose initial point is the supplied guess.
  struct Seeded final : nlp::Problem {
    const Transcription& t;
    VectorXd x0;
    Seeded(const Transcription& tt, VectorXd x) : t(tt), x0(std::move(x)) {}
    int num_variables() const override { return t.num_variables(); }
    int num_constraints() const override { return t.num_constraints(); }
    void variable_bounds(VectorXd& lo, VectorXd& hi) const override { t.variable_bounds(lo, hi); }
    void constraint_bounds(VectorXd& lo, VectorXd& hi) const override { t.constraint_bounds(lo, hi); }
    VectorXd initial_point() const override { return x0; }
    double objective(const VectorXd& x) const override { return t.objective(x); }
    void gradient(const VectorXd& x, VectorXd& g) const override { t.gradient(x, g); }
    void constraints(const VectorXd& x, VectorXd& c) const override { t.constraints(x, c); }
    const nlp::Structure& jacobian_structure() const override { return t.jacobian_structure(); }
    void jacobian_values(const VectorXd& x, VectorXd& v) const override { t.jacobian_values(x, v); }
    const nlp::Structure& hessian_structure() const override { return t.hessian_structure(); }
    void hessian_values(const VectorXd& x, double sigma, const VectorXd& lambda, VectorXd& v) const override {
      t.hessian_values(x, sigma, lambda, v);
    }
  } seeded(tr, guess ? *guess : initial_guess(tr, cfg.guess));

  nlp::IpmOptions opt;
  opt.tol = cfg.nlp_tol;
  opt.max_iter = cfg.max_iter;
  opt.backend = cfg.backend;
  opt.verbosity = cfg.verbosity;
  opt.mu_init = cfg.mu_init;
  opt.theta_max_factor = cfg.theta_max_factor;
  nlp::IpmResult res;
  int total_iterations = 0;
  double total_time = 0.0;
  std::vector<std::string> attempt_log;
  for (int attempt = 0; attempt < cfg.attempts; ++attempt) {
    res = nlp::solve(seeded, opt);
    total_iterations += res.iterations;
    total_time += res.wall_time;
    if (res.converged()) break;
    std::ostringstream os;
    os << "attempt " << attempt + 1 << " (infeasibility cap factor " << opt.theta_max_factor
       << ") ended with " << nlp::status_name(res.status) << " after " << res.iterations << " iterations";
    attempt_log.push_back(os.str());
    opt.theta_max_factor /= 10.0;
  }

  RacelineSolution sol;
  bool decoded = false;
  if (res.x.size() == tr.num_variables()) {
    try {
      sol = decode_solution(tr, res.x);
      decoded = true;
    } catch (const Error& e) {
      sol.diagnostics.push_back(std::string("could not decode the last iterate: ") + e.what());
    }
  }
  if (!decoded) {
    sol.config = cfg;
    sol.x = res.x;
  }
  sol.config = cfg;
  sol.stats.status = nlp::status_name(res.status);
  sol.stats.backend = nlp::backend_name(cfg.backend);
  sol.stats.iterations = total_iterations;
  sol.stats.kkt_error = res.kkt_error;
  sol.stats.constraint_violation = res.primal_inf;
  sol.stats.wall_time = total_time;
  sol.diagnostics.insert(sol.diagnostics.end(), attempt_log.begin(), attempt_log.end());
  sol.converged = res.converged() && decoded;
  if (decoded && std::abs(sol.lap_time - res.objective) > 1e-9 * std::max(1.0, res.objective)) {
    sol.diagnostics.push_back("lap time quadrature disagrees with the NLP objective");
  }
  if (!sol.converged) {
    const auto d = diagnose(tr, res);
    sol.diagnostics.insert(sol.diagnostics.end(), d.begin(), d.end());
  }
  return sol;
}

namespace {

bool trim_feasible(const MotorcycleParams& p, double v, double radius) {
  sim::TrimPoint tp;
  try {
    tp = sim::circular_trim(p, v, radius);
  } catch (const Error&) {
    return false;
  }
  if (tp.residual > 1e-8) return false;
  if (std::abs(tp.u.gamma) > p.gamma_max) return false;
  if (tp.a.Fz_f < 0.0 || tp.a.Fz_r < 0.0) return false;
  if (std::abs(tp.u.Fx_f) > tp.a.Fz_f || std::abs(tp.u.Fx_r) > tp.a.Fz_r) return false;
  if (tp.u.Fx_r * v > p.P_max) return false;
  return true;
}

}  // namespace

BaselineResult constant_speed_baseline(const MotorcycleParams& params, double radius, double length) {
  if (!(radius > 0.0) || !(length > 0.0)) throw DomainError("baseline needs positive radius and length");
  double lo = 1.0;
  if (!trim_feasible(params, lo, radius)) throw NonconvergenceError("no feasible constant speed at 1 m/s");
  double hi = 2.0;
  while (trim_feasible(params, hi, radius)) {
    lo = hi;
    hi *= 1.5;
    if (hi > 200.0) break;
  }
  for (int it = 0; it < 60 && hi - lo > 1e-6; ++it) {
    const double mid = 0.5 * (lo + hi);
    (trim_feasible(params, mid, radius) ? lo : hi) = mid;
  }
  return {lo, length / lo};
}

}  // namespace nprace::raceline
