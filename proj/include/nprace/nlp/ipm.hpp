#pragma once

// Primal-dual interior-point method with a filter line search.
//
// Inequalities get slack variables; bounds on variables and slacks are
// handled by a logarithmic barrier with primal-dual bound multipliers. Each
// iteration solves the regularized KKT system, correcting the Hessian until
// the factorization has the inertia of a local minimizer.

#include <functional>
#include <string>
#include <vector>

#include "nprace/nlp/kkt.hpp"
#include "nprace/nlp/problem.hpp"

namespace nprace::nlp {

struct IpmOptions {
  double tol = 1e-6;             // scaled KKT error
  double constr_viol_tol = 1e-8; // unscaled constraint violation
  int max_iter = 500;
  double mu_init = 0.1;
  double bound_push = 1e-2;
  /// Infeasibility cap for trial points, relative to max(1, initial violation).
  double theta_max_factor = 1e4;
  bool gradient_scaling = true;
  double max_gradient = 100.0;
  KktBackend backend = KktBackend::Sparse;
  int verbosity = 0;  // 0 silent, 1 per-iteration log
  /// Optional sink for the iteration log; defaults to stderr.
  std::function<void(const std::string&)> log;
};

enum class IpmStatus { Converged, MaxIterations, LineSearchFailed, EvaluationFailed, FactorizationFailed };

const char* status_name(IpmStatus s);

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double primal_inf = 0.0;
  double dual_inf = 0.0;
  double mu = 0.0;
  double alpha_primal = 0.0;
  double delta_w = 0.0;
};

struct IpmResult {
  IpmStatus status = IpmStatus::MaxIterations;
  VectorXd x;
  /// Constraint multipliers (sign: L = f + lambda^T c).
  VectorXd lambda;
  double objective = 0.0;
  int iterations = 0;
  /// Overall scaled optimality error at the returned point.
  double kkt_error = 0.0;
  double primal_inf = 0.0;   // unscaled max constraint/bound violation
  double dual_inf = 0.0;     // scaled
  double complementarity = 0.0;
  double wall_time = 0.0;
  std::string message;
  std::vector<IterationRecord> history;

  bool converged() const { return status == IpmStatus::Converged; }
};

IpmResult solve(const Problem& problem, const IpmOptions& options = {});

}  // namespace nprace::nlp
