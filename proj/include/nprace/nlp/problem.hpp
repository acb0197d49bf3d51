#pragma once

// Nonlinear program in the standard interior-point form
//
//   min f(x)  s.t.  c_lo <= c(x) <= c_hi,  x_lo <= x <= x_hi
//
// with sparse first derivatives and a sparse Lagrangian Hessian. Rows with
// c_lo == c_hi are equalities. Infinite bounds use +-infinity.

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace nprace::nlp {

using Eigen::VectorXd;

/// (row, col) pairs; for the Hessian only the lower triangle (row >= col).
using Structure = std::vector<std::pair<int, int>>;

class Problem {
 public:
  virtual ~Problem() = default;

  virtual int num_variables() const = 0;
  virtual int num_constraints() const = 0;

  virtual void variable_bounds(VectorXd& lo, VectorXd& hi) const = 0;
  virtual void constraint_bounds(VectorXd& lo, VectorXd& hi) const = 0;
  virtual VectorXd initial_point() const = 0;

  // Evaluations may throw nprace::Error when x leaves the model's domain;
  // the solver treats that like a non-finite value and backtracks.
  virtual double objective(const VectorXd& x) const = 0;
  virtual void gradient(const VectorXd& x, VectorXd& g) const = 0;
  virtual void constraints(const VectorXd& x, VectorXd& c) const = 0;

  virtual const Structure& jacobian_structure() const = 0;
  virtual void jacobian_values(const VectorXd& x, VectorXd& values) const = 0;

  /// Lower triangle of sigma * Hess f + sum_i lambda_i Hess c_i.
  virtual const Structure& hessian_structure() const = 0;
  virtual void hessian_values(const VectorXd& x, double sigma, const VectorXd& lambda, VectorXd& values) const = 0;
};

}  // namespace nprace::nlp
