#pragma once

// Radau (right-endpoint) collocation on the unit interval.

#include <Eigen/Core>
#include <vector>

namespace nprace::raceline {

inline constexpr int kMinDegree = 1;
inline constexpr int kMaxDegree = 5;

struct CollocationScheme {
  int degree = 0;
  /// tau[0] = 0 followed by the p Radau nodes; tau[p] = 1.
  std::vector<double> tau;
  /// Quadrature weights of the p nodes on [0, 1].
  std::vector<double> weights;
  /// D(j, i) = derivative of the i-th Lagrange basis on tau[0..p] at tau[j+1].
  Eigen::MatrixXd diff;
  /// Q(j, l) = integral over [0, tau[j+1]] of the l-th Lagrange basis on tau[1..p].
  Eigen::MatrixXd integ;
};

/// Throws DomainError for degrees outside [1, 5].
CollocationScheme collocation_nodes(int degree);

/// Evaluates the Lagrange interpolant through (nodes, values) at t.
double lagrange_interpolate(const std::vector<double>& nodes, const std::vector<double>& values, double t);

}  // namespace nprace::raceline
