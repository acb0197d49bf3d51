#include "nprace/raceline/collocation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "nprace/errors.hpp"

namespace nprace::raceline {

namespace {

/// Legendre P_n(x) by the three-term recurrence.
double legendre(int n, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// Right Radau polynomial P_p(x) - P_{p-1}(x); its roots on [-1, 1] include x = 1.
double radau_poly(int p, double x) { return legendre(p, x) - legendre(p - 1, x); }

/// Monomial coefficients of the Lagrange basis on the given nodes.
Eigen::MatrixXd lagrange_coefficients(const std::vector<double>& nodes) {
  const int n = static_cast<int>(nodes.size());
  Eigen::MatrixXd v(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) v(i, k) = std::pow(nodes[i], k);
  }
  // Column i holds the coefficients of basis i: V * C = I.
  return v.fullPivLu().solve(Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

CollocationScheme collocation_nodes(int degree) {
  if (degree < kMinDegree || degree > kMaxDegree) {
    throw DomainError("collocation degree " + std::to_string(degree) + " outside [1, 5]");
  }
  CollocationScheme sc;
  sc.degree = degree;
  sc.tau.push_back(0.0);

  // Interior roots by sign-change scan and bisection on (-1, 1).
  std::vector<double> roots;
  const int grid = 4000;
  double xa = -1.0, fa = radau_poly(degree, xa);
  for (int i = 1; i < grid; ++i) {
    const double xb = -1.0 + 2.0 * i / grid;
    const double fb = radau_poly(degree, xb);
    if (fa == 0.0) {
      roots.push_back(xa);
    } else if (fa * fb < 0.0) {
      double lo = xa, hi = xb, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = radau_poly(degree, mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    xa = xb;
    fa = fb;
  }
  for (double r : roots) sc.tau.push_back(0.5 * (r + 1.0));
  sc.tau.push_back(1.0);
  if (static_cast<int>(sc.tau.size()) != degree + 1) throw DomainError("Radau root count mismatch");

  const int p = degree;
  // Differentiation matrix on tau[0..p].
  const Eigen::MatrixXd cfull = lagrange_coefficients(sc.tau);
  sc.diff.resize(p, p + 1);
  for (int j = 0; j < p; ++j) {
    const double t = sc.tau[j + 1];
    for (int i = 0; i <= p; ++i) {
      double d = 0.0;
      for (int k = 1; k <= p; ++k) d += k * cfull(k, i) * std::pow(t, k - 1);
      sc.diff(j, i) = d;
    }
  }

  // Quadrature and integration matrix from the basis on tau[1..p].
  const std::vector<double> nodes(sc.tau.begin() + 1, sc.tau.end());
  const Eigen::MatrixXd cn = lagrange_coefficients(nodes);
  sc.weights.assign(p, 0.0);
  sc.integ.resize(p, p);
  for (int l = 0; l < p; ++l) {
    for (int k = 0; k < p; ++k) sc.weights[l] += cn(k, l) / (k + 1);
    for (int j = 0; j < p; ++j) {
      double q = 0.0;
      for (int k = 0; k < p; ++k) q += cn(k, l) * std::pow(nodes[j], k + 1) / (k + 1);
      sc.integ(j, l) = q;
    }
  }
  return sc;
}

double lagrange_interpolate(const std::vector<double>& nodes, const std::vector<double>& values, double t) {
  double out = 0.0;
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    double l = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) l *= (t - nodes[k]) / (nodes[i] - nodes[k]);
    }
    out += l * values[i];
  }
  return out;
}

}  // namespace nprace::raceline
