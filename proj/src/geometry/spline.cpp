#include "nprace/geometry/spline.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "nprace/errors.hpp"

namespace nprace::geometry {

CubicSpline::CubicSpline(std::vector<double> knots, const std::vector<double>& values, bool periodic, double period)
    : knots_(std::move(knots)), periodic_(periodic), period_(period) {
  const int n = static_cast<int>(knots_.size());
  if (n < 2 || static_cast<int>(values.size()) != n) throw DomainError("spline needs at least two knots and one value per knot");
  for (int i = 1; i < n; ++i) {
    if (!(knots_[i] > knots_[i - 1])) throw DomainError("spline knots must be strictly increasing");
  }
  if (periodic_ && !(knots_.front() + period_ > knots_.back())) throw DomainError("spline period shorter than knot span");

  // Segment lengths and right-hand values; periodic splines get a closing segment.
  const int nseg = periodic_ ? n : n - 1;
  std::vector<double> h(nseg);
  std::vector<double> f1(nseg);
  for (int i = 0; i < nseg; ++i) {
    const bool closing = periodic_ && i == n - 1;
    h[i] = closing ? knots_.front() + period_ - knots_[i] : knots_[i + 1] - knots_[i];
    f1[i] = closing ? values[0] : values[i + 1];
  }

  // Second derivatives M at the knots.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  if (periodic_) {
    for (int i = 0; i < n; ++i) {
      const int im = (i + n - 1) % n;
      const int ip = (i + 1) % n;
      a(i, im) += h[im];
      a(i, i) += 2.0 * (h[im] + h[i]);
      a(i, ip) += h[i];
      rhs(i) = 6.0 * ((f1[i] - values[i]) / h[i] - (values[i] - values[im]) / h[im]);
    }
  } else {
    a(0, 0) = 1.0;
    a(n - 1, n - 1) = 1.0;
    for (int i = 1; i < n - 1; ++i) {
      a(i, i - 1) = h[i - 1];
      a(i, i) = 2.0 * (h[i - 1] + h[i]);
      a(i, i + 1) = h[i];
      rhs(i) = 6.0 * ((values[i + 1] - values[i]) / h[i] - (values[i] - values[i - 1]) / h[i - 1]);
    }
  }
  const Eigen::VectorXd m = a.partialPivLu().solve(rhs);

  coef_.resize(nseg);
  for (int i = 0; i < nseg; ++i) {
    const double mi = m(i);
    const double mj = m((i + 1) % n);
    coef_[i] = {values[i], (f1[i] - values[i]) / h[i] - h[i] * (2.0 * mi + mj) / 6.0, 0.5 * mi,
                (mj - mi) / (6.0 * h[i])};
  }
}

int CubicSpline::segment(double s) const {
  const int nseg = static_cast<int>(coef_.size());
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  int idx = static_cast<int>(it - knots_.begin()) - 1;
  return std::clamp(idx, 0, nseg - 1);
}

}  // namespace nprace::geometry
