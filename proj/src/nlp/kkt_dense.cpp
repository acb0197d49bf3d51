#include <lapacke.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "nprace/errors.hpp"
#include "nprace/nlp/kkt.hpp"

namespace nprace::nlp {

std::unique_ptr<KktSolver> make_sparse_kkt_solver();

namespace {

/// Bunch-Kaufman factorization of the full matrix; inertia read from the
/// 1x1 and 2x2 diagonal blocks.
class DenseBunchKaufman final : public KktSolver {
 public:
  bool factor(const Eigen::SparseMatrix<double>& lower) override {
    n_ = static_cast<int>(lower.rows());
    a_ = Eigen::MatrixXd(lower);  // column-major, lower triangle filled
    ipiv_.assign(n_, 0);
    const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n_, a_.data(), n_, ipiv_.data());
    if (info < 0) return false;
    inertia_ = {};
    for (int k = 0; k < n_;) {
      if (ipiv_[k] > 0) {
        count(a_(k, k));
        ++k;
      } else {
        const double a = a_(k, k), b = a_(k + 1, k), c = a_(k + 1, k + 1);
        const double det = a * c - b * b;
        if (det < 0.0) {
          ++inertia_.positive;
          ++inertia_.negative;
        } else if (det > 0.0) {
          const int sign = (a + c) > 0.0 ? 1 : -1;
          (sign > 0 ? inertia_.positive : inertia_.negative) += 2;
        } else {
          count(a + c);
          ++inertia_.zero;
        }
        k += 2;
      }
    }
    return info == 0 || inertia_.zero > 0;
  }

  Inertia inertia() const override { return inertia_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override {
    Eigen::VectorXd x = rhs;
    LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n_, 1, a_.data(), n_, ipiv_.data(), x.data(), n_);
    return x;
  }

  std::string name() const override { return "dense-bunch-kaufman"; }

 private:
  void count(double d) {
    if (d > 0.0) {
      ++inertia_.positive;
    } else if (d < 0.0) {
      ++inertia_.negative;
    } else {
      ++inertia_.zero;
    }
  }

  int n_ = 0;
  Eigen::MatrixXd a_;
  std::vector<lapack_int> ipiv_;
  Inertia inertia_;
};

}  // namespace

std::unique_ptr<KktSolver> make_kkt_solver(KktBackend backend) {
  if (backend == KktBackend::Dense) return std::make_unique<DenseBunchKaufman>();
  return make_sparse_kkt_solver();
}

KktBackend parse_backend(const std::string& name) {
  if (name == "sparse") return KktBackend::Sparse;
  if (name == "dense") return KktBackend::Dense;
  throw DomainError("unknown KKT backend '" + name + "' (expected sparse or dense)");
}

const char* backend_name(KktBackend backend) { return backend == KktBackend::Dense ? "dense" : "sparse"; }

}  // namespace nprace::nlp
