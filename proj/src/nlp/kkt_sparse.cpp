#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <cmath>

#include "nprace/errors.hpp"
#include "nprace/nlp/kkt.hpp"

namespace nprace::nlp {

namespace {

class SparseLdlt final : public KktSolver {
 public:
  bool factor(const Eigen::SparseMatrix<double>& lower) override {
    if (!analyzed_ || lower.nonZeros() != nnz_ || lower.rows() != rows_) {
      ldlt_.analyzePattern(lower);
      analyzed_ = true;
      nnz_ = lower.nonZeros();
      rows_ = lower.rows();
    }
    ldlt_.factorize(lower);
    if (ldlt_.info() != Eigen::Success) return false;
    const Eigen::VectorXd& d = ldlt_.vectorD();
    if (!d.allFinite()) return false;
    inertia_ = {};
    const double tiny = 1e-300;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (d(i) > tiny) {
        ++inertia_.positive;
      } else if (d(i) < -tiny) {
        ++inertia_.negative;
      } else {
        ++inertia_.zero;
      }
    }
    return true;
  }

  Inertia inertia() const override { return inertia_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override { return ldlt_.solve(rhs); }
  std::string name() const override { return "sparse-ldlt"; }

 private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  bool analyzed_ = false;
  Eigen::Index nnz_ = 0, rows_ = 0;
  Inertia inertia_;
};

}  // namespace

std::unique_ptr<KktSolver> make_sparse_kkt_solver() { return std::make_unique<SparseLdlt>(); }

}  // namespace nprace::nlp
