#pragma once

// Symmetric indefinite linear solvers for the primal-dual KKT system.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <memory>
#include <string>

namespace nprace::nlp {

struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

enum class KktBackend {
  /// Sparse LDL^T with AMD ordering (Eigen).
  Sparse,
  /// Dense Bunch-Kaufman (LAPACK dsytrf); reference for small problems.
  Dense,
};

class KktSolver {
 public:
  virtual ~KktSolver() = default;
  /// Factors the matrix given by its lower triangle. Returns false when the
  /// factorization breaks down.
  virtual bool factor(const Eigen::SparseMatrix<double>& lower) = 0;
  virtual Inertia inertia() const = 0;
  virtual Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const = 0;
  virtual std::string name() const = 0;
};

std::unique_ptr<KktSolver> make_kkt_solver(KktBackend backend);

/// Parses "sparse" / "dense"; throws DomainError otherwise.
KktBackend parse_backend(const std::string& name);
const char* backend_name(KktBackend backend);

}  // namespace nprace::nlp
