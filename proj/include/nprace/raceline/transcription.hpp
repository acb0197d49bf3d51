#pragma once

// Direct collocation of the periodic minimum-time problem with s as the
// independent variable.
//
// Decision vector, interval by interval (k = 0..K-1):
//   z_{k,0}                         9 states at the interval start
//   x_{k,j}, j = 1..p               19 node variables each:
//     [0..8]   y, theta_s, v1, v2, w3, c, c_dot, d, d_dot
//     [9..14]  v1_dot, v2_dot, w3_dot, c_ddot, Fz_f/F, Fz_r/F
//     [15..18] gamma, d_ddot, Fx_f/F, Fx_r/F
// with F the force scale (m*g by default). Total K * (9 + 19 p) variables.
//
// Constraints per interval: 9 p collocation rows, 6 p DAE rows (g / F),
// 6 p path inequalities, 9 continuity rows linking x_{k,p} to z_{k+1,0}
// (z_{0,0} for the last interval).

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "nprace/dynamics.hpp"
#include "nprace/geometry/surface.hpp"
#include "nprace/motorcycle.hpp"
#include "nprace/nlp/kkt.hpp"
#include "nprace/nlp/problem.hpp"
#include "nprace/raceline/collocation.hpp"

namespace nprace::raceline {

inline constexpr int kNumStates = 9;
inline constexpr int kNumNodeVars = 19;
inline constexpr int kNumDae = 6;
inline constexpr int kNumPath = 6;
/// Node-function outputs: 9 ds-derivatives, 6 DAE residuals, 6 path terms, 1/s_dot.
inline constexpr int kNumNodeOutputs = kNumStates + kNumDae + kNumPath + 1;

namespace var {
enum : int {
  y = 0, theta_s, v1, v2, w3, c, c_dot, d, d_dot,
  v1_dot, v2_dot, w3_dot, c_ddot, Fz_f, Fz_r,
  gamma, d_ddot, Fx_f, Fx_r
};
}  // namespace var

/// Starting point of the NLP.
enum class GuessKind {
  /// Zero camber and steer, static loads.
  Centerline,
  /// Centerline path at the same speed, with camber, steer, side slip, loads
  /// and rear drive force solved node by node for zero DAE residual.
  SteadyState,
};

struct CollocationConfig {
  int num_intervals = 60;
  int degree = 3;
  double nlp_tol = 1e-6;
  /// Iteration limit per solver attempt.
  int max_iter = 3000;
  double s_dot_min = 1.0;
  /// Normalization for forces; <= 0 selects m * g.
  double force_scale = 0.0;
  nlp::KktBackend backend = nlp::KktBackend::Sparse;
  bool parallel = true;
  int verbosity = 0;
  /// Bounds the NLP adds beyond the vehicle limits.
  double camber_max = 1.2;
  double heading_max = 1.2;
  double v1_min = 1.0;
  double v1_max = 150.0;
  GuessKind guess = GuessKind::SteadyState;
  /// Interior-point settings tuned for this problem family.
  double mu_init = 1e-2;
  double theta_max_factor = 1.0;
  /// Failed solves are retried from the initial guess with the
  /// infeasibility cap tightened tenfold, up to this many attempts in total.
  int attempts = 3;
};

/// Throws ValidationError for out-of-range settings.
void validate(const CollocationConfig& cfg);

struct RacelineProblem {
  geometry::SurfacePtr surface;
  MotorcycleParams params;
  dynamics::ModelOptions model{};
};

enum class ExecutionMode { Serial, Parallel };

/// The NLP; evaluation caches make repeated calls at the same x cheap.
class Transcription final : public nlp::Problem {
 public:
  Transcription(RacelineProblem problem, CollocationConfig config);

  int num_variables() const override { return n_; }
  int num_constraints() const override { return m_; }
  void variable_bounds(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const override;
  void constraint_bounds(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const override;
  Eigen::VectorXd initial_point() const override;
  double objective(const Eigen::VectorXd& x) const override;
  void gradient(const Eigen::VectorXd& x, Eigen::VectorXd& g) const override;
  void constraints(const Eigen::VectorXd& x, Eigen::VectorXd& c) const override;
  const nlp::Structure& jacobian_structure() const override { return jac_structure_; }
  void jacobian_values(const Eigen::VectorXd& x, Eigen::VectorXd& values) const override;
  const nlp::Structure& hessian_structure() const override { return hess_structure_; }
  void hessian_values(const Eigen::VectorXd& x, double sigma, const Eigen::VectorXd& lambda,
                      Eigen::VectorXd& values) const override;

  // Layout.
  int num_intervals() const { return K_; }
  int degree() const { return p_; }
  int interval_offset(int k) const { return k * block_; }
  int node_offset(int k, int j) const { return k * block_ + kNumStates + (j - 1) * kNumNodeVars; }
  double interval_length() const { return h_; }
  double node_s(int k, int j) const { return h_ * (k + scheme_.tau[j]); }
  double force_scale() const { return fscale_; }
  const CollocationScheme& scheme() const { return scheme_; }
  const RacelineProblem& problem() const { return prob_; }
  const CollocationConfig& config() const { return cfg_; }

  /// Node outputs for all K*p nodes (row-major, kNumNodeOutputs each).
  std::vector<double> node_values(const Eigen::VectorXd& x, ExecutionMode mode) const;
  /// Node outputs and their 19-column Jacobians.
  void node_jacobians(const Eigen::VectorXd& x, ExecutionMode mode, std::vector<double>& values,
                      std::vector<double>& jac) const;
  /// Packed lower-triangular Lagrangian Hessian blocks (190 per node).
  std::vector<double> node_hessians(const Eigen::VectorXd& x, double sigma, const Eigen::VectorXd& lambda,
                                    ExecutionMode mode) const;

  /// Constraint row of the DAE residual i at node (k, j).
  int dae_row(int k, int j, int i) const { return k * rows_per_interval_ + p_ * kNumStates + (j - 1) * kNumDae + i; }
  int path_row(int k, int j, int i) const {
    return k * rows_per_interval_ + p_ * (kNumStates + kNumDae) + (j - 1) * kNumPath + i;
  }

  /// Decodes node variables into model quantities.
  dynamics::State node_state(const Eigen::VectorXd& x, int k, int j) const;
  dynamics::AlgebraicState node_algebraic(const Eigen::VectorXd& x, int k, int j) const;
  dynamics::Input node_input(const Eigen::VectorXd& x, int k, int j) const;
  dynamics::State start_state(const Eigen::VectorXd& x, int k) const;

 private:
  template <typename T>
  std::array<T, kNumNodeOutputs> eval_node(double s, const std::array<T, kNumNodeVars>& v) const;

  void build_structures();
  void ensure_values(const Eigen::VectorXd& x) const;
  void ensure_jacobian(const Eigen::VectorXd& x) const;

  RacelineProblem prob_;
  CollocationConfig cfg_;
  CollocationScheme scheme_;
  int K_ = 0, p_ = 0, block_ = 0, rows_per_interval_ = 0, n_ = 0, m_ = 0;
  double h_ = 0.0, fscale_ = 1.0;
  nlp::Structure jac_structure_, hess_structure_;

  mutable Eigen::VectorXd cache_x_values_, cache_x_jac_;
  mutable std::vector<double> cache_values_, cache_jac_values_, cache_jac_;
};

/// Centerline, constant-speed initial guess: y = 0, heading along the
/// centerline, zero accelerations. With GuessKind::Centerline camber and
/// steer are zero and normal forces static.
Eigen::VectorXd initial_guess(const Transcription& tr, GuessKind kind = GuessKind::Centerline);

/// Speed used by initial_guess: bounded lateral acceleration on the sharpest
/// centerline curvature, clamped to [5, 30] m/s.
double initial_guess_speed(const RacelineProblem& problem);

}  // namespace nprace::raceline
