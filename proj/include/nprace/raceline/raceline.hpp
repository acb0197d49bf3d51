#pragma once

// Minimum-time raceline solve, replay validation and solution files.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nprace/nlp/ipm.hpp"
#include "nprace/raceline/transcription.hpp"

namespace nprace::raceline {

/// Environment variable selecting the KKT backend ("sparse" or "dense").
inline constexpr const char* kSolverEnv = "NPRACE_SOLVER";
/// Replay gate on the normalized DAE residual.
inline constexpr double kReplayTol = 1e-6;

struct SolverStats {
  std::string status;
  std::string backend;
  int iterations = 0;
  double kkt_error = 0.0;
  double constraint_violation = 0.0;
  /// Not written to solution files, which stay bit-identical across runs.
  double wall_time = 0.0;
};

/// One collocation node (interval k, node j >= 1).
struct NodePoint {
  int interval = 0;
  int node = 0;
  double s = 0.0;
  double time = 0.0;
  dynamics::State z;
  dynamics::AlgebraicState a;
  dynamics::Input u;
};

struct RacelineSolution {
  CollocationConfig config;
  bool converged = false;
  double lap_time = 0.0;
  SolverStats stats;
  std::vector<NodePoint> nodes;
  /// Interval start states z_{k,0}.
  std::vector<dynamics::State> starts;
  /// Max over nodes of the normalized DAE residual.
  double replay_residual = 0.0;
  /// Max |z_{0,0} - z_{K-1,p}| over the 9 transcribed states.
  double periodicity_gap = 0.0;
  /// Max path-constraint violation (normalized).
  double path_violation = 0.0;
  /// Raw NLP decision vector, for warm starts.
  Eigen::VectorXd x;
  /// Human-readable hints when the solve failed.
  std::vector<std::string> diagnostics;
};

/// Backend from the environment, falling back to `fallback`.
nlp::KktBackend backend_from_env(nlp::KktBackend fallback);

/// Solves the NLP. Never throws on nonconvergence: check `converged` and
/// `diagnostics`. Throws ValidationError / TranscriptionError on bad input.
RacelineSolution solve_raceline(const RacelineProblem& problem, const CollocationConfig& config,
                                const std::optional<Eigen::VectorXd>& guess = std::nullopt);

/// Decodes a decision vector into per-node quantities and validation metrics.
RacelineSolution decode_solution(const Transcription& tr, const Eigen::VectorXd& x);

/// Node times by collocation quadrature of 1/s_dot; the last entry of the
/// returned vector (size K p + 1, starting at 0) is the lap time.
std::vector<double> node_times(const Transcription& tr, const Eigen::VectorXd& x);

/// Max normalized DAE residual, evaluated through the simulator's residual.
double replay_residual(const RacelineProblem& problem, const std::vector<NodePoint>& nodes);

struct BaselineResult {
  double speed = 0.0;
  double lap_time = 0.0;
};

/// Largest constant speed at which steady circular motion of the given
/// radius respects the vehicle limits, and the resulting lap time over
/// `length`.
BaselineResult constant_speed_baseline(const MotorcycleParams& params, double radius, double length);

// Solution files.
std::string solution_to_json(const RacelineSolution& sol);
RacelineSolution solution_from_json(const std::string& text);
std::string solution_to_csv(const RacelineSolution& sol);
void write_solution(const RacelineSolution& sol, const std::filesystem::path& json_path,
                    const std::filesystem::path& csv_path);
RacelineSolution load_solution(const std::filesystem::path& json_path);

}  // namespace nprace::raceline
