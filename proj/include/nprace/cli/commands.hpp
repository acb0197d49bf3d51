#pragma once

// Command implementations behind the nprace executable. Each returns a
// process exit code and writes its report to `out`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nprace/geometry/surface.hpp"
#include "nprace/motorcycle.hpp"
#include "nprace/raceline/raceline.hpp"

namespace nprace::cli {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNonconvergence = 3, kExitIo = 4 };

struct ConfigOverrides {
  std::optional<int> intervals;
  std::optional<int> degree;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<bool> drag;
};

struct RunManifest {
  std::filesystem::path track;
  /// Empty selects the built-in reference parameters.
  std::filesystem::path params;
  std::filesystem::path out_dir = ".";
  ConfigOverrides overrides;
  /// 0 keeps the initial guess untouched; other values perturb it
  /// reproducibly.
  std::uint64_t seed = 0;
};

/// Grid used by `check` and `geometry`.
struct GridSize {
  int s = 400;
  int y = 11;
};

/// Worst condition number of (I - n II) over a grid of the surface.
double worst_offset_condition(const geometry::Surface& surface, double n, GridSize grid = {});

/// Plot data: one row per grid point with position, normal, second
/// fundamental form, principal curvatures and gravity components in the
/// body frame aligned with the centerline direction (theta_s = 0).
std::string geometry_csv(const geometry::Surface& surface, const MotorcycleParams& params, GridSize grid);

/// Loads parameters, applying the drag override. Empty path gives defaults.
MotorcycleParams load_manifest_params(const RunManifest& manifest);

/// Collocation settings after overrides.
raceline::CollocationConfig manifest_config(const RunManifest& manifest);

/// Seeded perturbation of a decision vector (lateral offset and speed only).
void perturb_guess(const raceline::Transcription& tr, std::uint64_t seed, Eigen::VectorXd& x);

/// Per-interval open-loop replay statistics.
struct IntervalReplay {
  int interval = 0;
  double s_start = 0.0;
  double max_node_residual = 0.0;
  /// Max |z_sim - z_colloc| at the interval end over the 9 NLP states.
  double end_state_gap = 0.0;
  std::string error;
};

struct ReplayReport {
  std::vector<IntervalReplay> intervals;
  double max_residual = 0.0;
  double max_end_gap = 0.0;
  bool algebraic_failure = false;
  bool passed = false;
};

ReplayReport replay_solution(const raceline::RacelineProblem& problem, const raceline::RacelineSolution& sol,
                             double tol = raceline::kReplayTol);

int cmd_check(const std::filesystem::path& track, const std::filesystem::path& params, std::ostream& out);
int cmd_solve(const RunManifest& manifest, std::ostream& out);
int cmd_simulate(const RunManifest& manifest, const std::filesystem::path& solution, std::ostream& out);
int cmd_geometry(const std::filesystem::path& track, const std::filesystem::path& params,
                 const std::filesystem::path& csv, GridSize grid, std::ostream& out);

}  // namespace nprace::cli
