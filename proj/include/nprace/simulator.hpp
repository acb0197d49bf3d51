#pragma once

// Forward integration of the motorcycle DAE. Algebraic variables are found
// by Newton's method on g = 0 at every stage, with Jacobians from forward AD.

#include <functional>
#include <vector>

#include "nprace/dynamics.hpp"
#include "nprace/geometry/surface.hpp"
#include "nprace/motorcycle.hpp"

namespace nprace::sim {

using dynamics::AlgebraicState;
using dynamics::Input;
using dynamics::State;

enum class Scheme { ImplicitMidpoint, Rk4 };

struct SimConfig {
  double step_size = 0.01;
  /// Bound on the scaled residual: forces over m*g, moments over m*g*1 m.
  double newton_tol = 1e-10;
  int max_newton_iters = 50;
  Scheme scheme = Scheme::ImplicitMidpoint;
  /// Moving states with |v1| below this are rejected.
  double min_speed = 0.5;
  dynamics::ModelOptions model{};
};

/// Everything an evaluation needs besides the variables.
struct Model {
  const geometry::Surface& surface;
  const MotorcycleParams& params;
  dynamics::ModelOptions options{};
};

/// g scaled by m*g (forces) and m*g*1 m (moments).
std::array<double, dynamics::kAlgebraicSize> scaled_residual(const Model& model, const State& z, const Input& u,
                                                             const AlgebraicState& a);

/// Solves g(z, u, a) = 0 for a starting from guess.
/// Throws NonconvergenceError or ConfigurationError (singular dg/da).
AlgebraicState solve_algebraic(const Model& model, const State& z, const Input& u, const AlgebraicState& guess,
                               const SimConfig& cfg = {});

/// Input as a function of time and current state.
using InputSchedule = std::function<Input(double t, const State& z)>;

struct StepResult {
  State z;
  /// Algebraic state at the step's collocation stage (midpoint or last RK stage).
  AlgebraicState a_stage;
  double max_stage_residual = 0.0;
};

/// One integration step from (t, z). a_guess warm-starts the stage solves.
StepResult step(const Model& model, double t, const State& z, const InputSchedule& u, const AlgebraicState& a_guess,
                const SimConfig& cfg);

struct Trajectory {
  std::vector<double> t;
  std::vector<State> z;
  std::vector<AlgebraicState> a;
  /// Largest scaled residual at any stage of the step ending at each sample (0 for the first).
  std::vector<double> residual;
};

/// Integrates for `duration`; the last step is shortened to land exactly on it.
Trajectory simulate(const Model& model, const State& initial, const InputSchedule& u, double duration,
                    const SimConfig& cfg = {}, const AlgebraicState& a_guess = {});

/// Static normal loads on level ground.
AlgebraicState static_algebraic(const MotorcycleParams& p);

/// Steady circular motion on a flat, level plane.
struct TrimPoint {
  State z;
  Input u;
  AlgebraicState a;
  double residual = 0.0;
};

/// Finds the trim with forward speed v and yaw rate v / radius: solves for
/// camber, lateral velocity, steer, both normal forces and rear drive force
/// (front drive force zero).
TrimPoint circular_trim(const MotorcycleParams& p, double speed, double radius, const SimConfig& cfg = {});

}  // namespace nprace::sim
