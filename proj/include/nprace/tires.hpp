#pragma once

// Tire lateral force with a friction-ellipse peak cap, and wheel spin
// angular momentum.

#include <cmath>

#include "nprace/ad/dual.hpp"
#include "nprace/errors.hpp"
#include "nprace/motorcycle.hpp"

namespace nprace {

/// Friction-circle radius D0 = d4 Fz / (1 + d7 c^2).
template <typename T>
T peak_force(const T& Fz, const T& camber, const TireParams& tp) {
  return tp.d4 * Fz / (1.0 + tp.d7 * camber * camber);
}

/// Lateral force available once Fx is spent: sqrt(D0^2 - Fx^2).
template <typename T>
T max_lateral_force(const T& Fz, const T& Fx, const T& camber, const TireParams& tp) {
  if (ad::value(Fz) < 0.0) throw InfeasibleForceError("negative normal force");
  const T d0 = peak_force(Fz, camber, tp);
  const T q = d0 * d0 - Fx * Fx;
  if (ad::value(q) < 0.0) {
    throw InfeasibleForceError("|Fx|=" + std::to_string(std::abs(ad::value(Fx))) + " exceeds D0=" +
                               std::to_string(ad::value(d0)));
  }
  if (ad::value(q) == 0.0) return T(0.0);
  return sqrt(q);
}

/// Tire lateral force along the tire's lateral axis.
///
/// Fy = Fy_max sin(C atan(B (k_gamma c - alpha))): camber pushes toward the
/// lean side and the force opposes the slip velocity.
template <typename T>
T lateral_force(const T& alpha, const T& camber, const T& Fz, const T& Fx, const TireParams& tp) {
  const T fmax = max_lateral_force(Fz, Fx, camber, tp);
  const T x = tp.k_gamma * camber - alpha;
  return fmax * sin(tp.C_alpha * atan(tp.B_alpha * x));
}

/// Spin angular momentum magnitude along the motorcycle pitch axis.
template <typename T>
T wheel_spin_momentum(const T& vt1, const TireParams& tp) {
  return vt1 * (tp.I_spin / tp.radius);
}

}  // namespace nprace
