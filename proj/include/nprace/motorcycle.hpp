#pragma once

// Motorcycle parameters and tire geometry: camber/steer of each tire,
// contact-point velocities and slip angles.

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

#include "nprace/ad/dual.hpp"
#include "nprace/errors.hpp"

namespace nprace {

/// Contact speed below which slip angles are undefined.
inline constexpr double kMinContactSpeed = 0.1;

struct TireParams {
  double d4 = 1.2;       // peak friction coefficient
  double d7 = 0.1;       // camber peak reduction [1/rad^2]
  double B_alpha = 8.0;  // lateral curve stiffness factor
  double C_alpha = 1.5;  // lateral curve shape factor
  double k_gamma = 0.08; // camber to equivalent slip
  double radius = 0.3;   // rolling radius [m]
  double I_spin = 0.6;   // spin inertia [kg m^2]
};

struct DragParams {
  bool enabled = false;
  double rho = 1.225;  // air density [kg/m^3]
  double CdA = 0.35;   // drag area [m^2]
};

/// Physical constants of the rider-vehicle system; defaults are the
/// reference sport motorcycle.
struct MotorcycleParams {
  double m = 240.0;
  double I11 = 18.0, I22 = 60.0, I33 = 48.0;
  double I12 = 0.0, I13 = 0.0, I23 = 0.0;
  double lf = 0.75, lr = 0.75;
  double h = 0.5;  // COM height above road
  double r = 0.1;  // camber axis height
  double epsilon = std::numbers::pi / 6.0;  // rake [rad]
  double delta = 0.0;  // fork offset [m]; geometric only
  double gamma_max = 0.7;
  double d_max = 0.05;
  double dddot_max = 0.5;
  double P_max = 50e3;
  double g = 9.81;
  TireParams front{};
  TireParams rear{.I_spin = 1.2};
  DragParams drag{};

  double weight() const { return m * g; }
};

/// Throws ValidationError naming the first offending field.
void validate(const MotorcycleParams& p);

/// Parses a parameter JSON document; missing keys keep their defaults.
/// Throws ParseError (malformed) or ValidationError (out of range).
MotorcycleParams parse_params(const std::string& json_text);
MotorcycleParams load_params_file(const std::filesystem::path& path);
std::string params_to_json(const MotorcycleParams& p);

enum class Wheel { Front, Rear };

template <typename T>
struct TireAngles {
  T camber{}, steer{};
};

/// Camber and steer of the front tire from body camber c, steering-head
/// rotation gamma and rake eps.
template <typename T>
TireAngles<T> front_tire_angles(const T& c, const T& gamma, double eps) {
  const T sc = sin(c), cc = cos(c), sg = sin(gamma), cg = cos(gamma);
  const double se = std::sin(eps), ce = std::cos(eps);
  const T arg = sc * cg + cc * sg * se;
  if (std::abs(ad::value(arg)) > 1.0) throw DomainError("front tire camber outside [-pi/2, pi/2]");
  return {asin(arg), atan2(sg * ce, cc * cg - sc * sg * se)};
}

template <typename T>
TireAngles<T> rear_tire_angles(const T& c) {
  return {c, T(0.0)};
}

template <typename T>
struct ContactVelocity {
  T v1{}, v2{};
};

/// Velocity of a tire contact point from the reference-frame velocity
/// (v1, v2) and angular velocity (w1, w2, w3).
template <typename T>
ContactVelocity<T> tire_contact_velocity(const T& v1, const T& v2, const T& w1, const T& w2, const T& w3,
                                         const MotorcycleParams& p, Wheel wheel) {
  const double arm = wheel == Wheel::Front ? p.lf : -p.lr;
  return {v1 - w2 * p.r, v2 + w3 * arm + w1 * p.r};
}

/// Angle between the tire plane and the contact velocity.
template <typename T>
T slip_angle(const T& vt1, const T& vt2, const T& steer) {
  const double speed = std::hypot(ad::value(vt1), ad::value(vt2));
  if (!(speed > kMinContactSpeed)) {
    throw LowSpeedError("contact speed " + std::to_string(speed) + " m/s too low for a slip angle");
  }
  const T cs = cos(steer), ss = sin(steer);
  return atan2(vt2 * cs - vt1 * ss, vt1 * cs + vt2 * ss);
}

}  // namespace nprace
