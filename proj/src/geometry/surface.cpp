#include "nprace/geometry/surface.hpp"

namespace nprace::geometry {

SurfaceSample evaluate_surface(const Surface& surface, double s, double y) {
  if (!std::isfinite(s) || !std::isfinite(y)) throw DomainError("non-finite surface coordinates");
  double sr = s;
  if (surface.periodic()) {
    sr = surface.reduce(s);
  } else if (s < 0.0 || s > surface.length()) {
    throw DomainError("s=" + std::to_string(s) + " outside [0, " + std::to_string(surface.length()) + "]");
  }
  const LateralBounds b = surface.lateral_bounds(sr);
  if (y < b.y_min || y > b.y_max) {
    throw DomainError("y=" + std::to_string(y) + " outside [" + std::to_string(b.y_min) + ", " +
                      std::to_string(b.y_max) + "] at s=" + std::to_string(sr));
  }
  const SurfacePartials<double> p = surface.partials(sr, y);
  check_regular(p, sr, y);
  return make_sample(p);
}

}  // namespace nprace::geometry
