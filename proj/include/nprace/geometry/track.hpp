#pragma once

// Spline-based track surfaces loaded from JSON track files.
//
// x^p(s, y) = C(s) + y * Lat(s) + h(s, y) * z_world
//
// C is a cubic-spline centerline, Lat a splined horizontal unit normal to
// the centerline (pointing left of travel), and h(s, y) = sum_k a_k(s) y^k
// a lateral profile with per-knot coefficients (degree <= 4), splined in s.
// All pieces are C2 in s, so the surface is C2.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "nprace/geometry/spline.hpp"
#include "nprace/geometry/surface.hpp"

namespace nprace::geometry {

inline constexpr int kTrackFormat = 1;
inline constexpr int kMaxProfileDegree = 4;

/// In-memory form of a track file.
struct TrackDefinition {
  std::string name;
  bool periodic = true;
  std::vector<Vec3<double>> points;
  /// Parameter value at each point; empty means cumulative chord length.
  std::vector<double> knots;
  /// Per-knot lateral profile coefficients a_0..a_k (k <= 4); empty means flat.
  std::vector<std::vector<double>> cross_section;
  /// Lateral bounds, either one value or one per knot.
  std::vector<double> y_min, y_max;
};

struct SplineKnots {
  std::vector<double> knots;
  double period = 0.0;
};

class SplineTrack : public SurfaceModel<SplineTrack> {
 public:
  explicit SplineTrack(const TrackDefinition& def);

  template <typename T>
  SurfacePartials<T> eval(const T& s, const T& y) const {
    SurfacePartials<T> p;
    const T zero(0.0);
    std::array<SplineValue<T>, 3> c, lat;
    for (int i = 0; i < 3; ++i) {
      c[i] = center_[i].eval(s);
      lat[i] = lateral_[i].eval(s);
    }
    // Profile h and its derivatives in s and y.
    const int nk = static_cast<int>(profile_.size());
    std::array<T, kMaxProfileDegree + 1> pw;
    pw[0] = T(1.0);
    for (int k = 1; k < nk; ++k) pw[k] = pw[k - 1] * y;
    T h(0.0), hs(0.0), hss(0.0), hy(0.0), hsy(0.0), hyy(0.0);
    for (int k = 0; k < nk; ++k) {
      const SplineValue<T> a = profile_[k].eval(s);
      h += a.f * pw[k];
      hs += a.df * pw[k];
      hss += a.ddf * pw[k];
      if (k >= 1) {
        const T d1 = double(k) * pw[k - 1];
        hy += a.f * d1;
        hsy += a.df * d1;
      }
      if (k >= 2) hyy += a.f * (double(k * (k - 1)) * pw[k - 2]);
    }
    p.x = {c[0].f + y * lat[0].f, c[1].f + y * lat[1].f, c[2].f + y * lat[2].f + h};
    p.xs = {c[0].df + y * lat[0].df, c[1].df + y * lat[1].df, c[2].df + y * lat[2].df + hs};
    p.xy = {lat[0].f, lat[1].f, lat[2].f + hy};
    p.xss = {c[0].ddf + y * lat[0].ddf, c[1].ddf + y * lat[1].ddf, c[2].ddf + y * lat[2].ddf + hss};
    p.xsy = {lat[0].df, lat[1].df, lat[2].df + hsy};
    p.xyy = {zero, zero, hyy};
    return p;
  }

  LateralBounds lateral_bounds(double s) const override;

  /// Centerline position at s (y = 0 without the profile lift).
  Vec3<double> centerline(double s) const;

 private:
  SplineTrack(const TrackDefinition& def, SplineKnots knots);
  static SplineKnots prepare_knots(const TrackDefinition& def);

  std::array<CubicSpline, 3> center_;
  std::array<CubicSpline, 3> lateral_;
  std::vector<CubicSpline> profile_;
  std::vector<double> knots_;
  std::vector<double> y_min_, y_max_;
};

/// Parses a track JSON document. Throws ParseError naming the field path.
TrackDefinition parse_track(const std::string& json_text);
TrackDefinition load_track_file(const std::filesystem::path& path);
/// Serializes back to the documented JSON layout.
std::string track_to_json(const TrackDefinition& def);

/// Builds the surface and validates it on a sampled grid. Throws
/// ValidationError when the surface is irregular or self-intersecting.
std::shared_ptr<const SplineTrack> build_track(const TrackDefinition& def);

/// Samples the surface on a grid and throws ValidationError naming the
/// first (s, y) cell that is irregular.
void validate_surface(const Surface& surface, int samples_s, int samples_y);

}  // namespace nprace::geometry
