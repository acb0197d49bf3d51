#include "nprace/geometry/track.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace nprace::geometry {

namespace {

using nlohmann::json;

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(path + "." + key, "missing required field");
  return j.at(key);
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(path, "value is not finite");
  return v;
}

std::vector<double> as_number_list(const json& j, const std::string& path) {
  if (j.is_number()) return {as_number(j, path)};
  if (!j.is_array()) throw ParseError(path, "expected a number or an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

double interp_per_knot(const std::vector<double>& values, const std::vector<double>& knots, double period, bool periodic,
                       double s) {
  if (values.size() == 1) return values.front();
  const int n = static_cast<int>(knots.size());
  auto it = std::upper_bound(knots.begin(), knots.end(), s);
  int i = static_cast<int>(it - knots.begin()) - 1;
  if (i < 0) return values.front();
  if (i >= n - 1) {
    if (!periodic) return values.back();
    const double t = (s - knots[n - 1]) / (knots.front() + period - knots[n - 1]);
    return values[n - 1] + t * (values[0] - values[n - 1]);
  }
  const double t = (s - knots[i]) / (knots[i + 1] - knots[i]);
  return values[i] + t * (values[i + 1] - values[i]);
}

}  // namespace

TrackDefinition parse_track(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("$", "expected an object");

  const json& fmt = require(doc, "format", "$");
  if (!fmt.is_number_integer() || fmt.get<int>() != kTrackFormat) {
    throw ParseError("$.format", "unsupported track format (expected " + std::to_string(kTrackFormat) + ")");
  }

  TrackDefinition def;
  const json& name = require(doc, "name", "$");
  if (!name.is_string()) throw ParseError("$.name", "expected a string");
  def.name = name.get<std::string>();
  if (doc.contains("periodic")) {
    if (!doc["periodic"].is_boolean()) throw ParseError("$.periodic", "expected a boolean");
    def.periodic = doc["periodic"].get<bool>();
  }

  const json& cl = require(doc, "centerline", "$");
  const json& pts = require(cl, "points", "$.centerline");
  if (!pts.is_array()) throw ParseError("$.centerline.points", "expected an array of [x, y, z]");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string path = "$.centerline.points[" + std::to_string(i) + "]";
    if (!pts[i].is_array() || pts[i].size() != 3) throw ParseError(path, "expected [x, y, z]");
    def.points.push_back({as_number(pts[i][0], path + "[0]"), as_number(pts[i][1], path + "[1]"),
                          as_number(pts[i][2], path + "[2]")});
  }
  if (def.points.size() < 4) throw ParseError("$.centerline.points", "at least 4 control points are required");
  if (cl.contains("knots")) {
    def.knots = as_number_list(cl["knots"], "$.centerline.knots");
    if (def.knots.size() != def.points.size() + (def.periodic ? 1 : 0)) {
      throw ParseError("$.centerline.knots",
                       def.periodic ? "periodic tracks need one knot per point plus the closing length"
                                    : "expected one knot per point");
    }
  }

  if (doc.contains("cross_section")) {
    const json& cs = doc["cross_section"];
    if (!cs.is_array() || cs.size() != def.points.size()) {
      throw ParseError("$.cross_section", "expected one coefficient list per centerline point");
    }
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string path = "$.cross_section[" + std::to_string(i) + "]";
      std::vector<double> coeffs = as_number_list(cs[i], path);
      if (coeffs.size() > kMaxProfileDegree + 1) throw ParseError(path, "profile degree must be at most 4");
      def.cross_section.push_back(std::move(coeffs));
    }
  }

  const json& width = require(doc, "width", "$");
  def.y_min = as_number_list(require(width, "y_min", "$.width"), "$.width.y_min");
  def.y_max = as_number_list(require(width, "y_max", "$.width"), "$.width.y_max");
  for (const auto* list : {&def.y_min, &def.y_max}) {
    if (list->size() != 1 && list->size() != def.points.size()) {
      throw ParseError(list == &def.y_min ? "$.width.y_min" : "$.width.y_max",
                       "expected a number or one value per centerline point");
    }
  }
  for (std::size_t i = 0; i < def.points.size(); ++i) {
    const double lo = def.y_min.size() == 1 ? def.y_min[0] : def.y_min[i];
    const double hi = def.y_max.size() == 1 ? def.y_max[0] : def.y_max[i];
    if (!(lo < hi)) throw ParseError("$.width", "y_min must be below y_max at point " + std::to_string(i));
  }
  return def;
}

TrackDefinition load_track_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_track(buf.str());
}

std::string track_to_json(const TrackDefinition& def) {
  json doc;
  doc["format"] = kTrackFormat;
  doc["name"] = def.name;
  doc["periodic"] = def.periodic;
  json pts = json::array();
  for (const auto& p : def.points) pts.push_back({p.x, p.y, p.z});
  doc["centerline"]["points"] = pts;
  if (!def.knots.empty()) doc["centerline"]["knots"] = def.knots;
  if (!def.cross_section.empty()) doc["cross_section"] = def.cross_section;
  doc["width"]["y_min"] = def.y_min.size() == 1 ? json(def.y_min[0]) : json(def.y_min);
  doc["width"]["y_max"] = def.y_max.size() == 1 ? json(def.y_max[0]) : json(def.y_max);
  return doc.dump(2);
}

SplineKnots SplineTrack::prepare_knots(const TrackDefinition& def) {
  const int n = static_cast<int>(def.points.size());
  if (n < 4) throw ValidationError("track needs at least 4 centerline points");
  SplineKnots out;
  if (!def.knots.empty()) {
    out.knots.assign(def.knots.begin(), def.knots.begin() + n);
    out.period = def.periodic ? def.knots[n] - def.knots[0] : def.knots[n - 1] - def.knots[0];
    const double s0 = out.knots.front();
    for (double& k : out.knots) k -= s0;
  } else {
    // Cumulative chord length.
    out.knots.push_back(0.0);
    for (int i = 1; i < n; ++i) out.knots.push_back(out.knots.back() + norm(def.points[i] - def.points[i - 1]));
    out.period = def.periodic ? out.knots.back() + norm(def.points[0] - def.points[n - 1]) : out.knots.back();
  }
  return out;
}

SplineTrack::SplineTrack(const TrackDefinition& def) : SplineTrack(def, prepare_knots(def)) {}

SplineTrack::SplineTrack(const TrackDefinition& def, SplineKnots k)
    : SurfaceModel(def.name, k.period, def.periodic, {}),
      knots_(std::move(k.knots)),
      y_min_(def.y_min),
      y_max_(def.y_max) {
  const int n = static_cast<int>(def.points.size());
  const double period = length();

  std::array<std::vector<double>, 3> coords;
  for (const auto& p : def.points) {
    coords[0].push_back(p.x);
    coords[1].push_back(p.y);
    coords[2].push_back(p.z);
  }
  for (int i = 0; i < 3; ++i) center_[i] = CubicSpline(knots_, coords[i], def.periodic, period);

  // Horizontal left normal at each knot, splined.
  std::array<std::vector<double>, 3> lat;
  for (int k = 0; k < n; ++k) {
    const double dx = center_[0].eval(knots_[k]).df;
    const double dy = center_[1].eval(knots_[k]).df;
    const double len = std::hypot(dx, dy);
    if (len < 1e-9) {
      throw ValidationError("centerline tangent is vertical or zero at knot " + std::to_string(k));
    }
    lat[0].push_back(-dy / len);
    lat[1].push_back(dx / len);
    lat[2].push_back(0.0);
  }
  for (int i = 0; i < 3; ++i) lateral_[i] = CubicSpline(knots_, lat[i], def.periodic, period);

  std::size_t degree_plus_one = 0;
  for (const auto& c : def.cross_section) degree_plus_one = std::max(degree_plus_one, c.size());
  for (std::size_t k = 0; k < degree_plus_one; ++k) {
    std::vector<double> a;
    for (const auto& c : def.cross_section) a.push_back(k < c.size() ? c[k] : 0.0);
    profile_.emplace_back(knots_, a, def.periodic, period);
  }
}

LateralBounds SplineTrack::lateral_bounds(double s) const {
  const double sr = reduce(s);
  return {interp_per_knot(y_min_, knots_, length(), periodic(), sr),
          interp_per_knot(y_max_, knots_, length(), periodic(), sr)};
}

Vec3<double> SplineTrack::centerline(double s) const {
  const double sr = reduce(s);
  return {center_[0].eval(sr).f, center_[1].eval(sr).f, center_[2].eval(sr).f};
}

void validate_surface(const Surface& surface, int samples_s, int samples_y) {
  const double length = surface.length();
  for (int i = 0; i < samples_s; ++i) {
    const double s = length * i / samples_s;
    const LateralBounds b = surface.lateral_bounds(s);
    Vec3<double> first_normal{};
    for (int j = 0; j < samples_y; ++j) {
      const double y = b.y_min + (b.y_max - b.y_min) * j / (samples_y - 1);
      const SurfacePartials<double> p = surface.partials(s, y);
      try {
        check_regular(p, s, y);
      } catch (const RegularityError& e) {
        throw ValidationError(std::string("irregular surface: ") + e.what());
      }
      // A fold between samples shows up as a flipped normal.
      const Vec3<double> n = cross(p.xs, p.xy);
      if (j == 0) {
        first_normal = n;
      } else if (dot(n, first_normal) <= 0.0) {
        throw ValidationError("surface folds over between y=" + std::to_string(b.y_min) + " and (s=" +
                              std::to_string(s) + ", y=" + std::to_string(y) + ")");
      }
      for (const Vec3<double>& v : {p.x, p.xs, p.xy, p.xss, p.xsy, p.xyy}) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
          throw ValidationError("non-finite surface value at (s=" + std::to_string(s) + ", y=" + std::to_string(y) +
                                ")");
        }
      }
    }
  }
}

std::shared_ptr<const SplineTrack> build_track(const TrackDefinition& def) {
  auto track = std::make_shared<const SplineTrack>(def);
  const int n = static_cast<int>(def.points.size());
  validate_surface(*track, 8 * n, 9);

  // Coarse self-intersection test: centerline samples far apart along s may
  // not come closer than the sum of their half widths.
  const int m = std::max(200, 8 * n);
  const double length = track->length();
  std::vector<Vec3<double>> c(m);
  std::vector<double> half(m);
  for (int i = 0; i < m; ++i) {
    const double s = length * i / m;
    c[i] = track->centerline(s);
    const LateralBounds b = track->lateral_bounds(s);
    half[i] = std::max(std::abs(b.y_min), std::abs(b.y_max));
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      double ds = length * (j - i) / m;
      if (def.periodic) ds = std::min(ds, length - ds);
      const double reach = half[i] + half[j];
      if (ds <= 2.0 * reach) continue;
      if (norm(c[i] - c[j]) < reach) {
        throw ValidationError("self-intersecting track near s=" + std::to_string(length * i / m) +
                              " and s=" + std::to_string(length * j / m));
      }
    }
  }
  return track;
}

}  // namespace nprace::geometry
