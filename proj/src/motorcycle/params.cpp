#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "nprace/motorcycle.hpp"

namespace nprace {

namespace {

using nlohmann::json;

void read_number(const json& obj, const char* key, const std::string& path, double& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ParseError(path + "." + key, "expected a number");
  out = v.get<double>();
  if (!std::isfinite(out)) throw ParseError(path + "." + key, "value is not finite");
}

void read_tire(const json& obj, const std::string& path, TireParams& t) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  read_number(obj, "d4", path, t.d4);
  read_number(obj, "d7", path, t.d7);
  read_number(obj, "B_alpha", path, t.B_alpha);
  read_number(obj, "C_alpha", path, t.C_alpha);
  read_number(obj, "k_gamma", path, t.k_gamma);
  read_number(obj, "radius", path, t.radius);
  read_number(obj, "I_spin", path, t.I_spin);
}

json tire_json(const TireParams& t) {
  return {{"d4", t.d4},           {"d7", t.d7},         {"B_alpha", t.B_alpha}, {"C_alpha", t.C_alpha},
          {"k_gamma", t.k_gamma}, {"radius", t.radius}, {"I_spin", t.I_spin}};
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError("$." + field + ": " + what);
}

void validate_tire(const TireParams& t, const std::string& path) {
  require(t.d4 > 0.0, path + ".d4", "must be positive");
  require(t.d7 >= 0.0, path + ".d7", "must be non-negative");
  require(t.B_alpha > 0.0, path + ".B_alpha", "must be positive");
  require(t.C_alpha > 0.0, path + ".C_alpha", "must be positive");
  require(t.radius > 0.0, path + ".radius", "must be positive");
  require(t.I_spin >= 0.0, path + ".I_spin", "must be non-negative");
}

}  // namespace

void validate(const MotorcycleParams& p) {
  require(p.m > 0.0, "m", "must be positive");
  require(p.g > 0.0, "g", "must be positive");
  require(p.lf > 0.0, "lf", "must be positive");
  require(p.lr > 0.0, "lr", "must be positive");
  require(p.r > 0.0, "r", "must be positive");
  require(p.h > p.r, "h", "must exceed r");
  require(std::abs(p.epsilon) < std::numbers::pi / 2, "epsilon_deg", "must be within (-90, 90)");
  require(p.gamma_max > 0.0 && p.gamma_max < std::numbers::pi / 2, "gamma_max", "must be in (0, pi/2)");
  require(p.d_max >= 0.0, "d_max", "must be non-negative");
  require(p.dddot_max >= 0.0, "dddot_max", "must be non-negative");
  require(p.P_max > 0.0, "P_max", "must be positive");
  // Positive definiteness via leading principal minors.
  const double m1 = p.I11;
  const double m2 = p.I11 * p.I22 - p.I12 * p.I12;
  const double m3 = p.I11 * (p.I22 * p.I33 - p.I23 * p.I23) - p.I12 * (p.I12 * p.I33 - p.I23 * p.I13) +
                    p.I13 * (p.I12 * p.I23 - p.I22 * p.I13);
  require(m1 > 0.0 && m2 > 0.0 && m3 > 0.0, "I11", "inertia matrix must be positive definite");
  validate_tire(p.front, "tires.front");
  validate_tire(p.rear, "tires.rear");
  if (p.drag.enabled) {
    require(p.drag.rho > 0.0, "drag.rho", "must be positive");
    require(p.drag.CdA >= 0.0, "drag.CdA", "must be non-negative");
  }
}

MotorcycleParams parse_params(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("$", "expected an object");

  MotorcycleParams p;
  for (auto [key, field] : {std::pair{"m", &p.m}, {"I11", &p.I11}, {"I22", &p.I22}, {"I33", &p.I33},
                            {"I12", &p.I12}, {"I13", &p.I13}, {"I23", &p.I23}, {"lf", &p.lf},
                            {"lr", &p.lr}, {"h", &p.h}, {"r", &p.r}, {"delta", &p.delta},
                            {"gamma_max", &p.gamma_max}, {"d_max", &p.d_max}, {"dddot_max", &p.dddot_max},
                            {"P_max", &p.P_max}, {"g", &p.g}}) {
    read_number(doc, key, "$", *field);
  }
  if (doc.contains("epsilon_deg")) {
    double deg = 0.0;
    read_number(doc, "epsilon_deg", "$", deg);
    p.epsilon = deg * std::numbers::pi / 180.0;
  }
  if (doc.contains("tires")) {
    const json& t = doc["tires"];
    if (!t.is_object()) throw ParseError("$.tires", "expected an object");
    if (t.contains("front")) read_tire(t["front"], "$.tires.front", p.front);
    if (t.contains("rear")) read_tire(t["rear"], "$.tires.rear", p.rear);
  }
  if (doc.contains("drag")) {
    const json& d = doc["drag"];
    if (!d.is_object()) throw ParseError("$.drag", "expected an object");
    if (d.contains("enabled")) {
      if (!d["enabled"].is_boolean()) throw ParseError("$.drag.enabled", "expected a boolean");
      p.drag.enabled = d["enabled"].get<bool>();
    }
    read_number(d, "rho", "$.drag", p.drag.rho);
    read_number(d, "CdA", "$.drag", p.drag.CdA);
  }
  validate(p);
  return p;
}

MotorcycleParams load_params_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_params(buf.str());
}

std::string params_to_json(const MotorcycleParams& p) {
  json doc = {{"m", p.m},
              {"I11", p.I11},
              {"I22", p.I22},
              {"I33", p.I33},
              {"I12", p.I12},
              {"I13", p.I13},
              {"I23", p.I23},
              {"lf", p.lf},
              {"lr", p.lr},
              {"h", p.h},
              {"r", p.r},
              {"epsilon_deg", p.epsilon * 180.0 / std::numbers::pi},
              {"delta", p.delta},
              {"gamma_max", p.gamma_max},
              {"d_max", p.d_max},
              {"dddot_max", p.dddot_max},
              {"P_max", p.P_max},
              {"g", p.g}};
  doc["tires"]["front"] = tire_json(p.front);
  doc["tires"]["rear"] = tire_json(p.rear);
  doc["drag"] = {{"enabled", p.drag.enabled}, {"rho", p.drag.rho}, {"CdA", p.drag.CdA}};
  return doc.dump(2);
}

}  // namespace nprace
