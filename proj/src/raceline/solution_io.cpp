#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nprace/errors.hpp"
#include "nprace/raceline/raceline.hpp"

namespace nprace::raceline {

using nlohmann::json;

namespace {

constexpr int kSolutionFormat = 1;

/// Per-node fields; the first 16 are the CSV columns.
std::vector<std::pair<std::string, double>> node_fields(const NodePoint& n) {
  return {{"s", n.s},
          {"y", n.z.y},
          {"theta_s", n.z.theta_s},
          {"v1", n.z.v1},
          {"v2", n.z.v2},
          {"w3", n.z.w3},
          {"c", n.z.c},
          {"c_dot", n.z.c_dot},
          {"d", n.z.d},
          {"d_dot", n.z.d_dot},
          {"gamma", n.u.gamma},
          {"Fx_f", n.u.Fx_f},
          {"Fx_r", n.u.Fx_r},
          {"Fz_f", n.a.Fz_f},
          {"Fz_r", n.a.Fz_r},
          {"time", n.time},
          {"v1_dot", n.a.v1_dot},
          {"v2_dot", n.a.v2_dot},
          {"w3_dot", n.a.w3_dot},
          {"c_ddot", n.a.c_ddot},
          {"d_ddot", n.u.d_ddot}};
}

void set_field(NodePoint& n, const std::string& key, double v) {
  if (key == "s") n.s = n.z.s = v;
  else if (key == "y") n.z.y = v;
  else if (key == "theta_s") n.z.theta_s = v;
  else if (key == "v1") n.z.v1 = v;
  else if (key == "v2") n.z.v2 = v;
  else if (key == "w3") n.z.w3 = v;
  else if (key == "c") n.z.c = v;
  else if (key == "c_dot") n.z.c_dot = v;
  else if (key == "d") n.z.d = v;
  else if (key == "d_dot") n.z.d_dot = v;
  else if (key == "gamma") n.u.gamma = v;
  else if (key == "Fx_f") n.u.Fx_f = v;
  else if (key == "Fx_r") n.u.Fx_r = v;
  else if (key == "Fz_f") n.a.Fz_f = v;
  else if (key == "Fz_r") n.a.Fz_r = v;
  else if (key == "time") n.time = v;
  else if (key == "v1_dot") n.a.v1_dot = v;
  else if (key == "v2_dot") n.a.v2_dot = v;
  else if (key == "w3_dot") n.a.w3_dot = v;
  else if (key == "c_ddot") n.a.c_ddot = v;
  else if (key == "d_ddot") n.u.d_ddot = v;
}

json state_json(const dynamics::State& z) {
  return json::array({z.s, z.y, z.theta_s, z.v1, z.v2, z.w3, z.c, z.c_dot, z.d, z.d_dot});
}

}  // namespace

std::string solution_to_json(const RacelineSolution& sol) {
  json j;
  j["format"] = kSolutionFormat;
  const CollocationConfig& c = sol.config;
  j["config"] = {{"num_intervals", c.num_intervals}, {"degree", c.degree},        {"nlp_tol", c.nlp_tol},
                 {"max_iter", c.max_iter},           {"s_dot_min", c.s_dot_min},  {"force_scale", c.force_scale},
                 {"backend", nlp::backend_name(c.backend)}, {"attempts", c.attempts}};
  j["converged"] = sol.converged;
  j["lap_time"] = sol.lap_time;
  j["stats"] = {{"status", sol.stats.status},
                {"backend", sol.stats.backend},
                {"iterations", sol.stats.iterations},
                {"kkt_error", sol.stats.kkt_error},
                {"constraint_violation", sol.stats.constraint_violation}};
  j["validation"] = {{"replay_residual", sol.replay_residual},
                     {"periodicity_gap", sol.periodicity_gap},
                     {"path_violation", sol.path_violation}};
  json nodes = json::object();
  json idx_k = json::array(), idx_j = json::array();
  for (const NodePoint& n : sol.nodes) {
    idx_k.push_back(n.interval);
    idx_j.push_back(n.node);
    for (const auto& [k, v] : node_fields(n)) nodes[k].push_back(v);
  }
  nodes["interval"] = idx_k;
  nodes["node"] = idx_j;
  j["nodes"] = nodes;
  json starts = json::array();
  for (const auto& z : sol.starts) starts.push_back(state_json(z));
  j["interval_starts"] = starts;
  j["decision_vector"] = std::vector<double>(sol.x.data(), sol.x.data() + sol.x.size());
  j["diagnostics"] = sol.diagnostics;
  return j.dump(1);
}

RacelineSolution solution_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("$", e.what());
  }
  RacelineSolution sol;
  try {
    if (j.at("format").get<int>() != kSolutionFormat) throw ParseError("$.format", "unsupported version");
    const json& c = j.at("config");
    sol.config.num_intervals = c.at("num_intervals").get<int>();
    sol.config.degree = c.at("degree").get<int>();
    sol.config.nlp_tol = c.at("nlp_tol").get<double>();
    sol.config.max_iter = c.at("max_iter").get<int>();
    sol.config.s_dot_min = c.at("s_dot_min").get<double>();
    sol.config.force_scale = c.at("force_scale").get<double>();
    sol.config.backend = nlp::parse_backend(c.at("backend").get<std::string>());
    sol.config.attempts = c.value("attempts", sol.config.attempts);
    sol.converged = j.at("converged").get<bool>();
    sol.lap_time = j.at("lap_time").get<double>();
    const json& st = j.at("stats");
    sol.stats.status = st.at("status").get<std::string>();
    sol.stats.backend = st.at("backend").get<std::string>();
    sol.stats.iterations = st.at("iterations").get<int>();
    sol.stats.kkt_error = st.at("kkt_error").get<double>();
    sol.stats.constraint_violation = st.at("constraint_violation").get<double>();
    const json& v = j.at("validation");
    sol.replay_residual = v.at("replay_residual").get<double>();
    sol.periodicity_gap = v.at("periodicity_gap").get<double>();
    sol.path_violation = v.at("path_violation").get<double>();
    const json& nodes = j.at("nodes");
    const std::size_t n = nodes.at("s").size();
    sol.nodes.resize(n);
    for (const auto& [key, arr] : nodes.items()) {
      if (arr.size() != n) throw ParseError("$.nodes." + key, "length mismatch");
      for (std::size_t i = 0; i < n; ++i) {
        if (key == "interval") {
          sol.nodes[i].interval = arr[i].get<int>();
        } else if (key == "node") {
          sol.nodes[i].node = arr[i].get<int>();
        } else {
          set_field(sol.nodes[i], key, arr[i].get<double>());
        }
      }
    }
    for (const json& z : j.at("interval_starts")) {
      if (z.size() != 10) throw ParseError("$.interval_starts", "expected 10 entries per state");
      sol.starts.push_back({z[0], z[1], z[2], z[3], z[4], z[5], z[6], z[7], z[8], z[9]});
    }
    const auto xv = j.at("decision_vector").get<std::vector<double>>();
    sol.x = Eigen::Map<const Eigen::VectorXd>(xv.data(), static_cast<Eigen::Index>(xv.size()));
    sol.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError("$", e.what());
  }
  return sol;
}

std::string solution_to_csv(const RacelineSolution& sol) {
  static const char* cols[] = {"s", "y", "theta_s", "v1", "v2", "w3", "c", "c_dot",
                               "d", "d_dot", "gamma", "Fx_f", "Fx_r", "Fz_f", "Fz_r", "time"};
  std::ostringstream os;
  for (int i = 0; i < 16; ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  char buf[32];
  for (const NodePoint& n : sol.nodes) {
    const auto f = node_fields(n);
    for (int i = 0; i < 16; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", f[static_cast<std::size_t>(i)].second);
      os << (i ? "," : "") << buf;
    }
    os << "\n";
  }
  return os.str();
}

void write_solution(const RacelineSolution& sol, const std::filesystem::path& json_path,
                    const std::filesystem::path& csv_path) {
  auto put = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << text;
    if (!f) throw Error("write failed for " + p.string());
  };
  put(json_path, solution_to_json(sol));
  put(csv_path, solution_to_csv(sol));
}

RacelineSolution load_solution(const std::filesystem::path& json_path) {
  std::ifstream f(json_path, std::ios::binary);
  if (!f) throw Error("cannot read " + json_path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return solution_from_json(ss.str());
}

}  // namespace nprace::raceline
