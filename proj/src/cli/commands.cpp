#include "nprace/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "nprace/errors.hpp"
#include "nprace/geometry/track.hpp"
#include "nprace/kinematics.hpp"
#include "nprace/simulator.hpp"

namespace nprace::cli {

namespace fs = std::filesystem;
using raceline::CollocationConfig;
using raceline::RacelineProblem;
using raceline::RacelineSolution;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// Grid over the lateral domain, s sampled on [0, L).
template <typename F>
void for_each_grid_point(const geometry::Surface& surface, GridSize grid, F&& f) {
  for (int i = 0; i < grid.s; ++i) {
    const double s = surface.length() * i / grid.s;
    const geometry::LateralBounds b = surface.lateral_bounds(s);
    for (int j = 0; j < grid.y; ++j) {
      const double y = grid.y == 1 ? 0.5 * (b.y_min + b.y_max) : b.y_min + (b.y_max - b.y_min) * j / (grid.y - 1);
      f(s, y);
    }
  }
}

/// Maps library exceptions to exit codes, printing the message.
int report_error(const std::exception& e, std::ostream& out) {
  out << "FAIL: " << e.what() << "\n";
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const DomainError*>(&e) || dynamic_cast<const RegularityError*>(&e) ||
      dynamic_cast<const TranscriptionError*>(&e) || dynamic_cast<const OffsetSingularityError*>(&e)) {
    return kExitValidation;
  }
  if (dynamic_cast<const NonconvergenceError*>(&e)) return kExitNonconvergence;
  return kExitIo;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f) throw Error("write failed for " + path.string());
}

/// Throws plain Error (exit code 4) for unreadable files so that parse and
/// validation problems keep their own codes.
void require_readable(const fs::path& path, const char* what) {
  std::ifstream f(path);
  if (!f) throw Error(std::string("cannot read ") + what + " file " + path.string());
}

RacelineProblem load_problem(const RunManifest& m) {
  require_readable(m.track, "track");
  if (!m.params.empty()) require_readable(m.params, "params");
  RacelineProblem problem;
  problem.surface = geometry::build_track(geometry::load_track_file(m.track));
  problem.params = load_manifest_params(m);
  return problem;
}

}  // namespace

double worst_offset_condition(const geometry::Surface& surface, double n, GridSize grid) {
  double worst = 0.0;
  for_each_grid_point(surface, grid, [&](double s, double y) {
    const geometry::SurfaceSample smp = geometry::evaluate_surface(surface, s, y);
    const Mat2<double> m = smp.form1 - n * smp.form2;
    worst = std::max(worst, condition_number(m));
  });
  return worst;
}

std::string geometry_csv(const geometry::Surface& surface, const MotorcycleParams& params, GridSize grid) {
  std::ostringstream os;
  os << "s,y,x,y_world,z,n_x,n_y,n_z,II_ss,II_sy,II_yy,k1,k2,g1,g2,g3\n";
  char buf[48];
  auto put = [&](double v, bool last = false) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    os << buf << (last ? '\n' : ',');
  };
  for_each_grid_point(surface, grid, [&](double s, double y) {
    const geometry::SurfaceSample smp = geometry::evaluate_surface(surface, s, y);
    // Principal curvatures: eigenvalues of I^-1 II.
    const Mat2<double> shape = smp.form1.inverse() * smp.form2;
    const double tr = shape.m11 + shape.m22;
    const double det = shape.det();
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    const kinematics::Pose pose{s, y, 0.0, 0.0};
    const Vec3<double> g = kinematics::gravity_components(pose, smp, {0.0, 0.0, -params.g});
    for (double v : {s, y, smp.position.x, smp.position.y, smp.position.z, smp.normal.x, smp.normal.y, smp.normal.z,
                     smp.form2.m11, smp.form2.m12, smp.form2.m22, 0.5 * tr + disc, 0.5 * tr - disc, g.x, g.y}) {
      put(v);
    }
    put(g.z, true);
  });
  return os.str();
}

MotorcycleParams load_manifest_params(const RunManifest& manifest) {
  MotorcycleParams p = manifest.params.empty() ? MotorcycleParams{} : load_params_file(manifest.params);
  if (manifest.overrides.drag) p.drag.enabled = *manifest.overrides.drag;
  validate(p);
  return p;
}

CollocationConfig manifest_config(const RunManifest& manifest) {
  CollocationConfig cfg;
  const ConfigOverrides& o = manifest.overrides;
  if (o.intervals) cfg.num_intervals = *o.intervals;
  if (o.degree) cfg.degree = *o.degree;
  if (o.tol) cfg.nlp_tol = *o.tol;
  if (o.max_iter) cfg.max_iter = *o.max_iter;
  raceline::validate(cfg);
  return cfg;
}

void perturb_guess(const raceline::Transcription& tr, std::uint64_t seed, Eigen::VectorXd& x) {
  if (seed == 0) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const geometry::Surface& surface = *tr.problem().surface;
  for (int k = 0; k < tr.num_intervals(); ++k) {
    // One offset per interval keeps the guess smooth enough to converge.
    const double dy = 0.1 * unit(rng);
    const double dv = 1.0 + 0.01 * unit(rng);
    auto apply = [&](int off, double s) {
      const geometry::LateralBounds b = surface.lateral_bounds(s);
      x(off + raceline::var::y) = std::clamp(x(off + raceline::var::y) + dy, b.y_min, b.y_max);
      x(off + raceline::var::v1) *= dv;
    };
    apply(tr.interval_offset(k), tr.node_s(k, 0));
    for (int j = 1; j <= tr.degree(); ++j) apply(tr.node_offset(k, j), tr.node_s(k, j));
  }
}

ReplayReport replay_solution(const RacelineProblem& problem, const RacelineSolution& sol, double tol) {
  ReplayReport rep;
  const int p = sol.config.degree;
  const int K = static_cast<int>(sol.starts.size());
  if (K == 0 || static_cast<int>(sol.nodes.size()) != K * p) {
    throw ValidationError("solution has " + std::to_string(sol.nodes.size()) + " nodes for " + std::to_string(K) +
                          " intervals of degree " + std::to_string(p));
  }
  const sim::Model model{*problem.surface, problem.params, problem.model};
  for (int k = 0; k < K; ++k) {
    IntervalReplay ir;
    ir.interval = k;
    ir.s_start = sol.starts[static_cast<std::size_t>(k)].s;
    const raceline::NodePoint* nodes = &sol.nodes[static_cast<std::size_t>(k * p)];
    for (int j = 0; j < p; ++j) {
      for (double g : sim::scaled_residual(model, nodes[j].z, nodes[j].u, nodes[j].a)) {
        ir.max_node_residual = std::max(ir.max_node_residual, std::abs(g));
      }
    }
    // Open-loop: inputs interpolated in time through the interval's nodes.
    const double t0 = k == 0 ? 0.0 : sol.nodes[static_cast<std::size_t>(k * p - 1)].time;
    const double duration = nodes[p - 1].time - t0;
    std::vector<double> tn(static_cast<std::size_t>(p));
    std::array<std::vector<double>, 4> un;
    for (int j = 0; j < p; ++j) {
      tn[static_cast<std::size_t>(j)] = nodes[j].time - t0;
      un[0].push_back(nodes[j].u.gamma);
      un[1].push_back(nodes[j].u.d_ddot);
      un[2].push_back(nodes[j].u.Fx_f);
      un[3].push_back(nodes[j].u.Fx_r);
    }
    const sim::InputSchedule schedule = [&](double t, const sim::State&) {
      if (p == 1) return nodes[0].u;
      return sim::Input{raceline::lagrange_interpolate(tn, un[0], t), raceline::lagrange_interpolate(tn, un[1], t),
                        raceline::lagrange_interpolate(tn, un[2], t), raceline::lagrange_interpolate(tn, un[3], t)};
    };
    sim::SimConfig cfg;
    cfg.step_size = duration / 20.0;
    try {
      const sim::Trajectory traj =
          sim::simulate(model, sol.starts[static_cast<std::size_t>(k)], schedule, duration, cfg, nodes[0].a);
      const sim::State& a = traj.z.back();
      const sim::State& b = nodes[p - 1].z;
      const std::array<double, 9> diff{a.y - b.y, a.theta_s - b.theta_s, a.v1 - b.v1,       a.v2 - b.v2,      a.w3 - b.w3,
                                       a.c - b.c, a.c_dot - b.c_dot,     a.d - b.d,         a.d_dot - b.d_dot};
      for (double d : diff) ir.end_state_gap = std::max(ir.end_state_gap, std::abs(d));
    } catch (const Error& e) {
      ir.error = e.what();
      rep.algebraic_failure = true;
    }
    rep.max_residual = std::max(rep.max_residual, ir.max_node_residual);
    rep.max_end_gap = std::max(rep.max_end_gap, ir.end_state_gap);
    rep.intervals.push_back(ir);
  }
  rep.passed = rep.max_residual <= tol && !rep.algebraic_failure;
  return rep;
}

int cmd_check(const fs::path& track, const fs::path& params, std::ostream& out) {
  try {
    require_readable(track, "track");
    const geometry::TrackDefinition def = geometry::load_track_file(track);
    const auto surface = geometry::build_track(def);
    out << "track " << def.name << ": length " << fmt("%.3f", surface->length()) << " m, regular on the sampled grid\n";
    MotorcycleParams p;
    if (!params.empty()) {
      require_readable(params, "params");
      p = load_params_file(params);
    }
    validate(p);
    out << "params: OK (m=" << p.m << " kg, P_max=" << p.P_max << " W)\n";
    const double cond = worst_offset_condition(*surface, p.r);
    out << "worst condition number of (I - n II) at n=" << p.r << ": " << fmt("%.6g", cond) << "\n";
    if (!(cond <= kinematics::kMaxOffsetCondition)) {
      out << "FAIL: offset metric is singular somewhere on the track\n";
      return kExitValidation;
    }
    out << "PASS\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(e, out);
  }
}

int cmd_solve(const RunManifest& manifest, std::ostream& out) {
  RacelineProblem problem;
  CollocationConfig cfg;
  try {
    problem = load_problem(manifest);
    cfg = manifest_config(manifest);
    const double cond = worst_offset_condition(*problem.surface, problem.params.r);
    if (!(cond <= kinematics::kMaxOffsetCondition)) throw ValidationError("offset metric singular on the track");
    fs::create_directories(manifest.out_dir);
  } catch (const fs::filesystem_error& e) {
    out << "FAIL: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    return report_error(e, out);
  }

  RacelineSolution sol;
  try {
    std::optional<Eigen::VectorXd> guess;
    if (manifest.seed != 0) {
      CollocationConfig c = cfg;
      c.backend = raceline::backend_from_env(c.backend);
      const raceline::Transcription tr(problem, c);
      Eigen::VectorXd x = raceline::initial_guess(tr, c.guess);
      perturb_guess(tr, manifest.seed, x);
      guess = x;
    }
    sol = raceline::solve_raceline(problem, cfg, guess);
  } catch (const std::exception& e) {
    return report_error(e, out);
  }

  try {
    if (!sol.converged) {
      std::string text;
      for (const std::string& d : sol.diagnostics) text += d + "\n";
      write_text(manifest.out_dir / "diagnostics.txt", text);
      out << "FAIL: solver did not converge (" << sol.stats.status << "); see "
          << (manifest.out_dir / "diagnostics.txt").string() << "\n";
      return kExitNonconvergence;
    }
    raceline::write_solution(sol, manifest.out_dir / "solution.json", manifest.out_dir / "trajectory.csv");
  } catch (const std::exception& e) {
    out << "FAIL: " << e.what() << "\n";
    return kExitIo;
  }
  out << "lap_time " << fmt("%.6f", sol.lap_time) << " s  iterations " << sol.stats.iterations
      << "  max_violation " << fmt("%.3e", sol.stats.constraint_violation) << "  wall_time "
      << fmt("%.2f", sol.stats.wall_time) << " s\n";
  return kExitOk;
}

int cmd_simulate(const RunManifest& manifest, const fs::path& solution, std::ostream& out) {
  RacelineProblem problem;
  RacelineSolution sol;
  try {
    problem = load_problem(manifest);
    require_readable(solution, "solution");
    sol = raceline::load_solution(solution);
  } catch (const std::exception& e) {
    return report_error(e, out);
  }
  ReplayReport rep;
  try {
    rep = replay_solution(problem, sol);
  } catch (const std::exception& e) {
    return report_error(e, out);
  }
  out << "interval,s_start,max_node_residual,end_state_gap,error\n";
  for (const IntervalReplay& ir : rep.intervals) {
    out << ir.interval << "," << fmt("%.6f", ir.s_start) << "," << fmt("%.3e", ir.max_node_residual) << ","
        << fmt("%.3e", ir.end_state_gap) << "," << ir.error << "\n";
  }
  out << "max residual " << fmt("%.3e", rep.max_residual) << " (gate " << fmt("%.0e", raceline::kReplayTol)
      << "), max open-loop end-state gap " << fmt("%.3e", rep.max_end_gap) << "\n";
  if (rep.algebraic_failure) {
    for (const IntervalReplay& ir : rep.intervals) {
      if (!ir.error.empty()) {
        out << "FAIL: algebraic solve failed in the interval starting at s=" << fmt("%.3f", ir.s_start) << ": "
            << ir.error << "\n";
        break;
      }
    }
    return kExitNonconvergence;
  }
  if (!rep.passed) {
    out << "FAIL: replay residual above tolerance\n";
    return kExitValidation;
  }
  out << "PASS\n";
  return kExitOk;
}

int cmd_geometry(const fs::path& track, const fs::path& params, const fs::path& csv, GridSize grid,
                 std::ostream& out) {
  std::string text;
  try {
    if (grid.s < 1 || grid.y < 1) throw ValidationError("grid sizes must be positive");
    require_readable(track, "track");
    const auto surface = geometry::build_track(geometry::load_track_file(track));
    MotorcycleParams p;
    if (!params.empty()) {
      require_readable(params, "params");
      p = load_params_file(params);
    }
    text = geometry_csv(*surface, p, grid);
  } catch (const std::exception& e) {
    return report_error(e, out);
  }
  try {
    write_text(csv, text);
  } catch (const std::exception& e) {
    out << "FAIL: " << e.what() << "\n";
    return kExitIo;
  }
  out << "wrote " << grid.s * grid.y << " grid points to " << csv.string() << "\n";
  return kExitOk;
}

}  // namespace nprace::cli
