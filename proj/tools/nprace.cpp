// nprace: minimum-time motorcycle racelines on parametric road surfaces.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "nprace/cli/commands.hpp"
#include "nprace/raceline/raceline.hpp"

namespace {

struct Options {
  std::string track, params, out = "nprace_out", solution, csv = "geometry.csv";
  int intervals = 0, degree = 0, max_iter = 0;
  double tol = 0.0;
  std::string drag;
  std::uint64_t seed = 0;
  nprace::cli::GridSize grid;
};

nprace::cli::RunManifest manifest(const Options& o, const CLI::App& solve_like) {
  nprace::cli::RunManifest m;
  m.track = o.track;
  m.params = o.params;
  m.out_dir = o.out;
  m.seed = o.seed;
  auto given = [&](const char* name) {
    const CLI::Option* opt = solve_like.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--intervals")) m.overrides.intervals = o.intervals;
  if (given("--degree")) m.overrides.degree = o.degree;
  if (given("--tol")) m.overrides.tol = o.tol;
  if (given("--max-iter")) m.overrides.max_iter = o.max_iter;
  if (!o.drag.empty()) m.overrides.drag = o.drag == "on";
  return m;
}

void add_model_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--track", o.track, "Track JSON file")->required();
  cmd->add_option("--params", o.params, "Motorcycle parameter JSON (default: built-in reference machine)");
  cmd->add_option("--drag", o.drag, "Aerodynamic drag")->check(CLI::IsMember({"on", "off"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-time motorcycle racelines on nonplanar road surfaces.\n"
               "Set " + std::string(nprace::raceline::kSolverEnv) +
               "=sparse|dense to choose the KKT linear solver."};
  app.require_subcommand(1);
  Options o;

  CLI::App* check = app.add_subcommand("check", "Validate a track and parameter file");
  check->add_option("--track", o.track, "Track JSON file")->required();
  check->add_option("--params", o.params, "Motorcycle parameter JSON");

  CLI::App* solve = app.add_subcommand("solve", "Compute a minimum-time raceline");
  add_model_flags(solve, o);
  solve->add_option("--out", o.out, "Output directory")->capture_default_str();
  solve->add_option("--intervals", o.intervals, "Collocation intervals");
  solve->add_option("--degree", o.degree, "Collocation degree (2-5)");
  solve->add_option("--tol", o.tol, "NLP tolerance");
  solve->add_option("--max-iter", o.max_iter, "Iteration limit per solver attempt");
  solve->add_option("--seed", o.seed, "Perturb the initial guess reproducibly (0: no perturbation)");

  CLI::App* simulate = app.add_subcommand("simulate", "Replay a solution through the simulator");
  add_model_flags(simulate, o);
  simulate->add_option("--solution", o.solution, "Solution JSON written by solve")->required();

  CLI::App* geometry = app.add_subcommand("geometry", "Write a curvature / normal / gravity map as CSV");
  geometry->add_option("--track", o.track, "Track JSON file")->required();
  geometry->add_option("--params", o.params, "Motorcycle parameter JSON (for gravity)");
  geometry->add_option("--out", o.csv, "CSV output file")->capture_default_str();
  geometry->add_option("--ns", o.grid.s, "Samples along the track")->capture_default_str()->check(CLI::PositiveNumber);
  geometry->add_option("--ny", o.grid.y, "Samples across the track")->capture_default_str()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nprace::cli::kExitValidation;
  }

  try {
    if (*check) return nprace::cli::cmd_check(o.track, o.params, std::cout);
    if (*solve) return nprace::cli::cmd_solve(manifest(o, *solve), std::cout);
    if (*simulate) return nprace::cli::cmd_simulate(manifest(o, *simulate), o.solution, std::cout);
    if (*geometry) return nprace::cli::cmd_geometry(o.track, o.params, o.csv, o.grid, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nprace::cli::kExitIo;
  }
  return nprace::cli::kExitValidation;
}
