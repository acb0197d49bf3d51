// Serial vs OpenMP node kernels of the collocation NLP on the nonplanar
// sample track. The thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <map>
#include <memory>

#include "nprace/geometry/track.hpp"
#include "nprace/raceline/transcription.hpp"

#ifndef NPRACE_DATA_DIR
#define NPRACE_DATA_DIR "data"
#endif

using namespace nprace;
using namespace nprace::raceline;

namespace {

struct Fixture {
  Transcription tr;
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;

  explicit Fixture(int intervals)
      : tr(make_problem(), make_config(intervals)),
        x(initial_guess(tr, GuessKind::SteadyState)),
        lambda(Eigen::VectorXd::LinSpaced(tr.num_constraints(), -1.0, 1.0)) {}

  static RacelineProblem make_problem() {
    RacelineProblem p;
    p.surface = geometry::build_track(
        geometry::load_track_file(std::filesystem::path(NPRACE_DATA_DIR) / "tracks/nonplanar_sample.json"));
    return p;
  }
  static CollocationConfig make_config(int intervals) {
    CollocationConfig c;
    c.num_intervals = intervals;
    return c;
  }
};

Fixture& fixture(int intervals) {
  static std::map<int, std::unique_ptr<Fixture>> cache;
  auto& f = cache[intervals];
  if (!f) f = std::make_unique<Fixture>(intervals);
  return *f;
}

ExecutionMode mode_of(const benchmark::State& st) { return st.range(1) ? ExecutionMode::Parallel : ExecutionMode::Serial; }

void BM_NodeValues(benchmark::State& st) {
  auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(f.tr.node_values(f.x, mode_of(st)));
}

void BM_NodeJacobians(benchmark::State& st) {
  auto& f = fixture(static_cast<int>(st.range(0)));
  std::vector<double> v, j;
  for (auto _ : st) {
    f.tr.node_jacobians(f.x, mode_of(st), v, j);
    benchmark::DoNotOptimize(j.data());
  }
}

void BM_NodeHessians(benchmark::State& st) {
  auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(f.tr.node_hessians(f.x, 1.0, f.lambda, mode_of(st)));
}

void args(benchmark::internal::Benchmark* b) {
  for (int k : {60, 240}) {
    b->Args({k, 0});
    b->Args({k, 1});
  }
  b->ArgNames({"K", "parallel"})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_NodeValues)->Apply(args);
BENCHMARK(BM_NodeJacobians)->Apply(args);
BENCHMARK(BM_NodeHessians)->Apply(args);

BENCHMARK_MAIN();
