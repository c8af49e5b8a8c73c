#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "cat0lab/convexity.hpp"
#include "cat0lab/geodesic.hpp"
#include "cat0lab/io.hpp"
#include "cat0lab/mappings.hpp"
#include "cat0lab/sampling.hpp"
#include "cat0lab/scheme.hpp"

namespace {

using namespace cat0lab;

const char* const kSpaces[] = {"euclidean:5", "disk", "tree:star3"};

std::vector<Point> draw(const SpaceModel& space, std::size_t n) {
  Rng rng = substream(1, 0);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(sample_point(space, rng));
  return pts;
}

void BM_Distance(benchmark::State& state) {
  const auto space = io::parse_space(kSpaces[state.range(0)]);
  const auto pts = draw(space, 256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(distance(space, pts[i & 255], pts[(i + 1) & 255]));
    ++i;
  }
  state.SetLabel(kSpaces[state.range(0)]);
}
BENCHMARK(BM_Distance)->DenseRange(0, 2);

void BM_Combine(benchmark::State& state) {
  const auto space = io::parse_space(kSpaces[state.range(0)]);
  const auto pts = draw(space, 256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(combine(space, pts[i & 255], pts[(i + 1) & 255], 0.3));
    ++i;
  }
  state.SetLabel(kSpaces[state.range(0)]);
}
BENCHMARK(BM_Combine)->DenseRange(0, 2);

void BM_Cat0Audit(benchmark::State& state) {
  const auto space = io::parse_space(kSpaces[state.range(0)]);
  AuditSpec spec;
  spec.sample_count = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(check_cat0(space, spec));
  state.SetLabel(kSpaces[state.range(0)]);
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Cat0Audit)->DenseRange(0, 2);

void BM_Scheme(benchmark::State& state) {
  const auto space = SpaceModel::poincare_disk();
  ScheduleConfig cfg;
  cfg.S_seq = {LipschitzMap::contraction(space.disk_point({0.1, 0.2}), 0.6)};
  cfg.T_seq = {LipschitzMap::rotation(space.disk_point({0.0, 0.0}), 0.5)};
  cfg.t_schedule = 0.7;
  cfg.n_steps = static_cast<std::size_t>(state.range(0));
  cfg.x0 = space.disk_point({0.5, 0.0});
  cfg.x1 = space.disk_point({0.0, -0.5});
  cfg.stop_tol = 1e-300;
  for (auto _ : state) benchmark::DoNotOptimize(run_scheme(space, cfg));
}
BENCHMARK(BM_Scheme)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
