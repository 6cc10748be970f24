#include <benchmark/benchmark.h>

#include <random>

#include "gyrox/element.hpp"
#include "gyrox/filter.hpp"
#include "gyrox/homogenize.hpp"
#include "gyrox/topopt.hpp"
#include "gyrox/tpms_voxel.hpp"

using namespace gyrox;

namespace {

std::vector<double> random_densities(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

void BM_ElementStiffness(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(element_stiffness(0.3, {1.0 / 32, 1.0 / 32, 1.0 / 32}));
}
BENCHMARK(BM_ElementStiffness);

void BM_VoxelizeGyroid(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(voxelize_gyroid(TpmsSpec{}, Resolution::cube(n)));
}
BENCHMARK(BM_VoxelizeGyroid)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Homogenize(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto kind = state.range(1) == 0 ? SolverKind::Cholesky : SolverKind::Pcg;
  const auto rho = random_densities(Resolution::cube(n).count());
  Homogenizer h(Resolution::cube(n), {}, MaterialModel{}, {.kind = kind});
  for (auto _ : state) benchmark::DoNotOptimize(h.run(rho));
}
BENCHMARK(BM_Homogenize)->Args({8, 0})->Args({8, 1})->Args({16, 0})->Args({16, 1})->Unit(benchmark::kMillisecond);

void BM_FilterApply(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const FilterOperator f(Resolution::cube(n), 1.5);
  const auto eta = random_densities(f.size());
  for (auto _ : state) benchmark::DoNotOptimize(f.apply(eta));
}
BENCHMARK(BM_FilterApply)->Arg(16)->Arg(32);

void BM_OcUpdate(benchmark::State& state) {
  const Resolution r = Resolution::cube(16);
  const FilterOperator f(r, 1.5);
  const auto eta = random_densities(r.count());
  const auto d_obj = random_densities(r.count());
  const std::vector<double> d_vol(r.count(), 1.0 / static_cast<double>(r.count()));
  const double vf = projected_volume(eta, f, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(oc_update(eta, d_obj, d_vol, vf, f, 4.0));
}
BENCHMARK(BM_OcUpdate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
