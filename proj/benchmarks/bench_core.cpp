// Microbenchmarks for the numerical kernels on desk-scale problems: the
// stiffness action and solve, the scalar fibering solve, inner products, and
// the small weighted eigensolve that every hypothesis audit starts with.

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "nehari/grid.hpp"
#include "nehari/nonlinearity.hpp"
#include "nehari/rng.hpp"
#include "nehari/spectrum.hpp"
#include "nehari/variational.hpp"

using namespace nehari;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::shared_ptr<const Grid> grid_1d(int n) {
  return std::make_shared<Grid>(Grid::interval(kPi, n));
}

std::shared_ptr<const Grid> grid_3d(int n) {
  return std::make_shared<Grid>(Grid::box(kPi, kPi, kPi, n, n, n));
}

Field random_field(std::shared_ptr<const Grid> grid, std::uint64_t seed) {
  Field u(std::move(grid));
  SplitRng rng(seed);
  for (double& v : u.values()) v = rng.normal();
  return u;
}

EnergyModel benchmark_model(int n) {
  return EnergyModel(grid_1d(n),
                     std::make_shared<SmoothSaturation>(Weight(0.0), Weight(2.0)));
}

void BM_StiffnessApply1D(benchmark::State& state) {
  const auto g = grid_1d(static_cast<int>(state.range(0)));
  const Field u = random_field(g, 1);
  std::vector<double> out(u.size());
  for (auto _ : state) {
    apply_stiffness(*g, u.values().data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(u.size()));
}
BENCHMARK(BM_StiffnessApply1D)->Arg(511)->Arg(4095);

void BM_StiffnessSolve3D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = grid_3d(n);
  const StiffnessSolver solver(g);
  const Field rhs = random_field(g, 2);
  std::vector<double> x(rhs.size());
  for (auto _ : state) {
    solver.solve(rhs.values().data(), x.data());
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_StiffnessSolve3D)->Arg(9)->Arg(17);

void BM_H10Inner(benchmark::State& state) {
  const auto g = grid_1d(static_cast<int>(state.range(0)));
  const Field u = random_field(g, 3);
  const Field v = random_field(g, 4);
  for (auto _ : state) benchmark::DoNotOptimize(h10_inner(u, v));
}
BENCHMARK(BM_H10Inner)->Arg(511)->Arg(4095);

void BM_Fibering(benchmark::State& state) {
  const EnergyModel model = benchmark_model(static_cast<int>(state.range(0)));
  const SpectrumResult spec = weighted_eigs(model.grid_ptr(), Weight(2.0), 1);
  const Field& e1 = spec.pairs.front().e;
  for (auto _ : state) benchmark::DoNotOptimize(model.fibering(e1).t);
}
BENCHMARK(BM_Fibering)->Arg(511)->Arg(2047);

void BM_EnergyGradient(benchmark::State& state) {
  const EnergyModel model = benchmark_model(static_cast<int>(state.range(0)));
  const SpectrumResult spec = weighted_eigs(model.grid_ptr(), Weight(2.0), 1);
  const Field& e1 = spec.pairs.front().e;
  for (auto _ : state) benchmark::DoNotOptimize(model.energy_gradient(e1));
}
BENCHMARK(BM_EnergyGradient)->Arg(511)->Arg(2047);

void BM_WeightedEigs1D(benchmark::State& state) {
  const auto g = grid_1d(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const SpectrumResult s = weighted_eigs(g, Weight(2.0), 3);
    benchmark::DoNotOptimize(s.pairs.front().lambda);
  }
}
BENCHMARK(BM_WeightedEigs1D)->Arg(255)->Arg(1023);

}  // namespace

BENCHMARK_MAIN();
