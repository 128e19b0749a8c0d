#include <benchmark/benchmark.h>

#include "soh/kinetic.hpp"
#include "soh/limit.hpp"
#include "soh/macro.hpp"
#include "soh/sphere.hpp"
#include "soh/vmf.hpp"

using namespace soh;

namespace {

const vmf::CoefficientSet& coeffs() {
  static const auto cs = vmf::assemble_coefficients(vmf::ModelParams{});
  return cs;
}

void sphere_round_trip(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  const SphereGrid grid(degree);
  SphereSpectrum spec(degree);
  for (std::size_t k = 0; k < spec.size(); ++k) spec.coeffs()[k] = 1.0 / (1.0 + k);
  for (auto _ : state) {
    auto values = grid.inverse_transform(spec);
    benchmark::DoNotOptimize(grid.transform(values));
  }
}
BENCHMARK(sphere_round_trip)->Arg(8)->Arg(12)->Arg(24);

void gci_solve(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(vmf::solve_gci(1.0, degree));
}
BENCHMARK(gci_solve)->Arg(32)->Arg(64);

void macro_step(benchmark::State& state) {
  const TorusGrid g(2, static_cast<int>(state.range(0)));
  auto s = macro::benchmark_state(g);
  macro::SolverConfig c;
  c.dt = 1e-3;
  for (auto _ : state) s = macro::step(g, s, coeffs(), c);
}
BENCHMARK(macro_step)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void kinetic_step(benchmark::State& state) {
  const TorusGrid g(2, static_cast<int>(state.range(0)));
  const kinetic::KineticModel m(g, static_cast<int>(state.range(1)), coeffs());
  auto s = limit::prepare_well_prepared_data(m, macro::benchmark_state(g), 0.1);
  kinetic::KineticConfig c;
  c.dt = 0.5 * m.stable_dt(s, c);
  for (auto _ : state) s = m.step(s, c);
}
BENCHMARK(kinetic_step)->Args({16, 8})->Args({16, 12})->Args({32, 12})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
