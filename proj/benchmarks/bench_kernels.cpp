#include <benchmark/benchmark.h>

#include "dk/darwin.hpp"
#include "dk/dvm.hpp"
#include "dk/rvm.hpp"

namespace {

dk::InitialProfile standard_profile() {
  dk::InitialProfile p;
  p.amplitude = 5.0;
  p.radius_x = 1.0;
  p.radius_v = 0.6;
  p.center_v = {0.0, 0.0, 0.4};
  return p;
}

void bm_pairwise_field(benchmark::State& state) {
  const auto n = (int)state.range(0);
  dk::VPState s = dk::make_vp_state(standard_profile(), n, {0.2}, 4e-3, false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dk::field_e0(s, {0.3, 0.1, -0.2}));
  }
  state.SetComplexityN((long)s.e.size());
}
BENCHMARK(bm_pairwise_field)->Arg(3)->Arg(4)->Arg(6)->Complexity();

void bm_vp_step(benchmark::State& state) {
  dk::VPState s = dk::make_vp_state(standard_profile(), (int)state.range(0), {0.2}, 4e-3, false);
  for (auto _ : state) dk::step_vp(s, 4e-3);
}
BENCHMARK(bm_vp_step)->Arg(3)->Arg(4);

void bm_dvm_fixed_point(benchmark::State& state) {
  dk::DVMState s = dk::make_dvm_state(standard_profile(), (int)state.range(0), {0.2}, 4.0, 4e-3);
  for (auto _ : state) {
    std::vector<dk::Vec3> E = s.Estar, B = s.Bstar;
    benchmark::DoNotOptimize(dk::solve_fields_fixed_point(s.e, 1e-12, 64, E, B));
  }
}
BENCHMARK(bm_dvm_fixed_point)->Arg(3)->Arg(4);

void bm_rvm_field(benchmark::State& state) {
  dk::LVPState ic = dk::make_lvp_state(standard_profile(), (int)state.range(0), {0.2}, 4e-3);
  dk::RVMState s = dk::make_rvm_state(ic, 4.0, 4e-3);
  for (int k = 0; k < 8; ++k) dk::step_rvm(s, 4e-3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dk::fields_gs(s, {0.3, 0.1, -0.2}, s.e.t));
  }
}
BENCHMARK(bm_rvm_field)->Arg(3)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
