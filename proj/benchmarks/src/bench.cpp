#include <benchmark/benchmark.h>

#include <orbistab/certify.hpp>
#include <orbistab/closed_loop.hpp>
#include <orbistab/quadrature.hpp>

#include <cmath>

using namespace orbistab;

namespace {

MechanicalSystem furuta() {
  return furuta_system(0.0679, 0.14, 0.235, 0.0012, 0.0024);
}

const SynthesisProfile& profile() {
  static const SynthesisProfile p = [] {
    const MechanicalSystem sys = furuta();
    return make_profile(sys, furuta_generator(sys.params.at("a1"), 5.0),
                        furuta_s(0.0012, 5.0), 5.0, 5.0, {-1.4, 1.4});
  }();
  return p;
}

}  // namespace

static void BM_ElDynamics(benchmark::State& state) {
  const MechanicalSystem sys = furuta();
  const State4 x{0.3, 0.4, 0.5, -0.2};
  for (auto _ : state)
    benchmark::DoNotOptimize(eval_el_dynamics(sys, x, 0.1));
}
BENCHMARK(BM_ElDynamics);

static void BM_ControlLaw(benchmark::State& state) {
  const SynthesisProfile& p = profile();
  const State4 x{0.3, 0.4, 0.5, -0.2};
  for (auto _ : state) benchmark::DoNotOptimize(control_u(p, x));
}
BENCHMARK(BM_ControlLaw);

// full synthesis, dominated by the two cumulative quadrature tables
static void BM_ProfileBuild(benchmark::State& state) {
  const MechanicalSystem sys = furuta();
  const double a1 = sys.params.at("a1");
  for (auto _ : state) {
    SynthesisProfile p =
        make_profile(sys, furuta_generator(a1, 5.0), furuta_s(0.0012, 5.0),
                     5.0, 5.0, {-1.4, 1.4}, (std::size_t)state.range(0));
    benchmark::DoNotOptimize(p.mass(1.0));
  }
}
BENCHMARK(BM_ProfileBuild)->Arg(1024)->Arg(4096);

static void BM_QuadratureTable(benchmark::State& state) {
  const auto f = [](double x) { return std::exp(-x * x) * std::cos(3.0 * x); };
  for (auto _ : state) {
    CumulativeIntegral tbl(f, 0.0, {-1.4, 1.4}, (std::size_t)state.range(0),
                           1e-12);
    benchmark::DoNotOptimize(tbl.value(1.0));
  }
}
BENCHMARK(BM_QuadratureTable)->Arg(1024)->Arg(4096);

// one second of closed loop at the default adaptive tolerance
static void BM_SimulateSecond(benchmark::State& state) {
  const SynthesisProfile& p = profile();
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  const State4 x0{M_PI / 9.0, 0.6, 0.0, 0.0};
  for (auto _ : state) {
    const Trajectory traj = simulate_closed_loop(p, x0, cfg);
    benchmark::DoNotOptimize(traj.path.x.back());
  }
}
BENCHMARK(BM_SimulateSecond);

static void BM_InvarianceScan(benchmark::State& state) {
  const SynthesisProfile& p = profile();
  for (auto _ : state) {
    const InvarianceScan scan =
        invariance_residual(p, {-1.3, 1.3}, 3.0, 48, 33);
    benchmark::DoNotOptimize(scan.max_scaled);
  }
}
BENCHMARK(BM_InvarianceScan);

BENCHMARK_MAIN();
