// Serial reference versus OpenMP for the three hot loops.
#include <benchmark/benchmark.h>

#include "dpcollapse/dissipative.hpp"
#include "dpcollapse/master_equation.hpp"
#include "dpcollapse/sse.hpp"

using namespace dpcollapse;

namespace {

ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(0) == 0 ? ExecPolicy::serial : ExecPolicy::parallel;
}

void BM_MasterEquationStep(benchmark::State& state) {
  const Grid1D g{256, 0.25, -32.0};
  const auto kernel = DecoherenceKernel::scaled(ModelKind::dp);
  const auto D = build_decoherence_matrix(kernel, g);
  auto rho = pure_state(g, gaussian_packet(g, -4, 1) + gaussian_packet(g, 4, 1), 4.0);
  const MasterEquationStepper stepper(D, g, {4.0, true}, 1e-3, policy_of(state));
  for (auto _ : state) {
    stepper.step(rho);
    benchmark::DoNotOptimize(rho.rho.data());
  }
}

void BM_SseEnsemble(benchmark::State& state) {
  const Grid1D g{16, 0.5, -4.0};
  const auto noise = build_noise_covariance(DecoherenceKernel::scaled(ModelKind::csl), g);
  CVector psi = CVector::Zero(16);
  psi[3] = psi[12] = std::sqrt(0.5);
  const WaveFunctionLattice psi0{g, psi, 4.0};
  for (auto _ : state) {
    auto res = run_ensemble(psi0, noise, {4.0, true}, {0.2, 1e-3, 256, 1, policy_of(state)});
    benchmark::DoNotOptimize(res.mean_rho.rho.data());
  }
}

void BM_DissipativeEnsemble(benchmark::State& state) {
  const DissipativeKernel kernel(1.0, 1.0);
  const KickSampler sampler(kernel);
  const auto ens = maxwell_ensemble(4096, 1.0, 0.5, 3);
  const auto cps = log_checkpoints(20.0);
  for (auto _ : state) {
    auto res = evolve_ensemble(ens, sampler, 20.0, 4, cps, policy_of(state));
    benchmark::DoNotOptimize(res.series.mean_energy.data());
  }
}

}  // namespace

BENCHMARK(BM_MasterEquationStep)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SseEnsemble)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DissipativeEnsemble)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
