// Coupling evaluation: serial pair tables against the OpenMP field route,
// and the field route at several thread counts.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "koopmon/backreaction.hpp"
#include "koopmon/dynamics.hpp"
#include "koopmon/sampling.hpp"

namespace {

using namespace koopmon;

ParticleEnsemble tully_ensemble(std::size_t n) {
  InitSpec s;
  s.mu_q = -1.0;
  s.mu_p = 10.0;
  s.sigma_q = sigma_q_from_momentum(10.0);
  s.n = n;
  ParticleEnsemble e = init_ensemble(s);
  // distinct density matrices so no pair is trivially zero
  for (std::size_t a = 0; a < e.size(); ++a) {
    const double th = 0.3 + 2.0 * static_cast<double>(a) / static_cast<double>(n);
    e.rho[a] = projector({cplx{std::cos(th / 2)}, std::polar(std::sin(th / 2), 0.7 * th)});
  }
  return e;
}

const KernelSpec kKernel{0.325};

void BM_KoopmonPairTables(benchmark::State& state) {
  const auto h = make_tully(TullyVariant::I);
  const ParticleEnsemble e = tully_ensemble(static_cast<std::size_t>(state.range(0)));
  const QuadratureGrid g = build_grid(e, kKernel, GridParams{});
  for (auto _ : state)
    benchmark::DoNotOptimize(koopmon_coupling_energy(e, koopmon_pairs(e, h, g, kKernel)));
}

void BM_KoopmonFields(benchmark::State& state) {
  const auto h = make_tully(TullyVariant::I);
  const ParticleEnsemble e = tully_ensemble(static_cast<std::size_t>(state.range(0)));
  const QuadratureGrid g = build_grid(e, kKernel, GridParams{});
  const int threads = static_cast<int>(state.range(1));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(threads);
  for (auto _ : state) benchmark::DoNotOptimize(koopmon_coupling(e, h, g, kKernel, false).energy);
  omp_set_num_threads(saved);
  state.counters["threads"] = threads;
}

void BM_KoopmonFieldsWithGradient(benchmark::State& state) {
  const auto h = make_tully(TullyVariant::I);
  const ParticleEnsemble e = tully_ensemble(static_cast<std::size_t>(state.range(0)));
  const QuadratureGrid g = build_grid(e, kKernel, GridParams{});
  for (auto _ : state) benchmark::DoNotOptimize(koopmon_coupling(e, h, g, kKernel, true).energy);
}

void BM_BohmionPairTables(benchmark::State& state) {
  const ParticleEnsemble e = tully_ensemble(static_cast<std::size_t>(state.range(0)));
  const GridAxis ax = build_midpoint_axis(e.q, kKernel.sigma(), 2, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(bohmion_coupling_energy(e, 2000.0, bohmion_pairs(e, ax, kKernel)));
}

void BM_BohmionFields(benchmark::State& state) {
  const ParticleEnsemble e = tully_ensemble(static_cast<std::size_t>(state.range(0)));
  const GridAxis ax = build_midpoint_axis(e.q, kKernel.sigma(), 2, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(bohmion_coupling(e, 2000.0, ax, kKernel, false).energy);
}

void BM_KoopmonStep(benchmark::State& state) {
  const auto h = make_tully(TullyVariant::I);
  const ParticleEnsemble e = tully_ensemble(static_cast<std::size_t>(state.range(0)));
  const CouplingSetup setup{kKernel, GridParams{}};
  for (auto _ : state) benchmark::DoNotOptimize(rk4_step(Method::koopmon, e, h, setup, 2.0).q[0]);
}

}  // namespace

BENCHMARK(BM_KoopmonPairTables)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KoopmonFields)
    ->ArgsProduct({{50, 100, 200}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_KoopmonFieldsWithGradient)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BohmionPairTables)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BohmionFields)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KoopmonStep)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
