#include "cvqkd/collective.hpp"
#include "cvqkd/gaussian.hpp"
#include "cvqkd/optimize.hpp"

#include <benchmark/benchmark.h>

using namespace cvqkd;

namespace {

ProtocolParams point(double V, double dV, double eta, double eps) {
  ProtocolParams p;
  p.V = V;
  p.dV = dV;
  p.eta = eta;
  p.eps = eps;
  return p;
}

void BM_SymplecticEigenvalues(benchmark::State& state) {
  const auto p = point(20.0, 1.0, 0.1, 0.05);
  const auto s = collective::build_abcfg(p, collective::PurificationModel::for_noise(p.dV, 0.9999));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian::symplectic_eigenvalues(s.cm));
}
BENCHMARK(BM_SymplecticEigenvalues);

void BM_HolevoDirect(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(collective::holevo_direct(20.0, 1.0, 0.5, 0.1, 0.1));
  }
}
BENCHMARK(BM_HolevoDirect);

void BM_HolevoPurification(benchmark::State& state) {
  const auto p = point(20.0, 1.0, 0.1, 0.05);
  const auto s = collective::build_abcfg(p, collective::PurificationModel::for_noise(p.dV, 0.9999));
  for (auto _ : state) benchmark::DoNotOptimize(collective::holevo_purification(s));
}
BENCHMARK(BM_HolevoPurification);

void BM_MaximizeRateOverT(benchmark::State& state) {
  optimize::RateModel model;
  model.attack = state.range(0) == 0 ? Attack::individual : Attack::collective;
  const auto p = point(1e5, 2.0, 0.05, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(optimize::maximize_rate_over_T(model, p));
}
BENCHMARK(BM_MaximizeRateOverT)->Arg(0)->Arg(1)->ArgName("collective");

void BM_DvMaxCollective(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize::dv_max(Attack::collective, 20.0, 0.01, 0.0, 0.0, false));
  }
}
BENCHMARK(BM_DvMaxCollective)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
