#include <benchmark/benchmark.h>

#include <optional>
#include <random>

#include "uwr/ppxa.hpp"
#include "uwr/prox.hpp"
#include "uwr/sense.hpp"
#include "uwr/simulator.hpp"
#include "uwr/wavelet.hpp"

namespace {

using namespace uwr;

ComplexVolume noise_volume(Dims d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexVolume v(d);
  for (auto& x : v.values()) x = {g(rng), g(rng)};
  return v;
}

Dims cube(std::int64_t n) {
  const auto s = static_cast<std::size_t>(n);
  return {s, s, s};
}

void BM_WaveletForward(benchmark::State& state) {
  const auto v = noise_volume(cube(state.range(0)), 1);
  const auto spec = WaveletSpec::symmlet8(3);
  for (auto _ : state) benchmark::DoNotOptimize(forward(v, spec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}
BENCHMARK(BM_WaveletForward)->Arg(16)->Arg(32)->Arg(64);

void BM_WaveletInverse(benchmark::State& state) {
  const auto spec = WaveletSpec::symmlet8(3);
  const auto c = forward(noise_volume(cube(state.range(0)), 2), spec);
  for (auto _ : state) benchmark::DoNotOptimize(inverse(c, spec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.size()));
}
BENCHMARK(BM_WaveletInverse)->Arg(16)->Arg(32)->Arg(64);

void BM_ProxGglField(benchmark::State& state) {
  const auto spec = WaveletSpec::symmlet8(3);
  const auto c = forward(noise_volume(cube(32), 3), spec);
  const std::vector<GGLParams> params(c.layout().subband_count(), GGLParams{{0.1, 0.5, 0.2}, {0.0, 0.5, 0.2}});
  for (auto _ : state) {
    auto f = c;
    prox_ggl(f, params, 1.0);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_ProxGglField);

void BM_ProxLpScalar(benchmark::State& state) {
  const double p = static_cast<double>(state.range(0)) / 10.0;
  cplx v(1.3, -0.4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox_lp_scalar(v, 0.7, p, 1.1));
    v += cplx(1e-9, 0.0);
  }
}
BENCHMARK(BM_ProxLpScalar)->Arg(10)->Arg(15)->Arg(20)->Arg(37);

void BM_TemporalPair(benchmark::State& state) {
  const auto spec = WaveletSpec::symmlet8(3);
  const auto a = forward(noise_volume(cube(32), 4), spec);
  const auto b = forward(noise_volume(cube(32), 5), spec);
  for (auto _ : state) benchmark::DoNotOptimize(prox_temporal_pair(a, b, {0.3, 1.6}, 1.0, spec));
}
BENCHMARK(BM_TemporalPair);

struct Desk {
  VolumeSeries truth;
  CoilDataset data;
  std::optional<EncodingOperator> enc;
  std::optional<NoiseCovariance> psi;
};

Desk make_desk(std::size_t frames) {
  const Dims d{32, 32, 16};
  AcquisitionSpec acq;
  acq.coils = 8;
  acq.reduction = 2;
  acq.frames = frames;
  acq.seed = 1;
  acq.noise_cov = correlated_noise_cov(8, 20.0);
  acq.temporal.drift_linear = 0.01;
  acq.temporal.activation_amplitude = 30.0;
  const auto maps = make_coils(d, 8, 1, 2);
  Desk k;
  k.truth = make_series(make_phantom(brain_phantom(d)), acq);
  k.data = acquire(k.truth, SensitivitySet(maps), acq);
  k.enc.emplace(estimate_sensitivities(reference_scan(maps)), k.data.geometry());
  k.psi.emplace(estimate_noise_cov(noise_scan(acq, 4096)));
  return k;
}

void BM_SenseWls(benchmark::State& state) {
  const auto k = make_desk(4);
  for (auto _ : state) benchmark::DoNotOptimize(sense_wls(k.data, *k.enc, *k.psi));
}
BENCHMARK(BM_SenseWls)->Unit(benchmark::kMillisecond);

// Fixed iteration count, so the time is per-iteration cost times 20.
void BM_Ppxa4d(benchmark::State& state) {
  const auto k = make_desk(static_cast<std::size_t>(state.range(0)));
  const auto spec = WaveletSpec::symmlet8(3);
  const VolumeSeries init = sense_wls(k.data, *k.enc, *k.psi);
  auto params = RegularizationParams::none(CoeffLayout(init.dims(), 3));
  for (auto& s : params.spatial) s = {{0.0, 0.02, 1e-4}, {0.0, 0.02, 1e-4}};
  params.temporal = {1e-4, 1.5};
  SolverConfig cfg;
  cfg.max_iters = 20;
  cfg.epsilon = 1e-12;
  for (auto _ : state) benchmark::DoNotOptimize(solve_4d(k.data, *k.enc, *k.psi, params, cfg, init, spec));
}
BENCHMARK(BM_Ppxa4d)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
