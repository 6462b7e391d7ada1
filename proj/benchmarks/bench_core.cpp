#include <benchmark/benchmark.h>

#include "pdmicro/classical.hpp"
#include "pdmicro/detector.hpp"
#include "pdmicro/green.hpp"
#include "pdmicro/specfun.hpp"
#include "pdmicro/spectro.hpp"
#include "pdmicro/units.hpp"

namespace {

using namespace pdm;

const FieldScales kScales = make_scales(400.0);
const double kE = convert_energy(200.0, "ueV", "J");

void BM_Airy(benchmark::State& state) {
  double x = -30.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(airy(x));
    x = x > 8.0 ? -30.0 : x + 0.37;
  }
}
BENCHMARK(BM_Airy);

void BM_AiryOracle(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(airy_oracle(-7.3));
}
BENCHMARK(BM_AiryOracle)->Unit(benchmark::kMicrosecond);

void BM_GreenClosedForm(benchmark::State& state) {
  const SpacePoint p{4e-4, -0.5, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(green_energy(p, {}, kE, kScales));
}
BENCHMARK(BM_GreenClosedForm);

void BM_GreenOracle(benchmark::State& state) {
  const SpacePoint p{4e-4, -0.5, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(green_energy_quad(p, {}, kE, kScales));
}
BENCHMARK(BM_GreenOracle)->Unit(benchmark::kMillisecond);

void BM_Trajectories(benchmark::State& state) {
  const SpacePoint p{4e-4, -0.5, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(find_trajectories(p, kE, kScales));
}
BENCHMARK(BM_Trajectories)->Unit(benchmark::kMicrosecond);

void BM_RadialProfile(benchmark::State& state) {
  const DetectorPlane plane{0.5, 1.0, 16};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        radial_profile(kE, SourceModel{}, kScales, plane, static_cast<int>(state.range(0)), 1));
  }
}
BENCHMARK(BM_RadialProfile)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_Map(benchmark::State& state) {
  const DetectorPlane plane{0.5, 1.2e-3, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(map_plane(kE, SourceModel{}, kScales, plane, 1));
}
BENCHMARK(BM_Map)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ExtractEnergy(benchmark::State& state) {
  const RadialProfile p = radial_profile(kE, SourceModel{}, kScales, DetectorPlane{0.5, 1.0, 16}, 512, 1);
  for (auto _ : state) benchmark::DoNotOptimize(extract_energy(p, kScales, 0.5, 1));
}
BENCHMARK(BM_ExtractEnergy)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
