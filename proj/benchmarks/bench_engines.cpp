#include <benchmark/benchmark.h>

#include "floquet_pt/analysis.hpp"
#include "floquet_pt/bloch.hpp"
#include "floquet_pt/monodromy.hpp"

using namespace fpt;

namespace {

OperatorSpec cosine_quartic(double a) {
  FourierMatrixSeries p2;
  p2.order = 2;
  p2.harmonics[1] = RealMatrix::Constant(1, 1, a);
  p2.harmonics[-1] = RealMatrix::Constant(1, 1, a);
  return build_spec(4, 1, std::vector<FourierMatrixSeries>{p2}, 1.0);
}

OperatorSpec two_level_cubic() {
  FourierMatrixSeries p2;
  p2.order = 2;
  RealMatrix C(2, 2), X(2, 2);
  C << 0, 0, 0, 2;
  X << 0, 0.5, 0.5, 0;
  p2.harmonics[0] = C;
  p2.harmonics[1] = X;
  p2.harmonics[-1] = X;
  return build_spec(3, 2, std::vector<FourierMatrixSeries>{p2}, 1.0);
}

void BM_GalerkinSpectrum(benchmark::State& state) {
  const auto spec = two_level_cubic();
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(galerkin_spectrum(spec, 0.7, K));
  state.SetLabel("dim " + std::to_string(2 * (2 * K + 1)));
}
BENCHMARK(BM_GalerkinSpectrum)->Arg(12)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_BlochCertified(benchmark::State& state) {
  const auto spec = two_level_cubic();
  GalerkinConfig cfg;
  cfg.K = 48;
  for (auto _ : state) benchmark::DoNotOptimize(bloch_eigenvalues(spec, 0.7, cfg, SpectralDisk{{0.0, 0.0}, 5e4}));
}
BENCHMARK(BM_BlochCertified)->Unit(benchmark::kMillisecond);

void BM_FundamentalMatrix(benchmark::State& state) {
  const auto spec = two_level_cubic();
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fundamental_matrix(spec, lambda));
}
BENCHMARK(BM_FundamentalMatrix)->Arg(10)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_CharDet(benchmark::State& state) {
  const auto spec = cosine_quartic(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(char_det(spec, 5000.0, 1.1));
}
BENCHMARK(BM_CharDet)->Unit(benchmark::kMillisecond);

void BM_ScanGalerkin(benchmark::State& state) {
  const auto spec = cosine_quartic(0.5);
  const double top = std::pow(12 * kPi, 4);
  for (auto _ : state) benchmark::DoNotOptimize(scan_real_axis(spec, 50.0, top, 1e-6));
}
BENCHMARK(BM_ScanGalerkin)->Unit(benchmark::kMillisecond);

void BM_ScanMonodromy(benchmark::State& state) {
  const auto spec = cosine_quartic(1.0);
  AnalysisConfig cfg;
  cfg.engine = Engine::Monodromy;
  for (auto _ : state) benchmark::DoNotOptimize(scan_real_axis(spec, 50.0, 550.0, 0.5, cfg));
}
BENCHMARK(BM_ScanMonodromy)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
