#include <benchmark/benchmark.h>

#include "rkwf/init.hpp"
#include "rkwf/losses.hpp"
#include "rkwf/solver.hpp"

namespace {

using namespace rkwf;

ProblemInstance make(bool cdp, Eigen::Index n, int ratio) {
  Rng rng(7);
  ComplexVector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.complex_normal();
  auto op = cdp ? sample_cdp(n, ratio, rng) : sample_gaussian(ratio * n, n, rng);
  RealVector y = forward_intensity(op, x);
  return {std::move(op), std::move(y), x, {cdp ? ModelKind::Cdp : ModelKind::Gaussian, {}, 7}};
}

void BM_RkldGradient(benchmark::State& state) {
  const auto p = make(false, state.range(0), 8);
  Rng rng(1);
  ComplexVector z(p.op.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.complex_normal();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_loss(LossKind::rkld(), z, p.op, p.y));
}
BENCHMARK(BM_RkldGradient)->Arg(64)->Arg(128)->Arg(256);

void BM_CdpApply(benchmark::State& state) {
  const auto p = make(true, state.range(0), 8);
  for (auto _ : state) benchmark::DoNotOptimize(p.op.adjoint_apply(p.op.apply(*p.x_true)));
}
BENCHMARK(BM_CdpApply)->Arg(256)->Arg(1024)->Arg(4096);

void BM_SpectralInit(benchmark::State& state) {
  const auto p = make(false, state.range(0), 8);
  for (auto _ : state) {
    Rng rng(3);
    benchmark::DoNotOptimize(spectral_estimate(rkld_weights(p.y, p.op), p.op, p.y, rng));
  }
}
BENCHMARK(BM_SpectralInit)->Arg(64)->Arg(128);

void BM_SolverIterations(benchmark::State& state) {
  const auto p = make(false, 128, static_cast<int>(state.range(0)));
  SolverConfig c = preset("rkld-gtwf");
  c.init = InitKind::Provided;
  c.z0 = *p.x_true * Complex(0.9, 0.1);
  c.max_iters = 50;
  for (auto _ : state) benchmark::DoNotOptimize(run(p, c));
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_SolverIterations)->Arg(8)->Arg(16);

}  // namespace
BENCHMARK_MAIN();
