#include <benchmark/benchmark.h>

#include "csradar/rng.hpp"
#include "csradar/sensing.hpp"
#include "csradar/solver.hpp"

using namespace csradar;

namespace {

CVec random_vec(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  CVec v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = rng.complex_normal(1.0);
  return v;
}

SensingOperator full_scale_op() {
  const WaveformSet set = kerdock_waveforms(kerdock_family(37), 6);
  return SensingOperator(set, sample_geometry(6, 6, 1), make_grid(37, 37, 6, 6));
}

void bm_forward_fast(benchmark::State& state) {
  const SensingOperator op = full_scale_op();
  const CVec x = random_vec(op.domain_dim(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply_forward(x));
}
BENCHMARK(bm_forward_fast);

void bm_adjoint_fast(benchmark::State& state) {
  const SensingOperator op = full_scale_op();
  const CVec y = random_vec(op.range_dim(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply_adjoint(y));
}
BENCHMARK(bm_adjoint_fast);

void bm_forward_dense(benchmark::State& state) {
  const SensingOperator op = full_scale_op();
  const CMat a = dense_matrix(op);
  const CVec x = random_vec(op.domain_dim(), 2);
  CVec y;
  for (auto _ : state) {
    y = a * x;
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(bm_forward_dense);

void bm_forward_scaling(benchmark::State& state) {
  const int ns = static_cast<int>(state.range(0));
  Rng rng(100 + ns);
  CMat col(ns, 1);
  for (int l = 0; l < ns; ++l) col(l, 0) = rng.complex_normal(1.0);
  const SensingOperator op(external_waveforms(col), sample_geometry(1, 1, ns),
                           make_grid(ns, 4, 1, 1));
  const CVec x = random_vec(op.domain_dim(), ns);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply_forward(x));
  state.SetComplexityN(ns);
}
BENCHMARK(bm_forward_scaling)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void bm_lasso_solve(benchmark::State& state) {
  const WaveformSet set = kerdock_waveforms(kerdock_family(13), 2);
  const SensingOperator op(set, sample_geometry(2, 4, 5), make_grid(13, 13, 4, 2));
  CVec x = CVec::Zero(op.domain_dim());
  x(17) = 1.0;
  x(301) = cx{0.0, 1.5};
  const Measurement m = add_noise(op.apply_forward(x), 20.0, 9);
  LassoConfig cfg;
  cfg.lambda = default_lambda(m.sigma, op.grid());
  for (auto _ : state) benchmark::DoNotOptimize(debiased_lasso(op, m.y, cfg));
}
BENCHMARK(bm_lasso_solve);

}  // namespace

BENCHMARK_MAIN();
