#include <benchmark/benchmark.h>

#include "generators.hpp"

using namespace treeshift;

namespace {

void BM_CheckStieltjes(benchmark::State& state) {
  testing::Rng rng(1);
  MomentSequence seq = moments_of(testing::random_measure(rng, 6, 0.1, 10.0), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(check_stieltjes(seq));
}
BENCHMARK(BM_CheckStieltjes)->Arg(8)->Arg(16)->Arg(32);

void BM_QuadratureWide(benchmark::State& state) {
  testing::Rng rng(2);
  int k = static_cast<int>(state.range(0));
  WideMoments m = wide_moments_of(testing::random_measure(rng, k, 0.1, 10.0), 2 * k - 1);
  for (auto _ : state) benchmark::DoNotOptimize(quadrature_from_moments(m));
}
BENCHMARK(BM_QuadratureWide)->DenseRange(2, 6, 2);

void BM_QuadratureDouble(benchmark::State& state) {
  testing::Rng rng(2);
  int k = static_cast<int>(state.range(0));
  MomentSequence m = moments_of(testing::random_measure(rng, k, 0.1, 10.0), 2 * k - 1);
  for (auto _ : state) benchmark::DoNotOptimize(quadrature_from_moments(m));
}
BENCHMARK(BM_QuadratureDouble)->DenseRange(2, 6, 2);

void BM_RandomSystem(benchmark::State& state) {
  testing::Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(testing::random_system(rng));
}
BENCHMARK(BM_RandomSystem);

void BM_CertifySubnormal(benchmark::State& state) {
  testing::Rng rng(4);
  testing::RandomSystem rs = testing::random_system(rng);
  for (auto _ : state) benchmark::DoNotOptimize(certify_subnormal(rs.shift, rs.system, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CertifySubnormal)->Arg(4)->Arg(8);

void BM_Truncate(benchmark::State& state) {
  testing::Rng rng(5);
  testing::RandomSystem rs = testing::random_system(rng);
  for (auto _ : state) {
    TruncationEntry e = truncate(rs.system, rs.shift, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(verify_truncated_consistency(e));
  }
}
BENCHMARK(BM_Truncate)->Arg(2)->Arg(16);

void BM_CertifyTEtaKappa(benchmark::State& state) {
  BranchData d;
  d.eta = 2;
  d.kappa = 0;
  d.branch_measures = {AtomicMeasure::dirac(1.0), AtomicMeasure::dirac(2.0)};
  d.entry_weights = {std::sqrt(0.5), std::sqrt(0.5)};
  for (auto _ : state) benchmark::DoNotOptimize(certify_t_eta_kappa(d, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CertifyTEtaKappa)->Arg(8)->Arg(16);

void BM_InnerProduct(benchmark::State& state) {
  testing::Rng rng(6);
  DirectedTree t = testing::random_tree(rng);
  WeightedShift s(t, testing::random_weights(rng, t));
  for (auto _ : state)
    for (Vertex u = 0; u < t.size(); ++u) benchmark::DoNotOptimize(inner_product_powers(s, 0, 3, u, 2));
}
BENCHMARK(BM_InnerProduct);

}  // namespace

BENCHMARK_MAIN();
