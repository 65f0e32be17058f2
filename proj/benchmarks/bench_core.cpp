#include <benchmark/benchmark.h>

#include <memory>

#include "eigencollide/collision.hpp"
#include "eigencollide/field.hpp"
#include "eigencollide/spectral.hpp"
#include "eigencollide/strata.hpp"

namespace ec = eigencollide;

namespace {

void bm_covariance_factor(benchmark::State& state) {
  const auto kernel = ec::CovarianceKernel::isotropic_fbm(0.4, 1);
  const auto grid = ec::GridSpec::uniform(1.0, 2.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    ec::CovarianceFactor f(kernel, grid);
    benchmark::DoNotOptimize(f.chol().data());
  }
}
BENCHMARK(bm_covariance_factor)->Arg(256)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void bm_field_draw(benchmark::State& state) {
  const auto kernel = ec::CovarianceKernel::isotropic_fbm(0.4, 1);
  const auto grid = ec::GridSpec::uniform(1.0, 2.0, static_cast<std::size_t>(state.range(0)));
  const ec::CovarianceFactor f(kernel, grid);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto s = ec::sample_field(f, seed++);
    benchmark::DoNotOptimize(s.values.data());
  }
}
BENCHMARK(bm_field_draw)->Arg(1024)->Arg(2048)->Unit(benchmark::kMicrosecond);

void bm_jacobi_eigs(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  ec::RandomStream rng(5);
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) m(i, j) = m(j, i) = rng.normal();
  for (auto _ : state) {
    auto e = ec::jacobi_eigs<double>(m, false);
    benchmark::DoNotOptimize(e.values.data());
  }
}
BENCHMARK(bm_jacobi_eigs)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void bm_detect_collision(benchmark::State& state) {
  ec::ProcessConfig cfg;
  cfg.beta = 1;
  cfg.d = 2;
  cfg.kernel = ec::CovarianceKernel::isotropic_fbm(0.4, 1);
  cfg.grid = ec::GridSpec::uniform(1.0, 2.0, 1024);
  auto factor = std::make_shared<const ec::CovarianceFactor>(cfg.kernel, cfg.grid);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    ec::ProcessConfig pc = cfg;
    pc.seed = seed++;
    ec::GaussianPathSource src(pc, factor);
    auto rec = ec::detect_collision(src, 2, {1e-2, 1e-3, 1e-4}, 4);
    benchmark::DoNotOptimize(rec.min_gap);
  }
}
BENCHMARK(bm_detect_collision)->Unit(benchmark::kMillisecond);

void bm_tangent_rank(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto p = ec::random_stratum_point(d, 2, 2, -2.0, 2.0, 0.3, 9);
  for (auto _ : state) benchmark::DoNotOptimize(ec::tangent_rank(p));
}
BENCHMARK(bm_tangent_rank)->Arg(4)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
