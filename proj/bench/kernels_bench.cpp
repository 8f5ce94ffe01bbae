// Serial reference vs OpenMP kernels, plus the FFT-bound pieces of one
// descent iteration.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "gpduo/kernels.hpp"
#include "gpduo/spectral.hpp"

namespace {

struct Fixture {
  std::size_t n;
  std::vector<double> u1, u2, v1, v2, out;
  explicit Fixture(std::size_t n_) : n(n_), u1(n * n), u2(n * n), v1(n * n), v2(n * n), out(n * n) {
    for (std::size_t k = 0; k < n * n; ++k) {
      const double x = static_cast<double>(k / n) / n - 0.5;
      const double y = static_cast<double>(k % n) / n - 0.5;
      u1[k] = std::exp(-20 * (x * x + y * y));
      u2[k] = std::exp(-25 * (x * x + y * y));
      v1[k] = x * x + y * y;
      v2[k] = 2 * v1[k];
    }
  }
};

void BM_DensitiesSerial(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(gpduo::kernels::serial::densities(f.u1, f.u2, f.v1, f.v2, f.n));
}
void BM_DensitiesParallel(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(gpduo::kernels::densities(f.u1, f.u2, f.v1, f.v2, f.n));
}
void BM_HamiltonianSerial(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    gpduo::kernels::serial::apply_hamiltonian(f.v1, f.u1, f.u2, f.v2, 1.5, 0.7, f.out, f.n);
    benchmark::DoNotOptimize(f.out.data());
  }
}
void BM_HamiltonianParallel(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    gpduo::kernels::apply_hamiltonian(f.v1, f.u1, f.u2, f.v2, 1.5, 0.7, f.out, f.n);
    benchmark::DoNotOptimize(f.out.data());
  }
}
void BM_DotSerial(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gpduo::kernels::serial::dot(f.u1, f.u2, f.n));
}
void BM_DotParallel(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gpduo::kernels::dot(f.u1, f.u2, f.n));
}
void BM_NegLaplacian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Fixture f(n);
  gpduo::Spectral sp(gpduo::Grid2D::make(n, 8.0));
  for (auto _ : state) {
    sp.neg_laplacian(f.u1, f.out);
    benchmark::DoNotOptimize(f.out.data());
  }
}

BENCHMARK(BM_DensitiesSerial)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(BM_DensitiesParallel)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(BM_HamiltonianSerial)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(BM_HamiltonianParallel)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(BM_DotSerial)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(BM_DotParallel)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(BM_NegLaplacian)->Arg(256)->Arg(512)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
