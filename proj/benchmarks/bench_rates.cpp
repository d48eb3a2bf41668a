// Throughput comparison of the rate engines: the O(N^2) pairwise sum, the
// cell-list variant on sparse clouds, and field rasterization.  Numbers are
// reported, not asserted; the correctness cross-checks live in the tests.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "csl/density_grid.hpp"
#include "csl/model.hpp"
#include "csl/rate_engine.hpp"

namespace {

constexpr double r_c = 1e-5;

// Random nucleon cloud in a cube of `side` smearing lengths; branch b is
// the same cloud shifted half a smearing length.
csl::Superposition make_cloud(std::size_t n, double side) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, side * r_c);
  std::vector<csl::Particle> a;
  std::vector<csl::Particle> b;
  a.reserve(n);
  b.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const csl::Vec3 pos{u(rng), u(rng), u(rng)};
    a.push_back({{"n", 1.0}, pos});
    b.push_back({{"n", 1.0}, {pos.x + 0.5 * r_c, pos.y, pos.z}});
  }
  return csl::Superposition::equal_weights(csl::Configuration(std::move(a)),
                                           csl::Configuration(std::move(b)));
}

const csl::CollapseParams& params() {
  static const csl::CollapseParams p(csl::gamma_from_lambda(5e-9, r_c), r_c);
  return p;
}

double sparse_side(std::size_t n) {
  // ~1 particle per (4 r_c)^3, far beyond the 6 r_c cutoff scale, so the
  // cell list prunes most pairs.
  return 4.0 * std::cbrt(static_cast<double>(n));
}

}  // namespace

static void BM_gamma_exact(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const csl::Superposition sup = make_cloud(n, sparse_side(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(csl::gamma_exact(sup, params()).rate);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_gamma_exact)->RangeMultiplier(4)->Range(64, 1024)->Complexity();

static void BM_gamma_accelerated(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const csl::Superposition sup = make_cloud(n, sparse_side(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(csl::gamma_accelerated(sup, params()).rate);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_gamma_accelerated)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void BM_rasterize_density(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  // Dense cloud: grid size stays modest while the per-particle stencil work
  // dominates.
  const csl::Superposition sup = make_cloud(n, std::cbrt(static_cast<double>(n)));
  const csl::GridGeometry grid =
      csl::make_grid(sup, r_c, 0.25 * r_c, 6.0 * r_c);
  for (auto _ : state) {
    benchmark::DoNotOptimize(csl::rasterize_density(sup.comp_a(), grid, r_c));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(BM_rasterize_density)->RangeMultiplier(4)->Range(64, 1024);

BENCHMARK_MAIN();
