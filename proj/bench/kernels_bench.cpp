// Serial reference against the OpenMP kernels on grid-sized atom sets.

#include <map>
#include <random>

#include <benchmark/benchmark.h>

#include "cvr/free_sets.hpp"
#include "cvr/kernels.hpp"

using namespace cvr;

namespace {

struct Fixture {
  std::vector<cplx> points;
  CMatrix atoms, w;
  CVector v;
  RVector c;
};

const Fixture& fixture(int dim) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(dim);
  if (it != cache.end()) return it->second;
  Fixture f;
  CoherentGrid g;
  g.radius = 6.0;
  f.points = g.points();
  f.atoms = kernels::coherent_columns(f.points, dim, kernels::Exec::Serial);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  CMatrix b(dim, 4);
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = cplx(n(rng), n(rng));
  f.w = b * b.adjoint();
  f.v = b.col(0).normalized();
  f.c = RVector::Zero(f.atoms.cols());
  for (Eigen::Index j = 0; j < f.c.size(); j += 7) f.c(j) = std::abs(n(rng));
  return cache.emplace(dim, std::move(f)).first->second;
}

kernels::Exec exec_of(const benchmark::State& s) { return s.range(1) ? kernels::Exec::Parallel : kernels::Exec::Serial; }

void label(benchmark::State& s) {
  s.SetLabel(s.range(1) ? "parallel" : "serial");
  s.counters["atoms"] = static_cast<double>(fixture(static_cast<int>(s.range(0))).atoms.cols());
}

void BM_coherent_columns(benchmark::State& s) {
  const Fixture& f = fixture(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::coherent_columns(f.points, static_cast<int>(s.range(0)), exec_of(s)));
  label(s);
}

void BM_quadratic_forms(benchmark::State& s) {
  const Fixture& f = fixture(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::quadratic_forms(f.w, f.atoms, exec_of(s)));
  label(s);
}

void BM_overlaps(benchmark::State& s) {
  const Fixture& f = fixture(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::overlaps_abs2(f.v, f.atoms, exec_of(s)));
  label(s);
}

void BM_weighted_gram(benchmark::State& s) {
  const Fixture& f = fixture(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::weighted_gram(f.atoms, f.c, exec_of(s)));
  label(s);
}

void args(benchmark::internal::Benchmark* b) {
  for (int dim : {20, 40, 80})
    for (int par : {0, 1}) b->Args({dim, par});
  b->Unit(benchmark::kMicrosecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_coherent_columns)->Apply(args);
BENCHMARK(BM_quadratic_forms)->Apply(args);
BENCHMARK(BM_overlaps)->Apply(args);
BENCHMARK(BM_weighted_gram)->Apply(args);

BENCHMARK_MAIN();
