// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <random>

#include "surfpart/fem.hpp"
#include "surfpart/kernels.hpp"
#include "surfpart/mesh.hpp"
#include "surfpart/segregation.hpp"

using namespace surfpart;

namespace {

const TriangulatedSurface& mesh_at(int level) {
  static std::map<int, TriangulatedSurface> cache;
  auto it = cache.find(level);
  if (it == cache.end()) it = cache.emplace(level, generate_icosphere(level)).first;
  return it->second;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

template <bool Parallel>
void BM_Spmv(benchmark::State& state) {
  const auto& mesh = mesh_at(static_cast<int>(state.range(0)));
  const auto a = assemble_stiffness(mesh);
  const auto x = random_vector(a.size(), 1);
  std::vector<double> y(a.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::omp::spmv(a, x, y);
    else
      kernels::serial::spmv(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.nnz()));
}

template <bool Parallel>
void BM_Dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_vector(n, 1), y = random_vector(n, 2);
  for (auto _ : state) {
    double s = Parallel ? kernels::omp::dot(x, y) : kernels::serial::dot(x, y);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_OdeStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t m = 8;
  std::vector<std::vector<double>> u;
  for (std::size_t i = 0; i < m; ++i) u.push_back(random_vector(n, 10 + i));
  std::vector<std::span<double>> views(u.begin(), u.end());
  for (auto _ : state) {
    // A tiny factor keeps the values from collapsing across iterations.
    if constexpr (Parallel)
      kernels::omp::ode_step(views, 1e-12);
    else
      kernels::serial::ode_step(views, 1e-12);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * m));
}

template <bool Parallel>
void BM_ElementMatrices(benchmark::State& state) {
  const auto& mesh = mesh_at(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto e = Parallel ? kernels::omp::element_matrices(mesh) : kernels::serial::element_matrices(mesh);
    benchmark::DoNotOptimize(e.mass.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mesh.num_triangles()));
}

template <bool Parallel>
void BM_SplittingStep(benchmark::State& state) {
  const auto& mesh = mesh_at(static_cast<int>(state.range(0)));
  const auto ops = assemble_operators(mesh, Execution::parallel);
  auto e = random_init(mesh, ops.mass, 4, 1, 0.1, 8e-4).ensemble;
  StepOptions o;
  o.workers = Parallel ? 4 : 1;
  Stepper s(mesh, ops, e.tau, o);
  for (auto _ : state) s.step(e);
}

}  // namespace

BENCHMARK(BM_Spmv<false>)->Name("spmv/serial")->Arg(5)->Arg(6);
BENCHMARK(BM_Spmv<true>)->Name("spmv/omp")->Arg(5)->Arg(6);
BENCHMARK(BM_Dot<false>)->Name("dot/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Dot<true>)->Name("dot/omp")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_OdeStep<false>)->Name("ode_step/serial")->Arg(40962);
BENCHMARK(BM_OdeStep<true>)->Name("ode_step/omp")->Arg(40962);
BENCHMARK(BM_ElementMatrices<false>)->Name("element_matrices/serial")->Arg(5)->Arg(6);
BENCHMARK(BM_ElementMatrices<true>)->Name("element_matrices/omp")->Arg(5)->Arg(6);
BENCHMARK(BM_SplittingStep<false>)->Name("splitting_step/workers1")->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SplittingStep<true>)->Name("splitting_step/workers4")->Arg(5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
