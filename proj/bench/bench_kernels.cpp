// Serial reference kernels against their OpenMP counterparts on the
// product enumerations behind TRO closure and linking-algebra spans.

#include <benchmark/benchmark.h>

#include <vector>

#include "trolink/gen.hpp"
#include "trolink/kernels.hpp"
#include "trolink/ratio_ascent.hpp"

namespace {

using namespace trolink;

std::vector<ComplexMatrix> gaussians(Index count, Index rows, Index cols) {
  Rng rng(42);
  std::vector<ComplexMatrix> out;
  for (Index i = 0; i < count; ++i) out.push_back(random_gaussian(rows, cols, rng));
  return out;
}

template <auto Kernel>
void ternary(benchmark::State& state) {
  const Index d = state.range(0);
  const auto el = gaussians(d * d, d, d);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(el, el, el));
  state.SetItemsProcessed(state.iterations() * d * d * d * d * d * d);
}

template <auto Kernel>
void pairs(benchmark::State& state) {
  const Index d = state.range(0);
  const auto el = gaussians(2 * d * d, 2 * d, 2 * d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        Kernel(el, kernels::Op::plain, el, kernels::Op::adjoint));
  }
}

template <auto Kernel>
void residuals(benchmark::State& state) {
  const Index d = state.range(0);
  const auto basis = gen::full_space(d, d).columns().leftCols(d * d / 2).eval();
  Rng rng(7);
  const ComplexMatrix cand = random_gaussian(d * d, d * d * d * d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(basis, cand));
}

template <auto Kernel>
void commutant(benchmark::State& state) {
  const Index d = state.range(0);
  const auto gens = gaussians(d, d, d);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(d, gens));
}

BENCHMARK(ternary<kernels::serial::ternary_products>)->DenseRange(2, 4);
BENCHMARK(ternary<kernels::parallel::ternary_products>)->DenseRange(2, 4);
BENCHMARK(pairs<kernels::serial::pair_products>)->DenseRange(2, 4);
BENCHMARK(pairs<kernels::parallel::pair_products>)->DenseRange(2, 4);
BENCHMARK(residuals<kernels::serial::residuals>)->DenseRange(2, 4);
BENCHMARK(residuals<kernels::parallel::residuals>)->DenseRange(2, 4);
BENCHMARK(commutant<kernels::serial::commutant_system>)->Arg(4)->Arg(8);
BENCHMARK(commutant<kernels::parallel::commutant_system>)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
