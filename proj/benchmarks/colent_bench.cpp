#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "colent/cellspace.hpp"
#include "colent/estimator.hpp"
#include "colent/lowerbound.hpp"
#include "colent/refinement.hpp"
#include "colent/symbolic.hpp"

using namespace colent;

static void BM_DynamicalJoinFullShift(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ModelBundle model = cylinder_cover(TransferMatrix::full_shift(2), n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dynamical_join(model, n));
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(model.space->size()));
}
BENCHMARK(BM_DynamicalJoinFullShift)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);

// Tiling of a king-move grid by overlapping 2x2 blocks, stride 1.
static void BM_ColouredRefinementGrid(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  auto space = std::make_shared<const CellSpace>(CellSpace::grid(side, side));
  std::vector<std::vector<CellId>> blocks;
  for (std::size_t r = 0; r + 1 < side; ++r) {
    for (std::size_t c = 0; c + 1 < side; ++c) {
      blocks.push_back({static_cast<CellId>(r * side + c), static_cast<CellId>(r * side + c + 1),
                        static_cast<CellId>((r + 1) * side + c),
                        static_cast<CellId>((r + 1) * side + c + 1)});
    }
  }
  const Cover cover(space, blocks);
  for (auto _ : state) {
    benchmark::DoNotOptimize(minimal_coloured_refinement(cover));
  }
}
BENCHMARK(BM_ColouredRefinementGrid)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_SftEntropy(benchmark::State& state) {
  const TransferMatrix a = power_system(TransferMatrix::golden_mean(), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sft_entropy(a));
  }
  state.counters["alphabet"] = static_cast<double>(a.alphabet());
}
BENCHMARK(BM_SftEntropy)->Arg(1)->Arg(6)->Arg(10);

static void BM_L1Rademacher(benchmark::State& state) {
  const VectorFamily f = kerr_witness(2, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(l1_equivalence_constant(f));
  }
}
BENCHMARK(BM_L1Rademacher)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
