#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "rtree/deficiency.hpp"
#include "rtree/evaluate.hpp"
#include "rtree/generators.hpp"
#include "rtree/kernels.hpp"
#include "rtree/realization.hpp"

namespace {

using namespace rtree;

// Additive matrix over n points spread on a random tree.
MetricMatrix tree_matrix(std::size_t n) {
  std::mt19937_64 rng(n);
  RawTree raw{{"n0"}, {}, {}, "n0"};
  for (std::size_t i = 1; i < n; ++i) {
    raw.nodes.push_back("n" + std::to_string(i));
    raw.edges.push_back({"n" + std::to_string(rng() % i), raw.nodes.back(), Rat(1 + static_cast<long>(rng() % 7), 1 + static_cast<long>(rng() % 3))});
  }
  const Tree t = Tree::build(raw);
  std::vector<PointRef> pts;
  std::vector<std::string> labels;
  for (NodeIndex v = 0; v < t.node_count(); ++v) {
    pts.push_back(PointRef::vertex(v));
    labels.push_back(t.id(v));
  }
  return tree_to_matrix(t, pts, labels);
}

template <class F>
void run_matrix(benchmark::State& state, F kernel) {
  const MetricMatrix m = tree_matrix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernel(m));
}

void BM_FourPointSerial(benchmark::State& s) { run_matrix(s, kernels::serial::four_point); }
void BM_FourPointParallel(benchmark::State& s) { run_matrix(s, kernels::parallel::four_point); }
void BM_DeltaSerial(benchmark::State& s) { run_matrix(s, kernels::serial::delta); }
void BM_DeltaParallel(benchmark::State& s) { run_matrix(s, kernels::parallel::delta); }
BENCHMARK(BM_FourPointSerial)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FourPointParallel)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DeltaSerial)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DeltaParallel)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

template <class F>
void run_deficiency(benchmark::State& state, F kernel) {
  const Tree t = rb_extend(primitives::tripod(Rat(1), Rat(1), Rat(1), Rat(2)), Rat(2), static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernel(t, Rat(2)));
  state.counters["nodes"] = static_cast<double>(t.node_count());
}

void BM_DeficiencySerial(benchmark::State& s) { run_deficiency(s, kernels::serial::rb_deficiency); }
void BM_DeficiencyParallel(benchmark::State& s) { run_deficiency(s, kernels::parallel::rb_deficiency); }
BENCHMARK(BM_DeficiencySerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DeficiencyParallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

// Nested quantifiers go through the grid; compare one thread with all.
void grid_eval(benchmark::State& state, int threads) {
  const Tree t = primitives::k_star(4, Rat(1), Rat(1));
  const Formula f = parse_formula("sup x. inf y. max(d(x,y), d(y,p) -. 1/2)");
  const int before = omp_get_max_threads();
  omp_set_num_threads(threads > 0 ? threads : before);
  for (auto _ : state) benchmark::DoNotOptimize(eval_quantified(t, f, {}, Rat(1, state.range(0))));
  omp_set_num_threads(before);
}

void BM_GridEvalSerial(benchmark::State& s) { grid_eval(s, 1); }
void BM_GridEvalParallel(benchmark::State& s) { grid_eval(s, 0); }
BENCHMARK(BM_GridEvalSerial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridEvalParallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
