#include <benchmark/benchmark.h>

#include "jsvd/svd.hpp"
#include "jsvd/testgen.hpp"

using namespace jsvd;

namespace {

// Whole SVD of a small generated matrix; reports the sweep count.
void BM_svd_run(benchmark::State& st) {
  const std::size_t n = std::size_t(st.range(0));
  const bool complex = st.range(1) != 0;
  const GenSVD g = gen_svd_matrix({-23, n, SpectrumOrder::random}, 1, complex);
  SVDConfig cfg;
  cfg.max_sweeps = 80;
  std::size_t sweeps = 0;
  for (auto _ : st) {
    const SVDResult r = svd_run(g.G, cfg);
    sweeps = r.sweeps;
    benchmark::DoNotOptimize(r.sigma.data());
  }
  st.counters["sweeps"] = double(sweeps);
}
BENCHMARK(BM_svd_run)
    ->ArgsProduct({{32, 64}, {0, 1}})
    ->ArgNames({"n", "complex"})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
