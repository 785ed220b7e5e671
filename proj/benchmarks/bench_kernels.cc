#include <benchmark/benchmark.h>

#include <cmath>

#include "jsvd/efnorm.hpp"
#include "jsvd/evd2.hpp"
#include "jsvd/jacobi_kernels.hpp"
#include "jsvd/rng.hpp"
#include "jsvd/testgen.hpp"

using namespace jsvd;
using N = lanes::Native;

namespace {

AlignedVec random_vec(std::size_t n, std::uint64_t seed) {
  SplitMix64 g(seed);
  AlignedVec x(n);
  for (double& v : x) v = g.normal();
  return x;
}

void BM_evd2_batch(benchmark::State& st) {
  const bool complex = st.range(1) != 0;
  const Gen2x2 gen = gen2x2_batch(std::size_t(st.range(0)), 1, complex);
  Evd2Options opt;
  EVDOut2 out = EVDOut2::make(gen.batch.r, complex, gen.batch.s, false, false);
  for (auto _ : st) {
    evd2_batch_into(gen.batch, out, opt);
    benchmark::DoNotOptimize(out.cos_phi.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_evd2_batch)->ArgsProduct({{1 << 10, 1 << 16}, {0, 1}})->ArgNames({"r", "complex"});

void BM_frob_norm_ef(benchmark::State& st) {
  const AlignedVec x = random_vec(std::size_t(st.range(0)), 2);
  for (auto _ : st) benchmark::DoNotOptimize(frob_norm_ef(x.data(), x.size()));
  st.SetBytesProcessed(st.iterations() * st.range(0) * sizeof(double));
}
BENCHMARK(BM_frob_norm_ef)->RangeMultiplier(16)->Range(1 << 8, 1 << 20);

// Plain sum of squares for comparison; it overflows for large elements.
void BM_naive_norm(benchmark::State& st) {
  const AlignedVec x = random_vec(std::size_t(st.range(0)), 2);
  for (auto _ : st) {
    double s = 0;
    for (double v : x) s += v * v;
    benchmark::DoNotOptimize(std::sqrt(s));
  }
  st.SetBytesProcessed(st.iterations() * st.range(0) * sizeof(double));
}
BENCHMARK(BM_naive_norm)->RangeMultiplier(16)->Range(1 << 8, 1 << 20);

void BM_djrot(benchmark::State& st) {
  const std::size_t len = std::size_t(st.range(0));
  AlignedVec p = random_vec(len, 3), q = random_vec(len, 4);
  const RotationParams r{1 / std::sqrt(1.25), 0.5, 0, false};
  for (auto _ : st) benchmark::DoNotOptimize(kern::djrot<N>(p.data(), q.data(), len, r));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_djrot)->Arg(128)->Arg(1024);

void BM_zjrot(benchmark::State& st) {
  const std::size_t len = std::size_t(st.range(0));
  AlignedVec pr = random_vec(len, 5), pi = random_vec(len, 6), qr = random_vec(len, 7), qi = random_vec(len, 8);
  const RotationParams r{1 / std::sqrt(1.25), 0.3, 0.4, false};
  for (auto _ : st)
    benchmark::DoNotOptimize(kern::zjrot<N>(pr.data(), pi.data(), qr.data(), qi.data(), len, r));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_zjrot)->Arg(128)->Arg(1024);

}  // namespace
