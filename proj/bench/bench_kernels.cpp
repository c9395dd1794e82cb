// Serial reference vs OpenMP chunked kernels for the batched MLP pass.
#include "pgvarmion/kernels.hpp"

#include <benchmark/benchmark.h>

using namespace pgvarmion;

namespace {

struct fixture {
  mlp net;
  Matrix x, cot;

  fixture(std::vector<int> dims, double p, Eigen::Index batch) : net(std::move(dims), true, p) {
    net.initialize(7);
    x = (Matrix::Random(net.input_dim(), batch).array() + 1.0) * 0.5;
    cot = Matrix::Random(net.output_dim(), batch);
  }
};

fixture& advdiff2d(Eigen::Index batch) {
  static fixture f({2, 50, 100, 100}, 100.0, batch);
  if (f.x.cols() != batch) f = fixture({2, 50, 100, 100}, 100.0, batch);
  return f;
}

void bm_forward_serial(benchmark::State& st) {
  auto& f = advdiff2d(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::forward(f.net, f.x));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void bm_forward_parallel(benchmark::State& st) {
  auto& f = advdiff2d(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::forward(f.net, f.x));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void bm_backward_serial(benchmark::State& st) {
  auto& f = advdiff2d(st.range(0));
  mlp_tape tape;
  kernels::serial::forward(f.net, f.x, &tape);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::backward(f.net, tape, f.cot));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void bm_backward_parallel(benchmark::State& st) {
  auto& f = advdiff2d(st.range(0));
  mlp_tape tape;
  kernels::forward(f.net, f.x, &tape);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::backward(f.net, tape, f.cot));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

} // namespace

BENCHMARK(bm_forward_serial)->Arg(1600)->Arg(12000);
BENCHMARK(bm_forward_parallel)->Arg(1600)->Arg(12000);
BENCHMARK(bm_backward_serial)->Arg(1600)->Arg(12000);
BENCHMARK(bm_backward_parallel)->Arg(1600)->Arg(12000);

BENCHMARK_MAIN();
