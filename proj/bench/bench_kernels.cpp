#include <benchmark/benchmark.h>

#include "hydrolab/bundles.hpp"
#include "hydrolab/geometry.hpp"
#include "hydrolab/random_fields.hpp"

using namespace hydrolab;

namespace {

struct Fixture {
  SparseHermitianOperator op;
  FieldVector x, y;
  std::vector<std::vector<cplx>> basis;
  explicit Fixture(int n) {
    MetricSpec s;
    s.grid_points_per_axis = n;
    const auto m = build_manifold(s);
    op = assemble_laplace_beltrami(m);
    x = gaussian_random_field(op, 1);
    y = gaussian_random_field(op, 2);
    for (int j = 0; j < 24; ++j) basis.push_back(gaussian_random_field(op, 10 + j).values);
  }
};

Fixture& fixture(int n) {
  static Fixture f32(32), f64(64);
  return n == 32 ? f32 : f64;
}

void BM_spmv(benchmark::State& st) {
  auto& f = fixture(st.range(0));
  for (auto _ : st) {
    kernels::spmv(f.op.matrix(), f.x.values, f.y.values);
    benchmark::DoNotOptimize(f.y.values.data());
  }
}
void BM_spmv_reference(benchmark::State& st) {
  auto& f = fixture(st.range(0));
  for (auto _ : st) {
    kernels::reference::spmv(f.op.matrix(), f.x.values, f.y.values);
    benchmark::DoNotOptimize(f.y.values.data());
  }
}
void BM_wdot(benchmark::State& st) {
  auto& f = fixture(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::wdot(f.op.dof_weights(), f.x.values, f.y.values));
}
void BM_wdot_reference(benchmark::State& st) {
  auto& f = fixture(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::reference::wdot(f.op.dof_weights(), f.x.values, f.y.values));
}
void BM_project_out(benchmark::State& st) {
  auto& f = fixture(st.range(0));
  std::vector<cplx> c(f.basis.size());
  for (auto _ : st) {
    auto v = f.x.values;
    kernels::project_out(f.op.dof_weights(), f.basis, f.basis.size(), v, c);
    benchmark::DoNotOptimize(v.data());
  }
}
void BM_project_out_reference(benchmark::State& st) {
  auto& f = fixture(st.range(0));
  std::vector<cplx> c(f.basis.size());
  for (auto _ : st) {
    auto v = f.x.values;
    kernels::reference::project_out(f.op.dof_weights(), f.basis, f.basis.size(), v, c);
    benchmark::DoNotOptimize(v.data());
  }
}

}  // namespace

BENCHMARK(BM_spmv)->Arg(32)->Arg(64);
BENCHMARK(BM_spmv_reference)->Arg(32)->Arg(64);
BENCHMARK(BM_wdot)->Arg(32)->Arg(64);
BENCHMARK(BM_wdot_reference)->Arg(32)->Arg(64);
BENCHMARK(BM_project_out)->Arg(32)->Arg(64);
BENCHMARK(BM_project_out_reference)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
