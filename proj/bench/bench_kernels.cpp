// SPDX-License-Identifier: Apache-2.0
//
// OpenMP kernels against their serial references on a 2D Helmholtz matrix.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "matexpre/discretization.hpp"
#include "matexpre/kernels.hpp"

namespace
{

struct Fixture
{
  matexpre::HelmholtzSystem sys;
  matexpre::Vector x;
  matexpre::Vector y;
  /// Four basis-like vectors for the windowed projection.
  std::vector<matexpre::Vector> window;
  std::vector<const matexpre::Complex*> window_ptrs;

  explicit Fixture(double freq)
  {
    const auto grid = matexpre::Grid::for_frequency(2, freq, 10.0);
    sys = matexpre::assemble(grid, matexpre::VelocityModel::homogeneous(grid));
    x.resize(sys.size());
    y.resize(sys.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = matexpre::Complex(std::sin(0.1 * i), std::cos(0.3 * i));
    }
    for (int k = 1; k <= 4; ++k) {
      matexpre::Vector q(sys.size());
      for (std::size_t i = 0; i < q.size(); ++i) q[i] = matexpre::Complex(std::cos(0.7 * k * i), 0.1 * k);
      window.push_back(std::move(q));
      window_ptrs.push_back(window.back().data());
    }
  }
};

Fixture& fixture(double freq)
{
  static Fixture f20(20.0);
  static Fixture f80(80.0);
  return freq < 40.0 ? f20 : f80;
}

void BM_spmv_parallel(benchmark::State& state)
{
  auto& f = fixture(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    matexpre::kernels::spmv(f.sys.A, f.x, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
  state.SetItemsProcessed(state.iterations() * f.sys.A.nnz());
}

void BM_spmv_serial(benchmark::State& state)
{
  auto& f = fixture(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    matexpre::kernels::serial::spmv(f.sys.A, f.x, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
  state.SetItemsProcessed(state.iterations() * f.sys.A.nnz());
}

void BM_dot_parallel(benchmark::State& state)
{
  auto& f = fixture(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(matexpre::kernels::dot_conj(f.x, f.y));
}

void BM_dot_serial(benchmark::State& state)
{
  auto& f = fixture(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(matexpre::kernels::serial::dot_conj(f.x, f.y));
}

void BM_axpy_parallel(benchmark::State& state)
{
  auto& f = fixture(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    matexpre::kernels::axpy({1e-3, 0.0}, f.x, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
}

void BM_axpy_serial(benchmark::State& state)
{
  auto& f = fixture(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    matexpre::kernels::serial::axpy({1e-3, 0.0}, f.x, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
}

void BM_norm_parallel(benchmark::State& state)
{
  auto& f = fixture(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(matexpre::kernels::norm2(f.x));
}

void BM_norm_serial(benchmark::State& state)
{
  auto& f = fixture(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(matexpre::kernels::serial::norm2(f.x));
}

// Projection of y on four vectors and removal of the components, as in one
// incomplete-orthogonalization step. The coefficients are reused so y stays
// bounded across iterations.
template <bool Parallel>
void BM_window_projection(benchmark::State& state)
{
  namespace k = matexpre::kernels;
  auto& f = fixture(static_cast<double>(state.range(0)));
  std::vector<matexpre::Complex> h(4);
  std::vector<matexpre::Complex> tiny(4, matexpre::Complex(1e-12, 0.0));
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::dot_conj_many(f.window_ptrs, f.y, h);
      benchmark::DoNotOptimize(k::subtract_combination(f.window_ptrs, tiny, f.y));
    }
    else {
      k::serial::dot_conj_many(f.window_ptrs, f.y, h);
      benchmark::DoNotOptimize(k::serial::subtract_combination(f.window_ptrs, tiny, f.y));
    }
    benchmark::DoNotOptimize(h.data());
  }
}

}  // namespace

BENCHMARK(BM_spmv_parallel)->Arg(20)->Arg(80);
BENCHMARK(BM_spmv_serial)->Arg(20)->Arg(80);
BENCHMARK(BM_dot_parallel)->Arg(20)->Arg(80);
BENCHMARK(BM_dot_serial)->Arg(20)->Arg(80);
BENCHMARK(BM_axpy_parallel)->Arg(20)->Arg(80);
BENCHMARK(BM_axpy_serial)->Arg(20)->Arg(80);
BENCHMARK(BM_norm_parallel)->Arg(20)->Arg(80);
BENCHMARK(BM_norm_serial)->Arg(20)->Arg(80);
BENCHMARK(BM_window_projection<true>)->Arg(20)->Arg(80);
BENCHMARK(BM_window_projection<false>)->Arg(20)->Arg(80);

BENCHMARK_MAIN();
