// Discrete Legendre transform: brute-force serial reference against the
// linear-time OpenMP kernels, on 1-D lines and 2-D tensor grids.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "pluri/kernels.hpp"

namespace {

struct Line {
  std::vector<double> x, f, p, out;
};

Line make_line(int n) {
  Line l;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> noise(-0.1, 0.1);
  for (int i = 0; i < n; ++i) {
    const double x = -8.0 + 16.0 * i / (n - 1);
    l.x.push_back(x);
    l.f.push_back(std::log1p(std::exp(x)) + noise(rng));
    l.p.push_back(double(i) / (n - 1));
  }
  l.out.resize(n);
  return l;
}

void BM_Reference1D(benchmark::State& state) {
  Line l = make_line(int(state.range(0)));
  for (auto _ : state) {
    pluri::reference::conjugate_1d(l.x, l.f, l.p, l.out);
    benchmark::DoNotOptimize(l.out.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_Kernel1D(benchmark::State& state) {
  Line l = make_line(int(state.range(0)));
  for (auto _ : state) {
    pluri::kernels::conjugate_1d(l.x, l.f, l.p, l.out);
    benchmark::DoNotOptimize(l.out.data());
  }
  state.SetComplexityN(state.range(0));
}

struct Plane {
  std::vector<double> x, p, f, out;
};

Plane make_plane(int n) {
  Plane g;
  for (int i = 0; i < n; ++i) {
    g.x.push_back(-4.0 + 8.0 * i / (n - 1));
    g.p.push_back(double(i) / (n - 1));
  }
  g.f.resize(std::size_t(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g.f[std::size_t(j) * n + i] = 0.5 * (g.x[i] * g.x[i] + g.x[j] * g.x[j]) + std::sin(g.x[i] * g.x[j]);
  g.out.resize(g.f.size());
  return g;
}

void BM_Reference2D(benchmark::State& state) {
  Plane g = make_plane(int(state.range(0)));
  for (auto _ : state) {
    pluri::reference::conjugate_2d(g.x, g.x, g.f, g.p, g.p, g.out);
    benchmark::DoNotOptimize(g.out.data());
  }
}

void BM_Kernel2D(benchmark::State& state) {
  Plane g = make_plane(int(state.range(0)));
  for (auto _ : state) {
    pluri::kernels::conjugate_2d(g.x, g.x, g.f, g.p, g.p, g.out);
    benchmark::DoNotOptimize(g.out.data());
  }
}

}  // namespace

BENCHMARK(BM_Reference1D)->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK(BM_Kernel1D)->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK(BM_Reference2D)->Arg(33)->Arg(65);
BENCHMARK(BM_Kernel2D)->Arg(33)->Arg(65)->Arg(129)->Arg(257);

BENCHMARK_MAIN();
