#include "minkray/lightray.hpp"
#include "minkray/microlocal.hpp"
#include "minkray/oracles.hpp"
#include "minkray/reconstruct.hpp"
#include "minkray/wave.hpp"

#include <benchmark/benchmark.h>

using namespace minkray;

namespace {

GridSpec grid(int n, int Nx, int Nt) {
    GridSpec g;
    g.n = n;
    g.Nx = Nx;
    g.Nt = Nt;
    g.Lx = n == 2 ? 3.0 : 2.0;
    g.T = n == 2 ? 1.5 : 1.2;
    g.t1 = n == 2 ? 0.75 : 0.6;
    g.R0 = 0.5;
    g.validate();
    return g;
}

RayChart chart(const GridSpec& g) { return g.n == 2 ? make_chart_uniform(g, 64) : make_chart_gl(g, 4, 8); }

void BM_FftSpatial(benchmark::State& st) {
    GridSpec g = grid(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), 8);
    SpatialField f = oracles::random_smooth_spatial(g, 1, 0.5, 0.3);
    for (auto _ : st) benchmark::DoNotOptimize(fft_spatial(f));
}
BENCHMARK(BM_FftSpatial)->Args({2, 128})->Args({2, 256})->Args({3, 48})->Args({3, 64});

void BM_RayTransform(benchmark::State& st) {
    GridSpec g = grid(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), static_cast<int>(st.range(2)));
    ScalarField f = oracles::random_smooth_field(g, 2, 0, g.t1_grid(), 0.5, 0.3);
    RayChart c = chart(g);
    for (auto _ : st) benchmark::DoNotOptimize(ray_transform(f, c));
}
BENCHMARK(BM_RayTransform)->Args({2, 128, 128})->Args({3, 32, 32})->Unit(benchmark::kMillisecond);

void BM_Backproject(benchmark::State& st) {
    GridSpec g = grid(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), static_cast<int>(st.range(2)));
    RayChart c = chart(g);
    Sinogram S = oracles::random_smooth_sinogram(c, 3, 0.5, 0.3);
    for (auto _ : st) benchmark::DoNotOptimize(backproject(S, g));
}
BENCHMARK(BM_Backproject)->Args({2, 128, 128})->Args({3, 32, 32})->Unit(benchmark::kMillisecond);

void BM_NormalMultiplier(benchmark::State& st) {
    GridSpec g = grid(2, static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    ScalarField f = oracles::random_smooth_field(g, 4, 0, g.t1_grid(), 0.5, 0.3);
    NormalOptions opt;
    opt.scheme = st.range(2) ? NormalScheme::FrequencyCapped : NormalScheme::TimeKernel;
    for (auto _ : st) benchmark::DoNotOptimize(apply_normal_multiplier(f, opt));
}
BENCHMARK(BM_NormalMultiplier)->Args({64, 64, 0})->Args({64, 64, 1})->Unit(benchmark::kMillisecond);

void BM_MeasureMultiplier(benchmark::State& st) {
    GridSpec g = grid(2, static_cast<int>(st.range(0)), static_cast<int>(st.range(0)));
    Pipeline p = Pipeline::parse("E+*.chi.N.1.E+");
    for (auto _ : st) benchmark::DoNotOptimize(measure_multiplier(p, g));
}
BENCHMARK(BM_MeasureMultiplier)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SolveSourceFlat(benchmark::State& st) {
    GridSpec g = grid(2, 64, static_cast<int>(st.range(0)));
    ScalarField f = oracles::random_smooth_field(g, 5, 0.1, 1.0, 0.5, 0.3);
    for (auto _ : st) benchmark::DoNotOptimize(solve_source_flat(f));
}
BENCHMARK(BM_SolveSourceFlat)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SymbolA(benchmark::State& st) {
    double s = 0.3;
    for (auto _ : st) {
        benchmark::DoNotOptimize(symbol_A(s, 2.0, static_cast<int>(st.range(0))));
        s += 1e-6;
    }
}
BENCHMARK(BM_SymbolA)->Arg(3)->Arg(5);

}  // namespace
BENCHMARK_MAIN();
