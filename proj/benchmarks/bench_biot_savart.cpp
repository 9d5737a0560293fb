#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "patchlab/biot_savart.hpp"
#include "patchlab/contour.hpp"
#include "patchlab/domain.hpp"
#include "patchlab/grid.hpp"

using namespace patchlab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScalarField rankine(const Grid& g, double a) {
    ScalarField f(g);
    const Vec3 c = g.center();
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (norm(g.node(i, j) - c) < a) f.at(i, j) = 1.0;
    return f;
}

void BM_FreeSpaceSolve(benchmark::State& state) {
    Grid g = build_grid(2, kTwoPi, static_cast<int>(state.range(0)));
    ScalarField omega = rankine(g, 0.5);
    for (auto _ : state) {
        VectorField v = bs::bs_free(omega);
        benchmark::DoNotOptimize(v.comp[0].data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_FreeSpaceSolve)->Arg(256)->Arg(512);

void BM_VelocityFromVorticity(benchmark::State& state) {
    Grid g = build_grid(2, kTwoPi, static_cast<int>(state.range(0)));
    Domain d = domain_disk(g, 1.0);
    ScalarField omega = rankine(g, 0.5);
    for (auto _ : state) {
        bs::VelocitySolution sol = bs::velocity_from_vorticity(omega, d);
        benchmark::DoNotOptimize(sol.vbar.comp[0].data.data());
    }
}
BENCHMARK(BM_VelocityFromVorticity)->Arg(256)->Arg(512);

void BM_ContourVelocity(benchmark::State& state) {
    contour::Ring ring;
    const int m = static_cast<int>(state.range(0));
    for (int i = 0; i < m; ++i) {
        const double th = kTwoPi * i / m;
        ring.push_back({std::cos(th), 0.5 * std::sin(th), 0.0});
    }
    for (auto _ : state) {
        Vec3 acc;
        for (int i = 0; i < m; ++i)
            acc += contour::cd_velocity(ring, 1.0, ring[i], i);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m) * m);
}
BENCHMARK(BM_ContourVelocity)->Arg(256)->Arg(512)->Arg(1024);

void BM_DiskCorrection(benchmark::State& state) {
    Grid g = build_grid(2, kTwoPi, 256);
    Domain d = domain_disk(g, 1.0);
    std::vector<double> gb(512);
    for (int i = 0; i < 512; ++i) {
        const Vec3 b = d.boundary_point(i, 512);
        gb[i] = std::cos(3.0 * std::atan2(b.y - d.center.y, b.x - d.center.x));
    }
    bs::DiskCorrection corr = bs::solve_disk_neumann(gb, d);
    Vec3 p = d.center + Vec3{0.3, 0.2, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(corr.grad(p));
    }
}
BENCHMARK(BM_DiskCorrection);

}  // namespace

BENCHMARK_MAIN();
