#include <benchmark/benchmark.h>

#include <numbers>

#include "patchlab/grid.hpp"
#include "patchlab/lp.hpp"
#include "patchlab/rng.hpp"
#include "patchlab/spectral.hpp"

using namespace patchlab;

namespace {

ScalarField make_field(const Grid& g, std::uint64_t seed) {
    Rng rng(seed);
    auto stream = rng.stream("bench-lp");
    spectral::Spectrum s(g);
    int k[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        spectral::freq_of_index(g, i, k);
        const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1];
        if (k2 == 0.0 || k2 > double(g.n / 3) * (g.n / 3)) continue;
        s.data[i] = {stream.gaussian() / std::sqrt(k2), stream.gaussian() / std::sqrt(k2)};
    }
    return spectral::inverse(s);
}

void BM_DyadicBlocks(benchmark::State& state) {
    Grid g = build_grid(2, 2.0 * std::numbers::pi, static_cast<int>(state.range(0)));
    ScalarField f = make_field(g, 42);
    for (auto _ : state) {
        lp::LPSpectrum blocks = lp::dyadic_blocks(f);
        benchmark::DoNotOptimize(blocks.blocks.back().data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_DyadicBlocks)->Arg(128)->Arg(256);

void BM_BonySplit(benchmark::State& state) {
    Grid g = build_grid(2, 2.0 * std::numbers::pi, static_cast<int>(state.range(0)));
    ScalarField a = make_field(g, 1);
    ScalarField b = make_field(g, 2);
    for (auto _ : state) {
        lp::BonySplit s = lp::bony_split(a, b);
        benchmark::DoNotOptimize(s.R_ab.data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_BonySplit)->Arg(128)->Arg(256);

void BM_BesovNorm(benchmark::State& state) {
    Grid g = build_grid(2, 2.0 * std::numbers::pi, static_cast<int>(state.range(0)));
    ScalarField f = make_field(g, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(lp::besov_norm(f, 0.5, 1, 2));
    }
}
BENCHMARK(BM_BesovNorm)->Arg(128)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
