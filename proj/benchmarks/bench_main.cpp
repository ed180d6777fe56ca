#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "pegrisk/econometrics.hpp"
#include "pegrisk/marketdata.hpp"
#include "pegrisk/pegmodel.hpp"
#include "pegrisk/simkit.hpp"

using namespace pegrisk;

static void BM_SimulatePaths(benchmark::State& state) {
    SimConfig cfg;
    cfg.p_default = 0.005;
    cfg.delta0 = 0.001;
    cfg.n_paths = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_paths(cfg).mc_futures);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePaths)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_OlsHc0(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(0.0, 1.0);
    DesignMatrix x(n, {"a", "b", "c", std::string(kIntercept)});
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = z(rng);
        x(i, 3) = 1.0;
        y[i] = x(i, 0) + z(rng);
    }
    for (auto _ : state) benchmark::DoNotOptimize(ols_hc0(y, x).r_squared);
}
BENCHMARK(BM_OlsHc0)->Arg(410)->Arg(10000);

static void BM_ParseBars(benchmark::State& state) {
    FixtureConfig cfg;
    cfg.n_days = static_cast<std::size_t>(state.range(0));
    std::ostringstream os;
    write_bars(os, generate_fixture(cfg).btc);
    const std::string text = os.str();
    for (auto _ : state) {
        std::istringstream in(text);
        benchmark::DoNotOptimize(parse_bars(in, CsvSchema{}, "BTC_USDT", "bench").bars.size());
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseBars)->Arg(410)->Arg(10000);

static void BM_ProbSeries(benchmark::State& state) {
    FixtureConfig cfg;
    cfg.n_days = static_cast<std::size_t>(state.range(0));
    const auto fx = generate_fixture(cfg);
    const auto aligned = align_daily(fx.spot, fx.futures);
    for (auto _ : state) benchmark::DoNotOptimize(prob_series(aligned, PegParams{}, true).points.size());
}
BENCHMARK(BM_ProbSeries)->Arg(410)->Arg(10000);

BENCHMARK_MAIN();
