#include <benchmark/benchmark.h>

#include <vector>

#include "collab/fitdist.hpp"
#include "collab/graph.hpp"
#include "collab/rng.hpp"
#include "collab/synthgen.hpp"

namespace {

using namespace collab;

ScenarioConfig bench_scenario(Year years, double scale) {
    ScenarioConfig config;
    config.seed = 7;
    config.start_year = 1900;
    config.end_year = 1900 + years - 1;
    config.growth.alpha = 1.0;
    config.growth.scale = scale;
    config.team_size.kind = TeamSizeSpec::Kind::categorical;
    config.team_size.categories = {{2, 0.4}, {3, 0.35}, {5, 0.2}, {8, 0.05}};
    config.career.weibull_k = 1.2;
    config.career.weibull_lambda = 6.0;
    config.entrant_share = 0.5;
    return config;
}

void BM_clique_expand(benchmark::State& state) {
    ProjectEvent event;
    event.project_id = "p";
    event.completion_year = 2000;
    for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(state.range(0)); ++i) {
        event.members.push_back(i);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(clique_expand(event, 2));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * (state.range(0) - 1) / 2);
}
BENCHMARK(BM_clique_expand)->Arg(3)->Arg(10)->Arg(50);

void BM_generate(benchmark::State& state) {
    const ScenarioConfig config = bench_scenario(static_cast<Year>(state.range(0)), 50.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate(config));
    }
}
BENCHMARK(BM_generate)->Arg(25)->Arg(50);

void BM_build_graph(benchmark::State& state) {
    const auto generated = generate(bench_scenario(static_cast<Year>(state.range(0)), 50.0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_graph(generated.events, 2));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(generated.events.size()));
}
BENCHMARK(BM_build_graph)->Arg(25)->Arg(50);

void BM_fit_power_law(benchmark::State& state) {
    SplitMix64 rng(11);
    std::vector<std::uint32_t> samples;
    samples.reserve(100000);
    // Inverse-CDF Zipf(2.2) draws over a wide support.
    for (int i = 0; i < 100000; ++i) {
        const double u = 1.0 - rng.next_double();
        const auto k = static_cast<std::uint32_t>(std::pow(u, -1.0 / 1.2));
        samples.push_back(std::min<std::uint32_t>(std::max<std::uint32_t>(k, 1), 100000));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_power_law(samples));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples.size()));
}
BENCHMARK(BM_fit_power_law);

void BM_fit_weibull(benchmark::State& state) {
    SplitMix64 rng(13);
    std::vector<double> samples;
    samples.reserve(100000);
    for (int i = 0; i < 100000; ++i) {
        samples.push_back(sample_weibull(1.3, 6.0, rng));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_weibull(samples));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples.size()));
}
BENCHMARK(BM_fit_weibull);

}  // namespace

BENCHMARK_MAIN();
