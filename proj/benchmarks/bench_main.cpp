#include <benchmark/benchmark.h>

#include <random>

#include "uatpc/kdtree.hpp"
#include "uatpc/optimizer.hpp"
#include "uatpc/selection.hpp"
#include "uatpc/sim.hpp"
#include "uatpc/synth.hpp"

using namespace uatpc;

namespace {

SyntheticScenario scenario(std::size_t aps, std::size_t stas)
{
    ScenarioParams p;
    p.n_aps = aps;
    p.n_stas = stas;
    p.seed = 42;
    return gen_uniform_scenario(p);
}

std::vector<Point3> cloud(std::size_t n)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<Point3> pts(n);
    for (auto& p : pts) {
        p = {u(rng), u(rng), u(rng)};
    }
    return pts;
}

} // namespace

static void BM_NetworkUtilityReference(benchmark::State& state)
{
    const auto sc = scenario(static_cast<std::size_t>(state.range(0)), 330);
    const auto rps = sc.reference_points();
    const auto cfg = full_power(sc.instance);
    for (auto _ : state) {
        benchmark::DoNotOptimize(network_utility(rps, cfg, sc.instance).total);
    }
}
BENCHMARK(BM_NetworkUtilityReference)->Arg(10)->Arg(33);

static void BM_UtilityEvaluator(benchmark::State& state)
{
    const auto sc = scenario(static_cast<std::size_t>(state.range(0)), 330);
    const UtilityEvaluator eval(sc.instance, sc.reference_points());
    const auto cfg = full_power(sc.instance);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval(cfg));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_UtilityEvaluator)->Arg(10)->Arg(33);

static void BM_LocalSearch(benchmark::State& state)
{
    const auto sc = scenario(33, 330);
    const auto rps = sc.reference_points();
    SearchOptions opts;
    opts.trials = state.range(0) == 0 ? std::nullopt : std::optional<int>(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(local_search(sc.instance, rps, opts).best_utility);
    }
}
BENCHMARK(BM_LocalSearch)->Arg(0)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_KdTreeBuild(benchmark::State& state)
{
    const auto pts = cloud(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        KdTree tree(pts);
        benchmark::DoNotOptimize(tree.size());
    }
}
BENCHMARK(BM_KdTreeBuild)->Arg(1000)->Arg(10000);

static void BM_KdTreeRadius(benchmark::State& state)
{
    const auto pts = cloud(10000);
    const KdTree tree(pts);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tree.radius_count(pts[i++ % pts.size()], static_cast<double>(state.range(0))));
    }
}
BENCHMARK(BM_KdTreeRadius)->Arg(2)->Arg(10);

static void BM_StratifiedSelect(benchmark::State& state)
{
    HotspotParams hp;
    hp.n_aps = 4;
    const auto sc = gen_hotspot_scenario(hp);
    std::vector<std::array<double, 2>> xy;
    for (const auto& p : sc.sta_positions) {
        xy.push_back({p.x, p.y});
    }
    const auto emb = embed_positions(xy);
    for (auto _ : state) {
        benchmark::DoNotOptimize(stratified_select(emb, 2.0, 1).selected_indices.size());
    }
}
BENCHMARK(BM_StratifiedSelect)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
