#include <benchmark/benchmark.h>

#include "aerocf/linkchain.hpp"
#include "aerocf/optimizer.hpp"
#include "aerocf/rate.hpp"

using namespace aerocf;

namespace {

NetworkScenario drop(int K, int M) {
    ScenarioConfig c;
    c.num_users = K;
    c.num_uxnbs = M;
    return build_scenario(c, 1);
}

}  // namespace

static void BM_ClosedForm(benchmark::State& st) {
    const auto s = drop(static_cast<int>(st.range(0)), static_cast<int>(st.range(0)));
    const auto b = make_link_budget(s, compute_link_gains(s));
    const auto a = PowerAllocation::uniform(s);
    for (auto _ : st) benchmark::DoNotOptimize(closed_form_sinr(b, a));
}
BENCHMARK(BM_ClosedForm)->Arg(4)->Arg(16)->Arg(32);

static void BM_LinkGains(benchmark::State& st) {
    const auto s = drop(16, 16);
    for (auto _ : st) benchmark::DoNotOptimize(compute_link_gains(s));
}
BENCHMARK(BM_LinkGains);

static void BM_FeasibilityProbe(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const auto s = drop(n, n);
    const auto b = make_link_budget(s, compute_link_gains(s));
    const auto prog = compile_power_feasibility(b, s.uxnb_power_w, 10.0);
    SolveOptions o;
    o.feasibility_only = true;
    for (auto _ : st) benchmark::DoNotOptimize(solve(prog, o));
}
BENCHMARK(BM_FeasibilityProbe)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_Bisection(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const auto s = drop(n, n);
    const auto g = compute_link_gains(s);
    for (auto _ : st) benchmark::DoNotOptimize(bisection_power(s, g));
}
BENCHMARK(BM_Bisection)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_PlacementStep(benchmark::State& st) {
    const auto s = drop(8, 8);
    const auto g = compute_link_gains(s);
    const auto a = PowerAllocation::uniform(s);
    for (auto _ : st) benchmark::DoNotOptimize(placement_step(s, g, a));
}
BENCHMARK(BM_PlacementStep)->Unit(benchmark::kMillisecond);

static void BM_MonteCarlo(benchmark::State& st) {
    ScenarioConfig c;
    c.num_users = 4;
    c.num_uxnbs = 4;
    c.radio.uxnb_rx = {4, 4};
    c.radio.uxnb_tx = {2, 2};
    c.radio.haps_rx = {8, 8};
    const auto s = build_scenario(c, 1);
    const auto g = compute_link_gains(s);
    McOptions o;
    o.trials = 2000;
    for (auto _ : st) benchmark::DoNotOptimize(estimate_empirical_sinr(s, g, PowerAllocation::uniform(s), o));
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
