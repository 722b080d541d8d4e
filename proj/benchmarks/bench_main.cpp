#include <benchmark/benchmark.h>

#include "nsch/cahn_hilliard.hpp"
#include "nsch/coupled.hpp"
#include "nsch/momentum.hpp"

using namespace nsch;

namespace {

const ModelParams kParams{3.0, 1.0, 0.1, 0.1, FloryHuggins{1.0, 2.0}};

RunConfig bench_config(int n) {
    RunConfig cfg;
    cfg.grid = Grid(n, n, 1.0, 1.0);
    cfg.dt = 1e-4;
    cfg.t_end = 1e-4;
    cfg.init.phase = SeededPerturbation{0.0, 0.5, 1, 4};
    cfg.init.velocity = ShearLayer{1.0};
    return cfg;
}

void BM_Laplacian(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const Grid g(n, n, 1.0, 1.0);
    const ScalarField f = make_initial_phase(g, SeededPerturbation{0.0, 0.5, 1, 4});
    for (auto _ : st) benchmark::DoNotOptimize(laplacian_neumann(f));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(g.cell_count()));
}
BENCHMARK(BM_Laplacian)->Arg(32)->Arg(64)->Arg(128)->Arg(256);

void BM_ChStep(benchmark::State& st) {
    const RunConfig cfg = bench_config(static_cast<int>(st.range(0)));
    const State s = make_initial_state(cfg, kParams);
    CHStepConfig ch = cfg.ch;
    ch.dt = cfg.dt;
    const CHState chs{0.0, s.phi, s.mu};
    for (auto _ : st) benchmark::DoNotOptimize(ch_step(chs, s.u, ch, kParams.potential));
}
BENCHMARK(BM_ChStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_MomentumStep(benchmark::State& st) {
    const RunConfig cfg = bench_config(static_cast<int>(st.range(0)));
    const State s = make_initial_state(cfg, kParams);
    const State next = agg_step(s, kParams, cfg);
    MomentumConfig mc = cfg.momentum;
    mc.dt = cfg.dt;
    const FlowState flow{s.u, s.p};
    for (auto _ : st) benchmark::DoNotOptimize(momentum_step(flow, next.phi, next.mu, s.phi, kParams, mc));
}
BENCHMARK(BM_MomentumStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_AggStep(benchmark::State& st) {
    const RunConfig cfg = bench_config(static_cast<int>(st.range(0)));
    const State s = make_initial_state(cfg, kParams);
    for (auto _ : st) benchmark::DoNotOptimize(agg_step(s, kParams, cfg));
}
BENCHMARK(BM_AggStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
