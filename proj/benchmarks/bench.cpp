#include <benchmark/benchmark.h>

#include "gamest/estimators.hpp"
#include "gamest/eval.hpp"
#include "gamest/rng.hpp"
#include "gamest/solvers.hpp"

using namespace gamest;

namespace {

// A fixed completely mixed game (no pure equilibrium).
const GameSpec& bench_game() {
    static const GameSpec g(2, 2, {10, 0, 9, 10}, {8, 18, 9, 8});
    return g;
}

void bm_solve_qre(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(solve_qre(bench_game(), 1.05));
}
BENCHMARK(bm_solve_qre);

void bm_solve_ase(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(solve_ase_2x2(bench_game(), 12));
}
BENCHMARK(bm_solve_ase);

void bm_solve_pse(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(solve_pse_2x2(bench_game(), 6));
}
BENCHMARK(bm_solve_pse);

void bm_solve_ibe(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(solve_ibe_2x2(bench_game()));
}
BENCHMARK(bm_solve_ibe);

void bm_estimate_ase(benchmark::State& state) {
    const MaskedGame m = MaskedGame::hide(bench_game(), {Player::row, 0, 0});
    const EmpiricalFrequencies f{{0.47, 0.53}, {0.61, 0.39}};
    const MethodConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_ase(m, f, cfg));
}
BENCHMARK(bm_estimate_ase);

void bm_estimate_pse(benchmark::State& state) {
    const MaskedGame m = MaskedGame::hide(bench_game(), {Player::row, 0, 0});
    const EmpiricalFrequencies f{{0.47, 0.53}, {0.61, 0.39}};
    const MethodConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_pse(m, f, cfg));
}
BENCHMARK(bm_estimate_pse);

void bm_estimate_ibe(benchmark::State& state) {
    const MaskedGame m = MaskedGame::hide(bench_game(), {Player::row, 0, 0});
    const EmpiricalFrequencies f{{0.47, 0.53}, {0.61, 0.39}};
    const MethodConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_ibe(m, f, cfg));
}
BENCHMARK(bm_estimate_ibe);

void bm_estimate_qr(benchmark::State& state) {
    const MaskedGame m = MaskedGame::hide(bench_game(), {Player::row, 0, 0});
    const SessionData s = simulate({{0.5, 0.5}, {0.5, 0.5}}, 200, 1);
    const MethodConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_qr(m, s, cfg));
}
BENCHMARK(bm_estimate_qr);

void bm_run_eval_session(benchmark::State& state) {
    EvalTask task;
    task.game_name = "bench";
    task.game = bench_game();
    task.methods.assign(kAllMethods.begin(), kAllMethods.end());
    task.sessions.push_back({"s1", {simulate(solve_qre(task.game, 1.05).profile, 200, 2)}});
    for (auto _ : state) benchmark::DoNotOptimize(run_eval(task));
}
BENCHMARK(bm_run_eval_session);

}  // namespace

BENCHMARK_MAIN();
