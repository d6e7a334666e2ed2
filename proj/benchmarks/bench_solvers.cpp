#include <benchmark/benchmark.h>

#include "mfeg/channel.hpp"
#include "mfeg/fpk.hpp"
#include "mfeg/hjb.hpp"
#include "mfeg/model.hpp"

using namespace mfeg;

namespace {

void bm_hamiltonian_argmax(benchmark::State& state) {
  ModelParams p;
  double lambda = 1e5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hamiltonian_argmax(lambda, 0.9, 1.0, p));
    lambda += 1.0;
  }
}
BENCHMARK(bm_hamiltonian_argmax);

void bm_hjb_sweep(benchmark::State& state) {
  ModelParams p;
  const Grid g = Grid::with_cfl_margin(p, static_cast<std::size_t>(state.range(0)));
  const auto I = InterferenceTrajectory::constant(g.n_time, 0.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_hjb_backward(I, g, zero_reward, p));
  }
}
BENCHMARK(bm_hjb_sweep)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void bm_fpk_forward(benchmark::State& state) {
  ModelParams p;
  const Grid g = Grid::with_cfl_margin(p, static_cast<std::size_t>(state.range(0)));
  const auto I = InterferenceTrajectory::constant(g.n_time, 0.9);
  const auto hjb = solve_hjb_backward(I, g, zero_reward, p);
  const auto m0 = uniform_distribution(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fpk_forward(hjb.policy, m0, g));
  }
}
BENCHMARK(bm_fpk_forward)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void bm_ou_forward(benchmark::State& state) {
  const ChannelGrid grid;
  const double eta = 0.70710678118654752;
  const auto start = stationary_channel_density({0.0, 0.0}, eta, grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ou_fpk_forward({0.0, 0.0}, eta, start, grid, 1.0, 1000));
  }
}
BENCHMARK(bm_ou_forward)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
