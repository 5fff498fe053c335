#include <benchmark/benchmark.h>

#include "socs/flows.hpp"
#include "socs/packet.hpp"
#include "socs/split_operator.hpp"

namespace {

using namespace socs;

Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

void BM_SpinExponential(benchmark::State& state) {
  const SpinRep rep(0.5 * state.range(0));
  const Vec3 axis = Vec3(0.3, -0.4, 0.5).normalized();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rep_exponential(rep, axis, 0.37));
  }
}
BENCHMARK(BM_SpinExponential)->Arg(1)->Arg(8)->Arg(32);

void BM_IntegrateFlow(benchmark::State& state) {
  auto model = builtin({"quartic_perturbed", {{"eps", 0.02}, {"c1", 0.3}}});
  Vec z0(2);
  z0 << 1.0, 0.0;
  const SpinDirection n0(Vec3(1, 0, 0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        integrate_flow(model, FlowKind::make_skew(), z0, n0, state.range(0), {}));
  }
}
BENCHMARK(BM_IntegrateFlow)->Arg(1)->Arg(10);

void BM_SplitStep(benchmark::State& state) {
  const double hbar = 0.05;
  auto model = builtin({"quartic_perturbed", {{"c1", 0.3}}});
  const SpinRep rep(0.5 * state.range(1));
  auto packet = make_packet(vec1(0.5), vec1(0.0), SiegelMatrix::i_identity(1), hbar,
                            make_spin_state(rep, SpinDirection(Vec3(1, 0, 0))));
  const Grid grid({GridAxis{-4, 4, static_cast<int>(state.range(0))}});
  const GridState psi0 = evaluate_packet(packet, grid);
  PropagatorConfig config;
  config.dt = 1e-3;
  SplitStepPropagator prop(model, grid, hbar, rep.two_s(), config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prop.propagate(psi0, 0.1));
  }
  state.SetItemsProcessed(state.iterations() * 100); // steps per run
}
BENCHMARK(BM_SplitStep)->Args({1024, 1})->Args({4096, 1})->Args({1024, 16});

void BM_EvaluatePacket(benchmark::State& state) {
  const SpinRep rep(0.5);
  auto packet = make_packet(vec1(0.0), vec1(0.0), SiegelMatrix::i_identity(1), 0.05,
                            make_spin_state(rep, SpinDirection(Vec3(0, 0, 1))));
  const Grid grid({GridAxis{-4, 4, static_cast<int>(state.range(0))}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_packet(packet, grid));
  }
}
BENCHMARK(BM_EvaluatePacket)->Arg(1024)->Arg(4096);

} // namespace

BENCHMARK_MAIN();
