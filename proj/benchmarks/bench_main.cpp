#include <benchmark/benchmark.h>

#include <random>

#include "gsnassure/dsl.hpp"
#include "gsnassure/evaluation.hpp"
#include "gsnassure/simulator.hpp"
#include "support/random_graph.hpp"

namespace {

gsn::ArgumentGraph graph_of_size(int nodes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  gsn::test::GenOptions opt;
  opt.min_nodes = nodes;
  opt.max_nodes = nodes;
  opt.nasty_statements = false;
  return gsn::test::random_graph(rng, opt);
}

void BM_Evaluate(benchmark::State& state) {
  gsn::ArgumentGraph g = graph_of_size(static_cast<int>(state.range(0)), 9001);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gsn::evaluate(g));
  }
}
BENCHMARK(BM_Evaluate)->Arg(32)->Arg(128)->Arg(512);

void BM_IncrementalReevaluate(benchmark::State& state) {
  std::mt19937_64 rng(9002);
  gsn::ArgumentGraph base = graph_of_size(static_cast<int>(state.range(0)), 9003);
  gsn::StatusAssignment prior = gsn::evaluate(base);
  gsn::ChangeSet cs = gsn::test::random_changeset(rng, base, 3);
  for (auto _ : state) {
    state.PauseTiming();
    gsn::ArgumentGraph g = base;
    state.ResumeTiming();
    benchmark::DoNotOptimize(gsn::apply_and_reevaluate(g, prior, cs));
  }
}
BENCHMARK(BM_IncrementalReevaluate)->Arg(128)->Arg(512);

void BM_ParsePrintRoundTrip(benchmark::State& state) {
  gsn::ArgumentGraph g = graph_of_size(static_cast<int>(state.range(0)), 9004);
  std::string text = gsn::print(g);
  for (auto _ : state) {
    gsn::ParseResult r = gsn::parse(text);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ParsePrintRoundTrip)->Arg(32)->Arg(256);

void BM_CanonicalPrint(benchmark::State& state) {
  gsn::ArgumentGraph g = graph_of_size(static_cast<int>(state.range(0)), 9005);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gsn::print(g));
  }
}
BENCHMARK(BM_CanonicalPrint)->Arg(256);

void BM_Simulation(benchmark::State& state) {
  gsn::SimConfig config;
  config.layers.push_back(
      {gsn::Layer::L2_InputDetection, {{gsn::AttackClass::Jailbreak, 0.5}}});
  config.layers.push_back(
      {gsn::Layer::L4_OutputDetection, {{gsn::AttackClass::Jailbreak, 0.5}}});
  config.traffic[gsn::AttackClass::Jailbreak] = static_cast<std::uint64_t>(state.range(0));
  config.consequence_distribution[gsn::ConsequenceClass::None] = 1.0;
  config.seed = 9006;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gsn::run_simulation(config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulation)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
