#include <benchmark/benchmark.h>

#include <vector>

#include "chordiag/experiment.hpp"
#include "chordiag/metrics.hpp"
#include "chordiag/suggest.hpp"

using namespace chordiag;

namespace {

std::vector<Transition> sample_corpus() {
  const char* shapes[][2] = {{"Am", "x.0.2.2.1.0"}, {"F", "1.3.3.2.1.1"}, {"C", "x.3.2.0.1.0"},
                             {"G", "3.2.0.0.0.3"},  {"Dm", "x.5.7.7.6.5"}, {"A", "5.7.7.6.5.5"}};
  std::vector<Transition> out;
  for (int round = 0; round < 20; ++round) {
    for (auto& a : shapes) {
      for (auto& b : shapes) {
        out.push_back({parse_label(a[0]), parse_fingering(a[1]), parse_label(b[0]), parse_fingering(b[1]),
                       "bench-" + std::to_string(round)});
      }
    }
  }
  return out;
}

void BM_ForwardFull(benchmark::State& state) {
  const auto model = SuggestionModel::create(Topology::Full, TrainConfig{});
  const auto input = full_input(parse_fingering("x.0.2.2.1.0"), parse_label("F"));
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(input));
}
BENCHMARK(BM_ForwardFull);

void BM_Suggest(benchmark::State& state) {
  const auto model = SuggestionModel::create(Topology::Full, TrainConfig{});
  const auto prev = parse_fingering("x.0.2.2.1.0");
  const auto label = parse_label("F");
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(suggest(model, label, prev, k));
}
BENCHMARK(BM_Suggest)->Arg(1)->Arg(5)->Arg(25);

void BM_AssignFingering(benchmark::State& state) {
  const auto d = parse_fingering("1.3.3.2.1.1");
  for (auto _ : state) benchmark::DoNotOptimize(assign_fingering(d));
}
BENCHMARK(BM_AssignFingering);

void BM_ChordChangeEase(benchmark::State& state) {
  const auto a = parse_fingering("5.7.7.5.5.5"), b = parse_fingering("x.8.10.10.10.8");
  for (auto _ : state) benchmark::DoNotOptimize(chord_change_ease(a, b));
}
BENCHMARK(BM_ChordChangeEase);

void BM_TrainEpoch(benchmark::State& state) {
  const auto corpus = sample_corpus();
  const auto pairs = encode_transitions(corpus, Topology::Full);
  TrainConfig cfg;
  cfg.max_epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(Topology::Full, pairs, pairs, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
