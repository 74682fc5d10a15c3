#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "wdflow/corpus.hpp"
#include "wdflow/flowparse.hpp"
#include "wdflow/metrics.hpp"
#include "wdflow/stepmatch.hpp"
#include "wdflow/taskcast.hpp"

namespace {

using namespace wdflow;

const StepDomain& abcd() {
  static const StepDomain d = builtin_domain("abcd");
  return d;
}

Dialogue synthetic_dialogue(std::size_t steps, std::size_t turns) {
  Dialogue d;
  d.id = "bench";
  for (std::size_t i = 0; i < turns; ++i)
    d.utterances.push_back({i % 2 ? Speaker::kAgent : Speaker::kCustomer, "could you help me with my order please"});
  Workflow wf;
  for (std::size_t i = 0; i < steps; ++i) {
    const auto& e = abcd().entries()[i % abcd().size()];
    wf.steps.push_back({e.name, e.description, {"value " + std::to_string(i)}});
  }
  d.gold_workflow = wf;
  return d;
}

void BM_CastWD(benchmark::State& state) {
  const auto d = synthetic_dialogue(static_cast<std::size_t>(state.range(0)), 40);
  CastConfig cfg;
  cfg.include_domain = true;
  cfg.shuffle_seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(cast_wd(d, &abcd(), cfg));
}
BENCHMARK(BM_CastWD)->Arg(2)->Arg(8)->Arg(32);

void BM_ParseWD(benchmark::State& state) {
  const auto target = cast_wd(synthetic_dialogue(static_cast<std::size_t>(state.range(0)), 4), &abcd(), {}).target_text;
  for (auto _ : state) benchmark::DoNotOptimize(parse_wd(target));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) * static_cast<int64_t>(target.size()));
}
BENCHMARK(BM_ParseWD)->Arg(2)->Arg(8)->Arg(32);

void BM_CascadingEval(benchmark::State& state) {
  const auto d = synthetic_dialogue(static_cast<std::size_t>(state.range(0)), 4);
  const auto gold = gold_steps(*d.gold_workflow, false);
  const auto pred = parse_wd(cast_wd(d, &abcd(), {}).target_text);
  MatchConfig cfg;
  cfg.compare_values = true;
  for (auto _ : state) benchmark::DoNotOptimize(cascading_eval(pred, gold, cfg));
}
BENCHMARK(BM_CascadingEval)->Arg(4)->Arg(16);

void BM_Normalize(benchmark::State& state) {
  const std::string s = "Offering the customers a promotional code after verifying their identities";
  for (auto _ : state) benchmark::DoNotOptimize(normalize(s));
}
BENCHMARK(BM_Normalize);

}  // namespace

BENCHMARK_MAIN();
