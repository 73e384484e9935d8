// Serial reference loops against their OpenMP versions on one random system.

#include <benchmark/benchmark.h>

#include <random>

#include "nif/kernels.hpp"
#include "nif/model.hpp"
#include "nif/unwinding.hpp"

namespace {

using namespace nif;

PolicyEnhancedSystem make_system(unsigned seed) {
  std::mt19937 rng(seed);
  const std::size_t nd = 3, na = 5, ns = 12;
  Signature sig({"A", "B", "C"}, {{"a", "A"}, {"b", "B"}, {"c", "C"}, {"d", "A"}, {"f", "B"}});
  std::uniform_int_distribution<std::size_t> state(0, ns - 1);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::string> names;
  for (std::size_t s = 0; s < ns; ++s) names.push_back("s" + std::to_string(s));
  std::vector<StateId> delta;
  for (std::size_t i = 0; i < ns * na; ++i) delta.push_back(make_id<StateId>(state(rng)));
  std::vector<std::vector<std::string>> obs(ns, std::vector<std::string>(nd));
  std::vector<EdgeSet> edges;
  for (std::size_t s = 0; s < ns; ++s) {
    for (auto& o : obs[s]) o = coin(rng) ? "1" : "0";
    EdgeSet e(nd);
    for (std::size_t u = 0; u < nd; ++u)
      for (std::size_t v = 0; v < nd; ++v)
        if (coin(rng)) e.add(make_id<DomainId>(u), make_id<DomainId>(v));
    edges.push_back(e);
  }
  return PolicyEnhancedSystem(Automaton(sig, names, StateId{}, delta), obs, edges);
}

struct Fixture {
  PolicyEnhancedSystem sys = make_system(17);
  TraceSpace space{sys, 7};
  UnwindingResult unw = unwinding_partition(space);
  std::vector<std::uint32_t> keys;
  std::vector<StateId> starts;

  Fixture() {
    for (std::size_t i = 0; i < space.size(); ++i)
      keys.push_back(static_cast<std::uint32_t>(idx(sys.obs(make_id<DomainId>(0), space.state(make_id<TraceId>(i))))));
    for (std::size_t s = 0; s < sys.state_count(); ++s) starts.push_back(make_id<StateId>(s));
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

Exec exec_of(const benchmark::State& st) { return st.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_StatesFrom(benchmark::State& st) {
  auto& f = fixture();
  for (auto _ : st) benchmark::DoNotOptimize(states_from(f.space, f.sys.initial(), exec_of(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.space.size()));
}

void BM_ClassConflicts(benchmark::State& st) {
  auto& f = fixture();
  const auto& part = f.unw.partition(make_id<DomainId>(0));
  for (auto _ : st) benchmark::DoNotOptimize(class_conflicts(part, f.keys, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.keys.size()));
}

void BM_LpurgeFailures(benchmark::State& st) {
  auto& f = fixture();
  const TraceSpace small(f.sys, 5);
  for (auto _ : st) benchmark::DoNotOptimize(lpurge_failures(small, exec_of(st)));
}

void BM_IsecScan(benchmark::State& st) {
  auto& f = fixture();
  const TraceSpace small(f.sys, 4);
  for (auto _ : st) benchmark::DoNotOptimize(isec_scan(small, f.starts, exec_of(st)));
}

}  // namespace

// Argument 0 runs the serial reference, 1 the OpenMP loop.
BENCHMARK(BM_StatesFrom)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClassConflicts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LpurgeFailures)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IsecScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
