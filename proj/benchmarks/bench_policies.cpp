#include <benchmark/benchmark.h>

#include "stosched/instance.hpp"
#include "stosched/policies.hpp"

namespace {

using stosched::PolicyKind;

void run(benchmark::State& state, PolicyKind kind, std::vector<double> lambdas) {
  const stosched::TypeParams params(std::move(lambdas), static_cast<std::size_t>(state.range(0)));
  const auto instance = stosched::sample_instance(params, 7);
  for (auto _ : state) {
    auto trace = stosched::run_policy(kind, instance);
    benchmark::DoNotOptimize(trace.flow_time);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(params.num_jobs()));
}

void BM_Opt(benchmark::State& s) { run(s, PolicyKind::kOpt, {1.0, 0.25}); }
void BM_Ftpp(benchmark::State& s) { run(s, PolicyKind::kFtpp, {1.0, 0.25}); }
void BM_RR(benchmark::State& s) { run(s, PolicyKind::kRR, {1.0, 0.25}); }
void BM_EtcU(benchmark::State& s) { run(s, PolicyKind::kEtcU, {1.0, 0.25}); }
void BM_UcbU(benchmark::State& s) { run(s, PolicyKind::kUcbU, {1.0, 0.25}); }
void BM_EtcRR(benchmark::State& s) { run(s, PolicyKind::kEtcRR, {1.0, 0.25}); }
void BM_UcbRR(benchmark::State& s) { run(s, PolicyKind::kUcbRR, {1.0, 0.25}); }
void BM_EtcUTenTypes(benchmark::State& s) {
  run(s, PolicyKind::kEtcU, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
}
void BM_EtcRRTenTypes(benchmark::State& s) {
  run(s, PolicyKind::kEtcRR, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
}

BENCHMARK(BM_Opt)->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_Ftpp)->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_RR)->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_EtcU)->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_UcbU)->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_EtcRR)->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_UcbRR)->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(BM_EtcUTenTypes)->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(BM_EtcRRTenTypes)->RangeMultiplier(4)->Range(16, 256);

}  // namespace
