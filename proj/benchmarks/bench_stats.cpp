#include <benchmark/benchmark.h>

#include "stosched/analytics.hpp"
#include "stosched/stats.hpp"

namespace {

void BM_Chi2Quantile(benchmark::State& state) {
  const double p = 1.0 - 1.0 / (2.0 * 100.0 * 100.0 * 4.0);
  std::size_t dof = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stosched::stats::chi2_quantile(static_cast<double>(dof), p));
    dof = dof >= 400 ? 2 : dof + 2;
  }
}
BENCHMARK(BM_Chi2Quantile);

void BM_KlucbIndex(benchmark::State& state) {
  const double bonus = stosched::stats::klucb_bonus(100, 2, stosched::stats::KlucbBonus::kLogN2K2);
  std::uint64_t pulls = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stosched::stats::klucb_index(0.01, pulls, bonus));
    pulls = pulls >= 100000 ? 1 : pulls * 3 + 1;
  }
}
BENCHMARK(BM_KlucbIndex);

void BM_TildePairSum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(stosched::analytics::tilde_pair_sum(n));
  }
}
BENCHMARK(BM_TildePairSum)->Arg(100)->Arg(3000)->Arg(1000000);

}  // namespace
