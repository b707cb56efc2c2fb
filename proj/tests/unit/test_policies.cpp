#include <gtest/gtest.h>

#include <cmath>

#include "stosched/analytics.hpp"
#include "stosched/instance.hpp"
#include "stosched/policies.hpp"

namespace stosched {
namespace {

Instance constant_columns(std::vector<double> values, std::size_t n) {
  std::vector<double> sizes;
  for (std::size_t i = 0; i < n; ++i) sizes.insert(sizes.end(), values.begin(), values.end());
  return Instance(TypeParams(values, n), 0, std::move(sizes));
}

std::vector<TypeIndex> type_sequence(const RunTrace& trace) {
  std::vector<TypeIndex> out;
  for (const auto& job : trace.completion_order) out.push_back(job.type);
  return out;
}

TEST(Names, RoundTrip) {
  for (auto kind : all_policies()) EXPECT_EQ(parse_policy(policy_name(kind)), kind);
  EXPECT_THROW((void)parse_policy("sept"), ParameterError);
  EXPECT_EQ(all_policies().size(), 8u);
  EXPECT_TRUE(is_preemptive(PolicyKind::kUcbRR));
  EXPECT_FALSE(is_preemptive(PolicyKind::kLsept));
}

TEST(Opt, OrderAndTies) {
  const Instance inst(TypeParams({1.0, 1.0}, 1), 0, {3.0, 1.0});
  EXPECT_EQ(opt_order(inst), (std::vector<JobId>{{1, 0}, {0, 0}}));
  const Instance ties(TypeParams({1.0, 1.0}, 2), 0, {1.0, 1.0, 1.0, 1.0});
  EXPECT_EQ(opt_order(ties), (std::vector<JobId>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST(Ftpp, OrderByLambda) {
  EXPECT_EQ(ftpp_order(TypeParams({2.0, 1.0}, 2)), (std::vector<JobId>{{1, 0}, {1, 1}, {0, 0}, {0, 1}}));
  const auto trace = run_policy(PolicyKind::kFtpp, sample_instance(TypeParams({2.0, 0.5, 1.0}, 4), 3));
  EXPECT_EQ(type_sequence(trace), (std::vector<TypeIndex>{1, 1, 1, 1, 2, 2, 2, 2, 0, 0, 0, 0}));
  const auto counts = inversion_counts(trace);
  EXPECT_EQ(counts[0 * 3 + 1] + counts[0 * 3 + 2] + counts[2 * 3 + 1], 0u);
}

TEST(EtcU, CraftedEliminationTime) {
  // Type 0 always wins the same-rank comparison. r_hat = 1 and
  // delta = sqrt(ln 40000 / (2m)) drops below 1/2 first at m = 22.
  const auto inst = constant_columns({1.0, 2.0}, 50);
  EtcUPolicy policy(50, 2);
  const auto trace = run_nonpreemptive(inst, policy);
  std::vector<TypeIndex> expected;
  for (int i = 0; i < 22; ++i) expected.insert(expected.end(), {0, 1});
  expected.insert(expected.end(), 28, 0);
  expected.insert(expected.end(), 28, 1);
  EXPECT_EQ(type_sequence(trace), expected);
  EXPECT_FALSE(policy.candidate(0) && policy.candidate(1));
}

TEST(EtcU, QuarticConstantEliminatesLater) {
  // ln(2 * 2500 * 16) / (2m) < 1/4 needs m >= 23.
  const auto inst = constant_columns({1.0, 2.0}, 50);
  EtcUPolicy policy(50, 2, stats::HoeffdingConstant::kQuartic);
  const auto seq = type_sequence(run_nonpreemptive(inst, policy));
  EXPECT_EQ(seq[44], 0u);
  EXPECT_EQ(seq[45], 1u);
  EXPECT_EQ(seq[46], 0u);
  EXPECT_EQ(seq[72], 0u);
  EXPECT_EQ(seq[73], 1u);
}

TEST(EtcU, EqualSizesNeverEliminate) {
  const auto inst = constant_columns({1.0, 1.0}, 30);
  EtcUPolicy policy(30, 2);
  const auto seq = type_sequence(run_nonpreemptive(inst, policy));
  for (std::size_t i = 0; i < seq.size(); ++i) EXPECT_EQ(seq[i], i % 2);
}

TEST(UcbU, TriesEveryTypeFirst) {
  const auto trace = run_policy(PolicyKind::kUcbU, sample_instance(TypeParams({3.0, 1.0, 2.0, 0.1}, 10), 2));
  EXPECT_EQ(type_sequence(trace).at(0), 0u);
  auto first = type_sequence(trace);
  first.resize(4);
  EXPECT_EQ(first, (std::vector<TypeIndex>{0, 1, 2, 3}));
}

TEST(UcbU, IndexValues) {
  const Instance inst(TypeParams({1.0, 3.0}, 2), 0, {1.0, 3.0, 1.0, 3.0});
  UcbUPolicy policy(2, 2);
  EXPECT_EQ(policy.index(0), 0.0);
  const auto trace = run_nonpreemptive(inst, policy);
  // After both jobs of each type: 2 * 2 / chi2_4(1 - 1/32).
  EXPECT_NEAR(policy.index(0), 4.0 / stats::chi2_quantile(4, 1.0 - 1.0 / 32.0), 1e-12);
  EXPECT_EQ(type_sequence(trace), (std::vector<TypeIndex>{0, 1, 0, 1}));
}

TEST(UcbU, IndexAfterOneJob) {
  const Instance inst(TypeParams({1.0, 3.0}, 2), 0, {1.0, 3.0, 1.0, 3.0});
  UcbUPolicy policy(2, 2);
  Observation obs(2, 2);
  policy.on_completion(obs, 0, 1.0);
  policy.on_completion(obs, 1, 3.0);
  EXPECT_NEAR(policy.index(0), 0.288539, 1e-6);
  EXPECT_NEAR(policy.index(1), 0.865617, 1e-6);
}

TEST(EtcRR, CraftedEliminationTime) {
  const auto inst = constant_columns({1.0, 100.0}, 50);
  EtcRRPolicy policy(50, 2);
  const auto trace = run_processor_sharing(inst, policy);
  EXPECT_EQ(policy.beta(0, 1), 22u);
  EXPECT_EQ(policy.beta(1, 0), 0u);
  EXPECT_DOUBLE_EQ(trace.end_of(21, 0), 44.0);
  EXPECT_DOUBLE_EQ(trace.end_of(22, 0), 45.0);
  EXPECT_DOUBLE_EQ(trace.end_of(49, 0), 72.0);
  EXPECT_DOUBLE_EQ(trace.end_of(0, 1), 150.0);
  EXPECT_TRUE(is_typewise_nonpreemptive(trace));
}

TEST(EtcRR, RaceProbability) {
  // Both types share the machine first; type 0 wins with prob lambda_1/(lambda_0+lambda_1).
  const TypeParams p({1.0, 3.0}, 1);
  const int trials = 100000;
  int wins = 0;
  for (int s = 0; s < trials; ++s) {
    const auto trace = run_policy(PolicyKind::kEtcRR, sample_instance(p, static_cast<std::uint64_t>(s)));
    wins += trace.completion_order.front().type == 0 ? 1 : 0;
  }
  const double rate = static_cast<double>(wins) / trials;
  EXPECT_NEAR(rate, 0.75, 3.0 * std::sqrt(0.75 * 0.25 / trials));
}

TEST(UcbRR, CountsAreConsistent) {
  const auto inst = sample_instance(TypeParams({1.0, 0.25, 0.5}, 30), 6);
  UcbRRPolicy policy(30, 3);
  EXPECT_EQ(policy.index(1), 1.0);
  const auto trace = run_slotted(inst, policy, 0.01);
  for (TypeIndex k = 0; k < 3; ++k) {
    EXPECT_LE(policy.successes(k), 30u);
    EXPECT_GE(policy.pulls(k), policy.successes(k));
  }
  EXPECT_TRUE(is_typewise_nonpreemptive(trace));
  EXPECT_LT(max_processing_error(trace, inst), 1e-9);
}

TEST(UcbRR, PrefersShorterType) {
  // With a 40x gap, most work of the long type comes last.
  const TypeParams p({2.0, 0.05}, 50);
  const auto trace = run_policy(PolicyKind::kUcbRR, sample_instance(p, 3));
  std::size_t short_done_before_half = 0;
  for (std::size_t i = 0; i < 50; ++i) short_done_before_half += trace.completion_order[i].type == 1 ? 1 : 0;
  EXPECT_GE(short_done_before_half, 40u);
}

TEST(Lsept, TriesEveryTypeThenGreedy) {
  const Instance inst(TypeParams({1.0, 1.0}, 3), 0, {0.5, 2.0, 0.5, 2.0, 0.5, 2.0});
  const auto trace = run_policy(PolicyKind::kLsept, inst);
  EXPECT_EQ(type_sequence(trace), (std::vector<TypeIndex>{0, 1, 0, 0, 1, 1}));
}

class AllPolicies : public ::testing::TestWithParam<PolicyKind> {};

TEST_P(AllPolicies, CompletesEveryJobExactly) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = sample_instance(TypeParams({0.3, 1.0, 2.5}, 15), seed);
    const auto trace = run_policy(GetParam(), inst);
    ASSERT_EQ(trace.completion_order.size(), 45u);
    EXPECT_LT(max_processing_error(trace, inst), 1e-9);
    for (std::size_t j = 0; j < trace.end.size(); ++j) ASSERT_LE(trace.begin[j], trace.end[j]);
    if (GetParam() != PolicyKind::kOpt && GetParam() != PolicyKind::kRR) {
      EXPECT_TRUE(is_typewise_nonpreemptive(trace));
    }
    EXPECT_GE(trace.flow_time, run_policy(PolicyKind::kOpt, inst).flow_time * (1 - 1e-12));
  }
}

TEST_P(AllPolicies, Deterministic) {
  const auto inst = sample_instance(TypeParams({0.5, 1.0}, 40), 77);
  EXPECT_EQ(run_policy(GetParam(), inst), run_policy(GetParam(), inst));
}

TEST_P(AllPolicies, ScaleEquivariant) {
  if (GetParam() == PolicyKind::kUcbRR) GTEST_SKIP() << "slot length sets an absolute scale";
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = sample_instance(TypeParams({0.5, 1.0, 0.8}, 25), seed);
    const auto a = run_policy(GetParam(), inst);
    const auto b = run_policy(GetParam(), inst.scaled(4.0));
    EXPECT_EQ(a.completion_order, b.completion_order);
    EXPECT_NEAR(b.flow_time, 4.0 * a.flow_time, 1e-9 * b.flow_time);
  }
}

TEST_P(AllPolicies, SingleJob) {
  const Instance inst(TypeParams({1.0}, 1), 0, {2.5});
  EXPECT_DOUBLE_EQ(run_policy(GetParam(), inst).flow_time, 2.5);
}

INSTANTIATE_TEST_SUITE_P(Policies, AllPolicies, ::testing::ValuesIn(all_policies()),
                         [](const auto& info) {
                           std::string name(policy_name(info.param));
                           std::erase(name, '-');
                           return name;
                         });

}  // namespace
}  // namespace stosched
