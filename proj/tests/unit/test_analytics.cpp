#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stosched/analytics.hpp"
#include "stosched/instance.hpp"
#include "stosched/policies.hpp"

namespace stosched::analytics {
namespace {

TEST(ExpectedCost, OptExamples) {
  EXPECT_DOUBLE_EQ(expected_cost_opt(TypeParams({1.0}, 1)), 1.0);
  EXPECT_DOUBLE_EQ(expected_cost_opt(TypeParams({1.0, 1.0}, 1)), 2.5);
  EXPECT_NEAR(expected_cost_opt(TypeParams({1.0, 2.0}, 2)), 4.0 * (0.75 + 2.0 / 3.0) + 4.5, 1e-12);
  EXPECT_NEAR(expected_cost_opt(TypeParams({2.0, 1.0}, 2)), 10.0 + 1.0 / 6.0, 1e-12);
}

TEST(ExpectedCost, FtppExamples) {
  EXPECT_DOUBLE_EQ(expected_cost_ftpp(TypeParams({1.0}, 1)), 1.0);
  EXPECT_DOUBLE_EQ(expected_cost_ftpp(TypeParams({1.0, 2.0}, 1)), 4.0);
  EXPECT_DOUBLE_EQ(expected_cost_ftpp(TypeParams({2.0, 1.0}, 2)), 13.0);
}

TEST(ExpectedCost, RrExamples) {
  EXPECT_DOUBLE_EQ(expected_cost_rr(TypeParams({3.0}, 1)), 3.0);
  EXPECT_DOUBLE_EQ(expected_cost_rr(TypeParams({1.0, 1.0}, 1)), 3.0);
  for (std::size_t n : {1u, 5u, 20u, 100u}) {
    const double nd = static_cast<double>(n);
    EXPECT_NEAR(cr_rr(TypeParams({1.7}, n)), 2.0 - 4.0 / (nd + 3.0), 1e-12);
  }
}

// Closed form for one type against a direct pairwise evaluation of
// E[sum_i P_i + sum_{i<j} min(P_i, P_j)] for OPT.
TEST(ExpectedCost, OptMatchesPairwiseSum) {
  const std::vector<double> lambdas{0.3, 1.1, 2.5};
  const std::size_t n = 4;
  double expected = 0.0;
  std::vector<double> jobs;
  for (double l : lambdas) {
    for (std::size_t i = 0; i < n; ++i) jobs.push_back(l);
  }
  for (std::size_t a = 0; a < jobs.size(); ++a) {
    expected += jobs[a];
    for (std::size_t b = a + 1; b < jobs.size(); ++b) expected += jobs[a] * jobs[b] / (jobs[a] + jobs[b]);
  }
  EXPECT_NEAR(expected_cost_opt(TypeParams(lambdas, n)), expected, 1e-10);
}

TEST(ExpectedCost, PermutationInvariantAndHomogeneous) {
  const TypeParams a({0.5, 2.0, 1.0}, 7);
  const TypeParams b({2.0, 1.0, 0.5}, 7);
  const TypeParams c({1.5, 6.0, 3.0}, 7);
  EXPECT_DOUBLE_EQ(expected_cost_opt(a), expected_cost_opt(b));
  EXPECT_DOUBLE_EQ(expected_cost_ftpp(a), expected_cost_ftpp(b));
  EXPECT_NEAR(expected_cost_opt(c), 3.0 * expected_cost_opt(a), 1e-9);
  EXPECT_NEAR(expected_cost_ftpp(c), 3.0 * expected_cost_ftpp(a), 1e-9);
  EXPECT_NEAR(expected_cost_rr(c), 3.0 * expected_cost_rr(a), 1e-9);
  EXPECT_NEAR(cr_ftpp_exact(c), cr_ftpp_exact(a), 1e-12);
}

TEST(ExpectedCost, OrderingAndLowerBoundOnGrid) {
  for (double l2 : {1.0, 1.1, 2.0, 5.0, 40.0}) {
    for (double l3 : {0.2, 1.0, 9.0}) {
      for (std::size_t n : {1u, 3u, 50u, 400u}) {
        const TypeParams p({1.0, l2, l3}, n);
        const double nd = static_cast<double>(n);
        EXPECT_LE(expected_cost_ftpp(p), expected_cost_rr(p) * (1 + 1e-12));
        EXPECT_GE(expected_cost_opt(p), nd * nd / 4.0 * p.lambda_sum());
        EXPECT_LE(cr_ftpp_exact(p), cr_ftpp_upper_Ktypes(p.lambdas()) + 1e-12);
      }
    }
  }
}

TEST(CrFtpp, Examples) {
  for (std::size_t n : {1u, 2u, 10u}) {
    const double nd = static_cast<double>(n);
    EXPECT_NEAR(cr_ftpp_exact(TypeParams({4.0}, n)), (nd * nd / 2 + nd / 2) / (nd * nd / 4 + 0.75 * nd), 1e-12);
  }
  EXPECT_DOUBLE_EQ(cr_ftpp_exact(TypeParams({4.0}, 1)), 1.0);
  EXPECT_DOUBLE_EQ(cr_ftpp_upper_2types(1.0), 2.0);
  EXPECT_NEAR(cr_ftpp_upper_2types(3.0), 2.0 - 8.0 / 28.0, 1e-12);
  EXPECT_THROW((void)cr_ftpp_upper_2types(0.5), ParameterError);
  EXPECT_DOUBLE_EQ(cr_ftpp_upper_Ktypes({2.0}), 2.0);
  EXPECT_NEAR(cr_ftpp_upper_Ktypes({1.0, 3.0}), cr_ftpp_upper_2types(3.0), 1e-12);
  EXPECT_NEAR(cr_ftpp_upper_Ktypes({3.0, 1.0}), cr_ftpp_upper_2types(3.0), 1e-12);
}

TEST(CrFtpp, TwoTypeBoundDominatesExactOnGrid) {
  for (double l : {1.0, 1.01, 1.5, 3.0, 10.0, 1000.0}) {
    for (std::size_t n : {1u, 2u, 5u, 50u, 10000u}) {
      EXPECT_LE(cr_ftpp_exact(TypeParams({1.0, l}, n)), cr_ftpp_upper_2types(l) + 1e-12) << l << " " << n;
    }
  }
}

TEST(CrFtpp, ExactTendsToKTypeBoundAsNGrows) {
  const std::vector<double> lambdas{0.1, 0.4, 1.0, 2.2};
  EXPECT_NEAR(cr_ftpp_exact(TypeParams(lambdas, 10000000)), cr_ftpp_upper_Ktypes(lambdas), 1e-6);
}

TEST(Tilde, SmallK) {
  const auto t2 = cr_ftpp_tilde_series(2);
  EXPECT_EQ(t2.lambdas, (std::vector<double>{0.25, 1.0}));
  EXPECT_NEAR(t2.cr, 0.875 / 0.5125, 1e-12);
  const auto t3 = cr_ftpp_tilde_series(3);
  ASSERT_EQ(t3.lambdas.size(), 3u);
  EXPECT_NEAR(t3.lambdas[0], 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(t3.H, 11.0 / 6.0, 1e-15);
  EXPECT_NEAR(t3.B, 49.0 / 36.0, 1e-15);
  EXPECT_NEAR(t3.A, 0.2 + 0.1 + 1.0 / 13.0, 1e-15);
  EXPECT_NEAR(t3.cr, (t3.H - t3.B / 2) / (t3.B / 4 + t3.A), 1e-15);
  EXPECT_NEAR(t3.cr, cr_ftpp_upper_Ktypes(t3.lambdas), 1e-12);
}

TEST(Tilde, PairSumMatchesDirect) {
  for (std::size_t K : {1u, 2u, 3u, 10u, 1000u, 2999u, 3000u, 3001u, 5000u, 12000u}) {
    EXPECT_NEAR(tilde_pair_sum(K), tilde_pair_sum_direct(K), 1e-11 * std::max(1.0, tilde_pair_sum_direct(K)))
        << "K=" << K;
  }
}

TEST(Tilde, SeriesMatchesKTypeBound) {
  for (std::size_t K : {4u, 17u, 200u}) {
    const auto t = cr_ftpp_tilde_series(K);
    EXPECT_NEAR(t.cr, cr_ftpp_upper_Ktypes(t.lambdas), 1e-9) << "K=" << K;
  }
}

TEST(Tilde, DecreasesTowardFourOverPi) {
  double prev = 2.0;
  for (std::size_t K : {2u, 10u, 100u, 1000u, 100000u, 1000000u}) {
    const double cr = cr_ftpp_tilde_series(K, false).cr;
    EXPECT_LT(cr, prev);
    EXPECT_GT(cr, 4.0 / std::numbers::pi);
    prev = cr;
  }
  EXPECT_NEAR(tilde_cr_from_log(std::log(1e6)), cr_ftpp_tilde_series(1000000, false).cr, 1e-9);
  EXPECT_NEAR(tilde_cr_from_log(1e9), 4.0 / std::numbers::pi, 1e-6);
}

TEST(Tilde, GuaranteedBoundDominates) {
  for (double logK : {5.0, 10.0, std::log(1e6), 30.0}) {
    EXPECT_GE(tilde_cr_upper_from_log(logK), tilde_cr_from_log(logK));
  }
  const double target = 1.274;
  const double a = tilde_log_k_reaching(target, false);
  const double g = tilde_log_k_reaching(target, true);
  EXPECT_LE(tilde_cr_from_log(a), target);
  EXPECT_LE(tilde_cr_upper_from_log(g), target);
  EXPECT_GT(tilde_cr_upper_from_log(g * 0.999), target);
  EXPECT_GE(g, a);
}

TEST(UpperBound, EtcUGeneralPlugIn) {
  const TypeParams p({1.0, 1.0}, 50);
  // weights: k=1 -> 0 + 1, k=2 -> 1*2/2 + 0.
  const double expected = expected_cost_opt(p) / 50.0 + 2.0 * 50.0 * std::sqrt(400.0 * std::log(40000.0));
  EXPECT_NEAR(excess_upper_bound(UpperBound::kEtcUGeneral, p), expected, 1e-9);
}

TEST(UpperBound, EtcRRPairPlugIn) {
  const TypeParams p({0.1, 1.0}, 50);
  const double expected =
      2.0 * 50.0 * 0.1 * (std::sqrt(200.0 * std::log(40000.0)) + 1.0) + 16.0 / 50.0 * expected_cost_opt(p);
  EXPECT_NEAR(excess_upper_bound(UpperBound::kEtcRRPair, p), expected, 1e-9);
}

TEST(UpperBound, Preconditions) {
  EXPECT_THROW((void)excess_upper_bound(UpperBound::kUcbRR, TypeParams({1.0, 2.0}, 50), 0.3), BoundNotApplicable);
  EXPECT_THROW((void)excess_upper_bound(UpperBound::kUcbRR, TypeParams({1.0, 2.0}, 50), 0.0), BoundNotApplicable);
  EXPECT_THROW((void)excess_upper_bound(UpperBound::kUcbRR, TypeParams({1.0, 2.0}, 10), 0.01), BoundNotApplicable);
  EXPECT_NO_THROW((void)excess_upper_bound(UpperBound::kUcbRR, TypeParams({1.0, 2.0}, 20), 0.25));
  EXPECT_THROW((void)excess_upper_bound(UpperBound::kEtcUTwoTypes, TypeParams({1.0, 2.0}, 50)), BoundNotApplicable);
  EXPECT_NO_THROW((void)excess_upper_bound(UpperBound::kEtcUTwoTypes, TypeParams({1.0, 3.0}, 50)));
  EXPECT_THROW((void)excess_upper_bound(UpperBound::kEtcUGap, TypeParams({1.0, 1.0}, 50)), BoundNotApplicable);
  EXPECT_THROW((void)excess_upper_bound(UpperBound::kEtcRRPair, TypeParams({1.0, 2.0, 3.0}, 50)), BoundNotApplicable);
}

TEST(UpperBound, AllFiniteAndPositiveWhenApplicable) {
  const TypeParams p({1.0, 4.0}, 50);
  for (auto kind : all_upper_bounds()) {
    const double v = excess_upper_bound(kind, p, 0.01);
    EXPECT_TRUE(std::isfinite(v)) << to_string(kind);
    EXPECT_GT(v, 0.0) << to_string(kind);
    EXPECT_EQ(parse_upper_bound(to_string(kind)), kind);
  }
  EXPECT_THROW((void)parse_upper_bound("nope"), ParameterError);
}

TEST(LowerBound, Examples) {
  EXPECT_EQ(excess_lower_bound(LowerBound::kSmallGap, TypeParams({1.0, 1.0}, 30)), 0.0);
  EXPECT_EQ(excess_lower_bound(LowerBound::kLargeGap, TypeParams({1.0, 1.0}, 30)), 0.0);
  EXPECT_DOUBLE_EQ(excess_lower_bound(LowerBound::kLargeGap, TypeParams({3.0, 1.0}, 30)), 30.0);
  EXPECT_DOUBLE_EQ(excess_lower_bound(LowerBound::kLargeGapTwoTypes, TypeParams({1.0, 3.0}, 30)), 30.0);
  const double sg = excess_lower_bound(LowerBound::kSmallGap, TypeParams({1.0, 1.2}, 20));
  EXPECT_NEAR(sg, 0.2 * 400.0 * std::exp(-20.0 * 0.04 / 1.2) / 8.0, 1e-12);
  // lambda_2 = 1 + 1/sqrt(100) sits on the boundary of the sqrt-n range.
  EXPECT_NEAR(excess_lower_bound(LowerBound::kSmallGapSqrtN, TypeParams({1.0, 1.1}, 100)),
              2.1 * 1000.0 * std::exp(-0.25) / 24.0, 1e-9);
  EXPECT_THROW((void)excess_lower_bound(LowerBound::kSmallGapSqrtN, TypeParams({1.0, 1.5}, 100)), BoundNotApplicable);
  EXPECT_THROW((void)excess_lower_bound(LowerBound::kSmallGap, TypeParams({1.0, 1.5, 2.0}, 100)), BoundNotApplicable);
}

TEST(Decomposition, FtppIsZeroAndReverseIsFull) {
  const TypeParams p({2.0, 0.5, 1.0}, 6);
  const auto inst = sample_instance(p, 4);
  EXPECT_EQ(nonpreemptive_excess_decomposition(run_policy(PolicyKind::kFtpp, inst), p), 0.0);
  auto order = ftpp_order(p);
  std::reverse(order.begin(), order.end());
  // Reverse order: every pair (k, l) with lambda_k > lambda_l is fully inverted.
  const double full = 36.0 * ((2.0 - 0.5) + (2.0 - 1.0) + (1.0 - 0.5));
  EXPECT_DOUBLE_EQ(nonpreemptive_excess_decomposition(run_sequence(inst, order), p), full);
}

TEST(Decomposition, SingleTypeIsZero) {
  const TypeParams p({1.0}, 8);
  EXPECT_EQ(nonpreemptive_excess_decomposition(run_policy(PolicyKind::kOpt, sample_instance(p, 1)), p), 0.0);
}

TEST(Decomposition, TypewiseAddsSlack) {
  const TypeParams p({1.0, 2.0}, 5);
  const auto trace = run_policy(PolicyKind::kFtpp, sample_instance(p, 2));
  EXPECT_DOUBLE_EQ(typewise_excess_decomposition(trace, p), 5.0 * 3.0);
  EXPECT_THROW((void)nonpreemptive_excess_decomposition(trace, TypeParams({1.0, 2.0}, 6)), ParameterError);
}

// Monte-Carlo identity at small scale; the acceptance suite runs the large one.
TEST(Decomposition, MatchesMeanExcessForEtcU) {
  const TypeParams p({1.0, 2.0}, 10);
  const int seeds = 20000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const auto trace = run_policy(PolicyKind::kEtcU, sample_instance(p, static_cast<std::uint64_t>(s)));
    const double d = trace.flow_time - expected_cost_ftpp(p) - nonpreemptive_excess_decomposition(trace, p);
    sum += d;
    sum_sq += d * d;
  }
  const double mean = sum / seeds;
  const double se = std::sqrt((sum_sq / seeds - mean * mean) / (seeds - 1));
  EXPECT_LT(std::abs(mean), 4.0 * se);
}

}  // namespace
}  // namespace stosched::analytics
