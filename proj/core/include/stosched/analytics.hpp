#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stosched/engine.hpp"
#include "stosched/types.hpp"

namespace stosched::analytics {

/// Raised when a bound is evaluated outside the parameters it holds for.
class BoundNotApplicable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Expected costs. All formulas sort lambda ascending internally.

[[nodiscard]] double expected_cost_opt(const TypeParams& params);
[[nodiscard]] double expected_cost_ftpp(const TypeParams& params);
/// 2 E[C_OPT] - n sum(lambda).
[[nodiscard]] double expected_cost_rr(const TypeParams& params);

[[nodiscard]] double cr_ftpp_exact(const TypeParams& params);
[[nodiscard]] double cr_rr(const TypeParams& params);

/// 2 - 4 (l - 1) / ((1 + l)^2 + 4 l) for two types with ratio l = lambda_2 / lambda_1 >= 1.
[[nodiscard]] double cr_ftpp_upper_2types(double lambda_ratio);
/// f_K(lambda) of the K-type bound CR_FTPP <= 2 - f_K.
[[nodiscard]] double ftpp_bound_fk(const std::vector<double>& lambdas);
[[nodiscard]] double cr_ftpp_upper_Ktypes(const std::vector<double>& lambdas);

// The lambda~_k = 1 / (K - k + 1)^2 family.

[[nodiscard]] double harmonic_number(std::size_t K);
/// B_K = sum_{k<=K} 1/k^2.
[[nodiscard]] double inverse_square_sum(std::size_t K);
/// A_K = sum_{1<=i<j<=K} 1/(i^2 + j^2). Exact summation up to a cutoff, an
/// Euler-Maclaurin expansion of the inner sum beyond it.
[[nodiscard]] double tilde_pair_sum(std::size_t K);
/// Brute-force double loop for A_K; O(K^2), used as a reference.
[[nodiscard]] double tilde_pair_sum_direct(std::size_t K);
[[nodiscard]] std::vector<double> tilde_lambdas(std::size_t K);

struct TildeSeries {
  std::size_t K = 0;
  double H = 0.0;
  double B = 0.0;
  double A = 0.0;
  /// (H - B/2) / (B/4 + A), the large-n CR of FTPP on lambda~.
  double cr = 0.0;
  std::vector<double> lambdas;
};

[[nodiscard]] TildeSeries cr_ftpp_tilde_series(std::size_t K, bool with_lambdas = true);

/// The same ratio for K too large to enumerate, given ln K. Uses the exact
/// sums up to the summation cutoff and asymptotic tails beyond it.
[[nodiscard]] double tilde_cr_from_log(double log_K);

/// Guaranteed upper bound on the lambda~ ratio from
/// A_K >= (pi/4) H_K - (3/4) B_K, H_K >= ln K and B_K <= pi^2/6.
[[nodiscard]] double tilde_cr_upper_from_log(double log_K);

/// Smallest ln K (to 1e-6 relative) at which f(ln K) <= target, f decreasing.
[[nodiscard]] double tilde_log_k_reaching(double target, bool guaranteed);

// Excess bounds: value of E[C_A] - E[C_FTPP] allowed by each statement.

enum class UpperBound {
  kEtcUGeneral,
  kEtcUGap,
  kUcbUGeneral,
  kUcbUGap,
  kEtcUTwoTypes,  // lambda_2 >= 3 lambda_1
  kUcbUTwoTypes,  // lambda_2 >= 3 lambda_1
  kEtcRR,
  kUcbRR,         // delta <= lambda_1/4, n >= max(20, 10 ln K)
  kEtcUPair,      // two-type instantiation for ETC-U
  kEtcRRPair,     // two-type instantiation for ETC-RR
};

enum class LowerBound {
  kSmallGap,      // K = 2
  kSmallGapSqrtN, // K = 2, lambda_2 <= lambda_1 (1 + 1/sqrt n)
  kLargeGap,
  kLargeGapTwoTypes,  // K = 2, lambda_2 >= 3 lambda_1
};

[[nodiscard]] double excess_upper_bound(UpperBound kind, const TypeParams& params, double delta = 0.0);
[[nodiscard]] double excess_lower_bound(LowerBound kind, const TypeParams& params);

[[nodiscard]] std::string_view to_string(UpperBound kind);
[[nodiscard]] std::string_view to_string(LowerBound kind);
[[nodiscard]] UpperBound parse_upper_bound(std::string_view name);
[[nodiscard]] LowerBound parse_lower_bound(std::string_view name);
[[nodiscard]] const std::vector<UpperBound>& all_upper_bounds();
[[nodiscard]] const std::vector<LowerBound>& all_lower_bounds();

/// sum over type pairs with lambda_k > lambda_l of (lambda_k - lambda_l) times
/// #{(i, j): e_j^k <= b_i^l}. Its expectation is E[C_A] - E[C_FTPP] for
/// non-preemptive A.
[[nodiscard]] double nonpreemptive_excess_decomposition(const RunTrace& trace, const TypeParams& params);

/// Strict-inequality counts plus (K - 1) n sum(lambda); its expectation
/// bounds E[C_A] - E[C_FTPP] for type-wise non-preemptive A.
[[nodiscard]] double typewise_excess_decomposition(const RunTrace& trace, const TypeParams& params);

}  // namespace stosched::analytics
