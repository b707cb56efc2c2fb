#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace stosched::stats {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Which confidence constant the elimination radius uses: log(2 n^2 K^3)
/// (the analyzed constant, default) or log(2 n^2 K^4) (pseudo-code variant).
enum class HoeffdingConstant { kCubic, kQuartic };

/// Numerator of the KL-UCB exploration budget: log(n^2 K^2) (default) or log(n^2).
enum class KlucbBonus { kLogN2K2, kLogN2 };

/// log(2 n^2 K^3) or log(2 n^2 K^4).
[[nodiscard]] double hoeffding_log_term(std::size_t n, std::size_t K,
                                        HoeffdingConstant c = HoeffdingConstant::kCubic);

/// sqrt(log(2 n^2 K^3) / (2 m)); +inf when m == 0.
[[nodiscard]] double hoeffding_radius(std::size_t m, std::size_t n, std::size_t K,
                                      HoeffdingConstant c = HoeffdingConstant::kCubic);

[[nodiscard]] double klucb_bonus(std::size_t n, std::size_t K, KlucbBonus variant = KlucbBonus::kLogN2K2);

/// Regularized lower incomplete gamma P(a, x), series / continued fraction.
[[nodiscard]] double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed directly.
[[nodiscard]] double gamma_q(double a, double x);

[[nodiscard]] double chi2_cdf(double dof, double x);

/// x with chi2_cdf(dof, x) == p, by bracketed bisection on the incomplete gamma.
/// Throws ParameterError unless 0 < p < 1 and dof > 0.
[[nodiscard]] double chi2_quantile(double dof, double p);

/// Confidence level 1 - 1/(2 n^2 K^2) of the exponential-mean lower bound.
[[nodiscard]] double ucbu_confidence(std::size_t n, std::size_t K);

/// 2 * sum / chi2_{2m}(1 - 1/(2 n^2 K^2)); 0 when m == 0.
[[nodiscard]] double ucbu_lower_bound(double sum_sizes, std::size_t m, std::size_t n, std::size_t K);

/// Same bound given a precomputed quantile chi2_{2m}(level).
[[nodiscard]] inline double ucbu_lower_bound_from_quantile(double sum_sizes, double quantile) {
  return 2.0 * sum_sizes / quantile;
}

/// Bernoulli KL divergence d(p, q) with 0 log 0 = 0 and d = +inf off the support.
[[nodiscard]] double bernoulli_kl(double p, double q);

/// Largest q in [mu_hat, 1] with d(mu_hat, q) <= bonus / pulls, to within 1e-9.
[[nodiscard]] double klucb_index(double mu_hat, std::uint64_t pulls, double bonus);

/// Paired win counts of type k over type l.
struct PairedComparison {
  std::uint64_t wins = 0;
  std::uint64_t total = 0;

  [[nodiscard]] double ratio() const {
    return total == 0 ? 0.0 : static_cast<double>(wins) / static_cast<double>(total);
  }
  /// r_hat - radius > 1/2: the winner is w.h.p. the shorter type.
  [[nodiscard]] bool decisive(double radius) const { return total > 0 && ratio() - radius > 0.5; }
};

}  // namespace stosched::stats
