#include "stosched/stats.hpp"

#include <cmath>
#include <string>

#include "stosched/types.hpp"

namespace stosched::stats {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxTerms = 100000;

double gamma_prefactor(double a, double x) {
  return std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Power series for P(a, x); converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int i = 1; i < kMaxTerms; ++i) {
    term *= x / (a + i);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * gamma_prefactor(a, x);
}

// Modified Lentz continued fraction for Q(a, x); x >= a + 1.
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h * gamma_prefactor(a, x);
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0)) throw ParameterError("incomplete gamma: shape must be positive");
  if (std::isnan(x)) throw ParameterError("incomplete gamma: x is NaN");
}

}  // namespace

double hoeffding_log_term(std::size_t n, std::size_t K, HoeffdingConstant c) {
  if (n == 0 || K == 0) throw ParameterError("hoeffding: n and K must be positive");
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(K);
  const double k_power = c == HoeffdingConstant::kCubic ? kk * kk * kk : kk * kk * kk * kk;
  return std::log(2.0 * nn * nn * k_power);
}

double hoeffding_radius(std::size_t m, std::size_t n, std::size_t K, HoeffdingConstant c) {
  const double log_term = hoeffding_log_term(n, K, c);
  if (m == 0) return kInfinity;
  return std::sqrt(log_term / (2.0 * static_cast<double>(m)));
}

double klucb_bonus(std::size_t n, std::size_t K, KlucbBonus variant) {
  if (n == 0 || K == 0) throw ParameterError("klucb_bonus: n and K must be positive");
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(K);
  return variant == KlucbBonus::kLogN2K2 ? std::log(nn * nn * kk * kk) : std::log(nn * nn);
}

double gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi2_cdf(double dof, double x) {
  if (!(dof > 0.0)) throw ParameterError("chi2_cdf: degrees of freedom must be positive");
  return gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(double dof, double p) {
  if (!(dof > 0.0)) throw ParameterError("chi2_quantile: degrees of freedom must be positive");
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("chi2_quantile: p must lie in (0, 1)");
  const double a = 0.5 * dof;
  // Upper-tail target keeps precision for p close to 1.
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  auto below = [&](double x) {
    return upper ? gamma_q(a, 0.5 * x) > target : gamma_p(a, 0.5 * x) < target;
  };

  double lo = 0.0;
  double hi = std::max(dof, 1.0);
  while (below(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (below(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

double ucbu_confidence(std::size_t n, std::size_t K) {
  if (n == 0 || K == 0) throw ParameterError("ucbu_confidence: n and K must be positive");
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(K);
  return 1.0 - 1.0 / (2.0 * nn * nn * kk * kk);
}

double ucbu_lower_bound(double sum_sizes, std::size_t m, std::size_t n, std::size_t K) {
  if (sum_sizes < 0.0 || std::isnan(sum_sizes)) {
    throw ParameterError("ucbu_lower_bound: sum of sizes must be nonnegative");
  }
  if (m == 0) return 0.0;
  const double q = chi2_quantile(2.0 * static_cast<double>(m), ucbu_confidence(n, K));
  return ucbu_lower_bound_from_quantile(sum_sizes, q);
}

double bernoulli_kl(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw ParameterError("bernoulli_kl: arguments must lie in [0, 1]");
  }
  if (q == 0.0) return p == 0.0 ? 0.0 : kInfinity;
  if (q == 1.0) return p == 1.0 ? 0.0 : kInfinity;
  double d = 0.0;
  if (p > 0.0) d += p * std::log(p / q);
  if (p < 1.0) d += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return d > 0.0 ? d : 0.0;
}

double klucb_index(double mu_hat, std::uint64_t pulls, double bonus) {
  if (pulls == 0) throw ParameterError("klucb_index: pulls must be positive");
  if (!(mu_hat >= 0.0 && mu_hat <= 1.0)) throw ParameterError("klucb_index: mu_hat must lie in [0, 1]");
  if (!(bonus >= 0.0)) throw ParameterError("klucb_index: bonus must be nonnegative");
  if (mu_hat >= 1.0 || std::isinf(bonus)) return 1.0;
  const double budget = bonus / static_cast<double>(pulls);
  if (budget == 0.0) return mu_hat;

  // d(mu_hat, .) is convex and increasing on [mu_hat, 1). Newton from a point
  // above the root descends monotonically onto it; Pinsker gives that point.
  double lo = mu_hat;
  double hi = 1.0;
  double q = mu_hat + std::sqrt(0.5 * budget);
  if (q >= 1.0) q = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200 && hi - lo > 1e-9; ++iter) {
    const double g = bernoulli_kl(mu_hat, q) - budget;
    if (g > 0.0) {
      hi = q;
    } else {
      lo = q;
      if (g == 0.0) break;
    }
    const double slope = (q - mu_hat) / (q * (1.0 - q));
    double next = slope > 0.0 ? q - g / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - q) < 1e-13) {
      q = next;
      break;
    }
    q = next;
  }
  // Report the feasible side of the bracket unless Newton already converged.
  const double g = bernoulli_kl(mu_hat, q) - budget;
  if (g <= 1e-15) return q;
  return hi - lo <= 1e-9 ? lo : q;
}

}  // namespace stosched::stats
