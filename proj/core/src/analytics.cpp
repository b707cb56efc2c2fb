#include "stosched/analytics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace stosched::analytics {

namespace {

constexpr double kPi = std::numbers::pi;

// Pairs (i, j) of the lambda~ sum are enumerated exactly up to this index.
constexpr std::size_t kExactCutoff = 3000;

struct Sorted {
  std::vector<double> l;  // ascending
  double sum = 0.0;
  double pair = 0.0;      // sum_{l<k} l_k l_l / (l_k + l_l)
  double ladder = 0.0;    // sum_l (K - l) l_l, 1-based l
};

Sorted sorted_terms(const std::vector<double>& lambdas) {
  Sorted s;
  s.l = lambdas;
  std::sort(s.l.begin(), s.l.end());
  const std::size_t K = s.l.size();
  for (std::size_t a = 0; a < K; ++a) {
    s.sum += s.l[a];
    s.ladder += static_cast<double>(K - 1 - a) * s.l[a];
    for (std::size_t b = 0; b < a; ++b) s.pair += s.l[a] * s.l[b] / (s.l[a] + s.l[b]);
  }
  return s;
}

double nd(std::size_t v) { return static_cast<double>(v); }

void check_lambdas(const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw ParameterError("at least one lambda is required");
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) throw ParameterError("lambdas must be positive and finite");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw BoundNotApplicable(what);
}

// Inner sum over i < j of 1/(i^2 + j^2), exact.
double inner_exact(std::size_t j) {
  const double jj = nd(j) * nd(j);
  double s = 0.0;
  for (std::size_t i = j - 1; i >= 1; --i) s += 1.0 / (nd(i) * nd(i) + jj);
  return s;
}

// Euler-Maclaurin for the same inner sum; error O(j^-5).
double inner_asymptotic(std::size_t j) {
  const double x = nd(j);
  return kPi / (4.0 * x) - 3.0 / (4.0 * x * x) - 1.0 / (24.0 * x * x * x);
}

struct Head {
  double H = 0.0;
  double B = 0.0;
  double Z = 0.0;  // sum 1/k^3
  double A = 0.0;
};

const Head& exact_head() {
  static const Head head = [] {
    Head h;
    for (std::size_t k = kExactCutoff; k >= 1; --k) {
      const double x = nd(k);
      h.H += 1.0 / x;
      h.B += 1.0 / (x * x);
      h.Z += 1.0 / (x * x * x);
    }
    for (std::size_t j = kExactCutoff; j >= 2; --j) h.A += inner_exact(j);
    return h;
  }();
  return head;
}

}  // namespace

double expected_cost_opt(const TypeParams& params) {
  const Sorted s = sorted_terms(params.lambdas());
  const double n = nd(params.n());
  return n * n * (s.sum / 4.0 + s.pair) + 0.75 * n * s.sum;
}

double expected_cost_ftpp(const TypeParams& params) {
  const Sorted s = sorted_terms(params.lambdas());
  const double n = nd(params.n());
  return n * n * (s.sum / 2.0 + s.ladder) + n * s.sum / 2.0;
}

double expected_cost_rr(const TypeParams& params) {
  return 2.0 * expected_cost_opt(params) - nd(params.n()) * params.lambda_sum();
}

double cr_ftpp_exact(const TypeParams& params) {
  return expected_cost_ftpp(params) / expected_cost_opt(params);
}

double cr_rr(const TypeParams& params) { return expected_cost_rr(params) / expected_cost_opt(params); }

double cr_ftpp_upper_2types(double lambda_ratio) {
  if (!(lambda_ratio >= 1.0) || !std::isfinite(lambda_ratio)) {
    throw ParameterError("cr_ftpp_upper_2types: ratio must be >= 1 and finite");
  }
  const double l = lambda_ratio;
  return 2.0 - 4.0 * (l - 1.0) / ((1.0 + l) * (1.0 + l) + 4.0 * l);
}

double ftpp_bound_fk(const std::vector<double>& lambdas) {
  check_lambdas(lambdas);
  const Sorted s = sorted_terms(lambdas);
  return (2.0 * s.pair - s.ladder) / (s.sum / 4.0 + s.pair);
}

double cr_ftpp_upper_Ktypes(const std::vector<double>& lambdas) { return 2.0 - ftpp_bound_fk(lambdas); }

double harmonic_number(std::size_t K) {
  double h = 0.0;
  for (std::size_t k = K; k >= 1; --k) h += 1.0 / nd(k);
  return h;
}

double inverse_square_sum(std::size_t K) {
  double b = 0.0;
  for (std::size_t k = K; k >= 1; --k) b += 1.0 / (nd(k) * nd(k));
  return b;
}

double tilde_pair_sum_direct(std::size_t K) {
  double a = 0.0;
  for (std::size_t j = K; j >= 2; --j) a += inner_exact(j);
  return a;
}

double tilde_pair_sum(std::size_t K) {
  if (K <= kExactCutoff) return tilde_pair_sum_direct(K);
  double tail = 0.0;
  for (std::size_t j = K; j > kExactCutoff; --j) tail += inner_asymptotic(j);
  return exact_head().A + tail;
}

std::vector<double> tilde_lambdas(std::size_t K) {
  if (K == 0) throw ParameterError("tilde_lambdas: K must be positive");
  std::vector<double> out(K);
  for (std::size_t k = 1; k <= K; ++k) {
    const double d = nd(K - k + 1);
    out[k - 1] = 1.0 / (d * d);
  }
  return out;
}

TildeSeries cr_ftpp_tilde_series(std::size_t K, bool with_lambdas) {
  if (K == 0) throw ParameterError("cr_ftpp_tilde_series: K must be positive");
  TildeSeries t;
  t.K = K;
  t.H = harmonic_number(K);
  t.B = inverse_square_sum(K);
  t.A = tilde_pair_sum(K);
  t.cr = (t.H - t.B / 2.0) / (t.B / 4.0 + t.A);
  if (with_lambdas) t.lambdas = tilde_lambdas(K);
  return t;
}

double tilde_cr_from_log(double log_K) {
  if (!(log_K >= 0.0) || !std::isfinite(log_K)) throw ParameterError("tilde_cr_from_log: ln K must be >= 0");
  if (log_K < 20.0) {
    return cr_ftpp_tilde_series(static_cast<std::size_t>(std::llround(std::exp(log_K))), false).cr;
  }
  // K > 4e8: the 1/K corrections to H, B and the cubic sum are below 1e-8.
  constexpr double kZeta3 = 1.2020569031595942;
  const Head& h = exact_head();
  const double inv_k = std::exp(-log_K);
  const double H = log_K + std::numbers::egamma + 0.5 * inv_k;
  const double B = kPi * kPi / 6.0 - inv_k;
  const double A = h.A + kPi / 4.0 * (H - h.H) - 0.75 * (B - h.B) - (kZeta3 - h.Z) / 24.0;
  return (H - B / 2.0) / (B / 4.0 + A);
}

double tilde_cr_upper_from_log(double log_K) {
  // Each inner sum is at least pi/(4j) - 1/j^2 (f = 1/(1+x^2) is decreasing),
  // so A >= (pi/4) H - B. The resulting ratio grows with B and falls with H.
  const double B = kPi * kPi / 6.0;
  const double H = log_K;
  const double den = kPi / 4.0 * H - 0.75 * B;
  if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
  return (H - B / 2.0) / den;
}

double tilde_log_k_reaching(double target, bool guaranteed) {
  if (!(target > 4.0 / kPi)) throw ParameterError("tilde_log_k_reaching: target must exceed 4/pi");
  auto f = [&](double L) { return guaranteed ? tilde_cr_upper_from_log(L) : tilde_cr_from_log(L); };
  double lo = 1.0;
  double hi = 2.0;
  while (f(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw ParameterError("tilde_log_k_reaching: target not reached");
  }
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

double excess_upper_bound(UpperBound kind, const TypeParams& params, double delta) {
  const Sorted s = sorted_terms(params.lambdas());
  const std::size_t K = s.l.size();
  const double n = nd(params.n());
  const double kd = nd(K);
  const double opt = expected_cost_opt(params);
  const double log3 = std::log(2.0 * n * n * kd * kd * kd);
  const double log2 = std::log(2.0 * n * n * kd * kd);
  // 1-based lambda_k of the sorted vector.
  auto lam = [&](std::size_t k) { return s.l[k - 1]; };

  switch (kind) {
    case UpperBound::kEtcUGeneral: {
      double w = 0.0;
      for (std::size_t k = 1; k <= K; ++k) {
        const double a = nd(k - 1) * nd(2 * K - k) / 2.0 + nd(K - k) * nd(K - k);
        w += a * lam(k);
      }
      return opt / n + w * n * std::sqrt(8.0 * n * log3);
    }
    case UpperBound::kEtcUGap: {
      double w = 0.0;
      for (std::size_t k = 1; k <= K; ++k) {
        for (std::size_t l = 1; l < k; ++l) {
          require(lam(k) > lam(l), "etc-u gap bound needs distinct lambdas");
          const double sum = lam(k) + lam(l);
          w += nd(K - l) * sum * sum / (lam(k) - lam(l));
        }
      }
      return opt / n + w * 8.0 * n * log3;
    }
    case UpperBound::kUcbUGeneral:
      return 2.0 * opt / n + n * (kd - 1.0) * std::sqrt(3.0 * n * log2) * s.sum;
    case UpperBound::kUcbUGap: {
      double w = 0.0;
      for (std::size_t k = 1; k <= K; ++k) {
        for (std::size_t l = 1; l < k; ++l) {
          require(lam(k) > lam(l), "ucb-u gap bound needs distinct lambdas");
          const double sum = lam(k) + lam(l);
          w += sum * sum / (lam(k) - lam(l));
        }
      }
      return 2.0 * opt / n + w * 3.0 * n * log2;
    }
    case UpperBound::kEtcUTwoTypes:
      require(K == 2 && lam(2) >= 3.0 * lam(1), "needs K = 2 and lambda_2 >= 3 lambda_1");
      return 12.0 * lam(2) * n * log3 + 2.0 * opt / n;
    case UpperBound::kUcbUTwoTypes:
      require(K == 2 && lam(2) >= 3.0 * lam(1), "needs K = 2 and lambda_2 >= 3 lambda_1");
      return 4.5 * lam(2) * n * log2 + 4.0 * opt / n;
    case UpperBound::kEtcRR: {
      double w = 0.0;
      for (std::size_t k = 1; k <= K; ++k) w += nd(K - k) * nd(K - k) * lam(k);
      return 12.0 * kd / n * opt + 4.0 * n * std::sqrt(n * log3) * w;
    }
    case UpperBound::kUcbRR: {
      require(delta > 0.0 && delta <= lam(1) / 4.0, "needs 0 < delta <= lambda_1 / 4");
      require(n >= std::max(20.0, 10.0 * std::log(kd)), "needs n >= max(20, 10 ln K)");
      double w = 0.0;
      for (std::size_t k = 1; k <= K; ++k) w += nd(K - k) * lam(k);
      return 12.0 * kd / n * opt + 6.0 * n * std::sqrt(2.0 * n * log2 + 2.0) * w;
    }
    case UpperBound::kEtcUPair:
      require(K == 2, "two-type form needs K = 2");
      return n * (lam(1) + lam(2)) * std::sqrt(8.0 * n * log3) + 8.0 / n * opt;
    case UpperBound::kEtcRRPair:
      require(K == 2, "two-type form needs K = 2");
      return 2.0 * n * lam(1) * (std::sqrt(4.0 * n * log3) + 1.0) + 16.0 / n * opt;
  }
  throw ParameterError("excess_upper_bound: unknown kind");
}

double excess_lower_bound(LowerBound kind, const TypeParams& params) {
  const Sorted s = sorted_terms(params.lambdas());
  const std::size_t K = s.l.size();
  const double n = nd(params.n());
  switch (kind) {
    case LowerBound::kSmallGap: {
      require(K == 2, "small-gap bound needs K = 2");
      const double gap = s.l[1] - s.l[0];
      return gap * n * n * std::exp(-n * gap * gap / (s.l[0] * s.l[1])) / 8.0;
    }
    case LowerBound::kSmallGapSqrtN:
      require(K == 2, "small-gap bound needs K = 2");
      require(s.l[0] < s.l[1] && s.l[1] <= s.l[0] * (1.0 + 1.0 / std::sqrt(n)),
              "needs lambda_1 < lambda_2 <= lambda_1 (1 + 1/sqrt n)");
      return s.sum * n * std::sqrt(n) * std::exp(-0.25) / 24.0;
    case LowerBound::kLargeGap: {
      double w = 0.0;
      for (std::size_t k = 1; k <= K; ++k) w += (2.0 * nd(k) - nd(K) - 1.0) * s.l[k - 1];
      return n / nd(K) * w;
    }
    case LowerBound::kLargeGapTwoTypes:
      require(K == 2 && s.l[1] >= 3.0 * s.l[0], "needs K = 2 and lambda_2 >= 3 lambda_1");
      return n * s.sum / 4.0;
  }
  throw ParameterError("excess_lower_bound: unknown kind");
}

namespace {

constexpr std::array<std::pair<UpperBound, std::string_view>, 10> kUpperNames{{
    {UpperBound::kEtcUGeneral, "etc-u-general"},
    {UpperBound::kEtcUGap, "etc-u-gap"},
    {UpperBound::kUcbUGeneral, "ucb-u-general"},
    {UpperBound::kUcbUGap, "ucb-u-gap"},
    {UpperBound::kEtcUTwoTypes, "etc-u-two-types"},
    {UpperBound::kUcbUTwoTypes, "ucb-u-two-types"},
    {UpperBound::kEtcRR, "etc-rr"},
    {UpperBound::kUcbRR, "ucb-rr"},
    {UpperBound::kEtcUPair, "etc-u-pair"},
    {UpperBound::kEtcRRPair, "etc-rr-pair"},
}};

constexpr std::array<std::pair<LowerBound, std::string_view>, 4> kLowerNames{{
    {LowerBound::kSmallGap, "small-gap"},
    {LowerBound::kSmallGapSqrtN, "small-gap-sqrt-n"},
    {LowerBound::kLargeGap, "large-gap"},
    {LowerBound::kLargeGapTwoTypes, "large-gap-two-types"},
}};

}  // namespace

std::string_view to_string(UpperBound kind) {
  for (const auto& [k, name] : kUpperNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::string_view to_string(LowerBound kind) {
  for (const auto& [k, name] : kLowerNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

UpperBound parse_upper_bound(std::string_view name) {
  for (const auto& [k, n] : kUpperNames) {
    if (n == name) return k;
  }
  throw ParameterError("unknown upper bound '" + std::string(name) + "'");
}

LowerBound parse_lower_bound(std::string_view name) {
  for (const auto& [k, n] : kLowerNames) {
    if (n == name) return k;
  }
  throw ParameterError("unknown lower bound '" + std::string(name) + "'");
}

const std::vector<UpperBound>& all_upper_bounds() {
  static const std::vector<UpperBound> all = [] {
    std::vector<UpperBound> v;
    for (const auto& [k, name] : kUpperNames) v.push_back(k);
    return v;
  }();
  return all;
}

const std::vector<LowerBound>& all_lower_bounds() {
  static const std::vector<LowerBound> all = [] {
    std::vector<LowerBound> v;
    for (const auto& [k, name] : kLowerNames) v.push_back(k);
    return v;
  }();
  return all;
}

namespace {

double weighted_inversions(const RunTrace& trace, const TypeParams& params, InversionMode mode) {
  if (trace.K != params.num_types() || trace.n != params.n()) {
    throw ParameterError("decomposition: trace shape does not match params");
  }
  const std::size_t K = trace.K;
  const auto counts = inversion_counts(trace, mode);
  double total = 0.0;
  for (TypeIndex k = 0; k < K; ++k) {
    for (TypeIndex l = 0; l < K; ++l) {
      const double gap = params.lambda(k) - params.lambda(l);
      if (gap > 0.0) total += gap * static_cast<double>(counts[k * K + l]);
    }
  }
  return total;
}

}  // namespace

double nonpreemptive_excess_decomposition(const RunTrace& trace, const TypeParams& params) {
  return weighted_inversions(trace, params, InversionMode::kInclusive);
}

double typewise_excess_decomposition(const RunTrace& trace, const TypeParams& params) {
  const double slack = nd(params.num_types() - 1) * nd(params.n()) * params.lambda_sum();
  return weighted_inversions(trace, params, InversionMode::kStrict) + slack;
}

}  // namespace stosched::analytics
