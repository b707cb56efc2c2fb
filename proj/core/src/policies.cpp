#include "stosched/policies.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>

namespace stosched {

namespace {

constexpr std::array<std::pair<PolicyKind, std::string_view>, 8> kNames{{
    {PolicyKind::kOpt, "opt"},
    {PolicyKind::kFtpp, "ftpp"},
    {PolicyKind::kRR, "rr"},
    {PolicyKind::kEtcU, "etc-u"},
    {PolicyKind::kUcbU, "ucb-u"},
    {PolicyKind::kEtcRR, "etc-rr"},
    {PolicyKind::kUcbRR, "ucb-rr"},
    {PolicyKind::kLsept, "lsept"},
}};

// Lowest-index minimizer of `key` over the unfinished types.
template <typename Key>
TypeIndex argmin_unfinished(const Observation& obs, Key key) {
  const auto u = obs.unfinished();
  TypeIndex best = u.front();
  double best_key = key(best);
  for (TypeIndex k : u.subspan(1)) {
    const double v = key(k);
    if (v < best_key) {
      best = k;
      best_key = v;
    }
  }
  return best;
}

}  // namespace

std::string_view policy_name(PolicyKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

PolicyKind parse_policy(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw ParameterError("unknown policy '" + std::string(name) +
                       "' (expected opt|ftpp|rr|etc-u|ucb-u|etc-rr|ucb-rr|lsept)");
}

const std::vector<PolicyKind>& all_policies() {
  static const std::vector<PolicyKind> all = [] {
    std::vector<PolicyKind> v;
    for (const auto& [k, name] : kNames) v.push_back(k);
    return v;
  }();
  return all;
}

bool is_preemptive(PolicyKind kind) {
  return kind == PolicyKind::kRR || kind == PolicyKind::kEtcRR || kind == PolicyKind::kUcbRR;
}

std::vector<JobId> opt_order(const Instance& instance) {
  std::vector<JobId> order;
  order.reserve(instance.params().num_jobs());
  for (TypeIndex k = 0; k < instance.num_types(); ++k) {
    for (JobIndex i = 0; i < instance.n(); ++i) order.push_back({k, i});
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](const JobId& a, const JobId& b) { return instance.size(a) < instance.size(b); });
  return order;
}

namespace {

std::vector<TypeIndex> types_by_lambda(const TypeParams& params) {
  std::vector<TypeIndex> types(params.num_types());
  std::iota(types.begin(), types.end(), TypeIndex{0});
  std::stable_sort(types.begin(), types.end(),
                   [&](TypeIndex a, TypeIndex b) { return params.lambda(a) < params.lambda(b); });
  return types;
}

}  // namespace

std::vector<JobId> ftpp_order(const TypeParams& params) {
  std::vector<JobId> order;
  order.reserve(params.num_jobs());
  for (TypeIndex k : types_by_lambda(params)) {
    for (JobIndex i = 0; i < params.n(); ++i) order.push_back({k, i});
  }
  return order;
}

FtppPolicy::FtppPolicy(const TypeParams& params) : order_(types_by_lambda(params)) {}

TypeIndex FtppPolicy::select(const Observation& obs) {
  for (TypeIndex k : order_) {
    if (!obs.exhausted(k)) return k;
  }
  throw ContractViolation("FtppPolicy: no unfinished type");
}

// ETC-U -------------------------------------------------------------------

EtcUPolicy::EtcUPolicy(std::size_t n, std::size_t K, stats::HoeffdingConstant hoeffding)
    : n_(n), K_(K), hoeffding_(hoeffding), in_a_(K, false), r_hat_(K * K, 0.0), radius_(K * K, 0.0),
      wins_(K * K, 0), compared_(K * K, 0) {}

TypeIndex EtcUPolicy::select(const Observation& obs) {
  if (a_empty_) {
    ++rebuilds_;
    const auto u = obs.unfinished();
    bool any = false;
    for (TypeIndex l : u) {
      bool keep = true;
      for (TypeIndex k : u) {
        if (k != l && r_hat_[k * K_ + l] - radius_[k * K_ + l] > 0.5) {
          keep = false;
          break;
        }
      }
      in_a_[l] = keep;
      any = any || keep;
    }
    if (!any) {
      // Stored statistics can eliminate every unfinished type in a cycle.
      ++empty_rebuilds_;
      for (TypeIndex l : u) in_a_[l] = true;
    }
    a_empty_ = false;
  }
  TypeIndex best = K_;
  for (TypeIndex k = 0; k < K_; ++k) {
    if (in_a_[k] && (best == K_ || obs.completed(k) < obs.completed(best))) best = k;
  }
  return best;
}

void EtcUPolicy::refresh_pair(const Observation& obs, TypeIndex a, TypeIndex b) {
  const std::size_t m = std::min(obs.completed(a), obs.completed(b));
  std::size_t& done = compared_[a * K_ + b];
  for (; done < m; ++done) {
    const double pa = obs.completed_size(a, done);
    const double pb = obs.completed_size(b, done);
    if (pa < pb) ++wins_[a * K_ + b];
    if (pb < pa) ++wins_[b * K_ + a];
  }
  compared_[b * K_ + a] = done;
  if (m == 0) return;
  const double radius = stats::hoeffding_radius(m, n_, K_, hoeffding_);
  const double md = static_cast<double>(m);
  r_hat_[a * K_ + b] = static_cast<double>(wins_[a * K_ + b]) / md;
  r_hat_[b * K_ + a] = static_cast<double>(wins_[b * K_ + a]) / md;
  radius_[a * K_ + b] = radius;
  radius_[b * K_ + a] = radius;
}

void EtcUPolicy::on_completion(const Observation& obs, TypeIndex k, double) {
  std::vector<TypeIndex> members;
  for (TypeIndex t = 0; t < K_; ++t) {
    if (in_a_[t]) members.push_back(t);
  }
  std::vector<bool> drop(K_, false);
  for (std::size_t x = 0; x < members.size(); ++x) {
    for (std::size_t y = x + 1; y < members.size(); ++y) {
      const TypeIndex a = members[x];
      const TypeIndex b = members[y];
      refresh_pair(obs, a, b);
      if (r_hat_[a * K_ + b] - radius_[a * K_ + b] > 0.5) drop[b] = true;
      if (r_hat_[b * K_ + a] - radius_[b * K_ + a] > 0.5) drop[a] = true;
    }
  }
  if (obs.exhausted(k)) drop[k] = true;
  bool any = false;
  for (TypeIndex t = 0; t < K_; ++t) {
    if (drop[t]) in_a_[t] = false;
    any = any || in_a_[t];
  }
  a_empty_ = !any;
}

// UCB-U -------------------------------------------------------------------

std::shared_ptr<const std::vector<double>> ucbu_quantile_table(std::size_t n, std::size_t K) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const std::vector<double>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, K}];
  if (!slot) {
    auto table = std::make_shared<std::vector<double>>(n + 1, 0.0);
    const double level = stats::ucbu_confidence(n, K);
    for (std::size_t m = 1; m <= n; ++m) (*table)[m] = stats::chi2_quantile(2.0 * static_cast<double>(m), level);
    slot = std::move(table);
  }
  return slot;
}

UcbUPolicy::UcbUPolicy(std::size_t n, std::size_t K)
    : quantiles_(ucbu_quantile_table(n, K)), sums_(K, 0.0), counts_(K, 0) {}

double UcbUPolicy::index(TypeIndex k) const {
  if (counts_[k] == 0) return 0.0;
  return stats::ucbu_lower_bound_from_quantile(sums_[k], (*quantiles_)[counts_[k]]);
}

TypeIndex UcbUPolicy::select(const Observation& obs) {
  return argmin_unfinished(obs, [&](TypeIndex k) { return index(k); });
}

void UcbUPolicy::on_completion(const Observation&, TypeIndex k, double size) {
  sums_[k] += size;
  ++counts_[k];
}

// LSEPT -------------------------------------------------------------------

LseptPolicy::LseptPolicy(std::size_t K) : sums_(K, 0.0), counts_(K, 0) {}

TypeIndex LseptPolicy::select(const Observation& obs) {
  return argmin_unfinished(obs, [&](TypeIndex k) {
    return counts_[k] == 0 ? 0.0 : sums_[k] / static_cast<double>(counts_[k]);
  });
}

void LseptPolicy::on_completion(const Observation&, TypeIndex k, double size) {
  sums_[k] += size;
  ++counts_[k];
}

// ETC-RR ------------------------------------------------------------------

EtcRRPolicy::EtcRRPolicy(std::size_t n, std::size_t K, stats::HoeffdingConstant hoeffding)
    : n_(n), K_(K), hoeffding_(hoeffding), in_a_(K, false), beta_(K * K, 0) {}

bool EtcRRPolicy::beats(TypeIndex k, TypeIndex l) const {
  const stats::PairedComparison c{beta_[k * K_ + l], beta_[k * K_ + l] + beta_[l * K_ + k]};
  if (c.total == 0) return false;
  return c.decisive(stats::hoeffding_radius(c.total, n_, K_, hoeffding_));
}

void EtcRRPolicy::active_set(const Observation& obs, std::vector<TypeIndex>& out) {
  if (a_size_ == 0) {
    const auto u = obs.unfinished();
    for (TypeIndex l : u) {
      bool keep = true;
      for (TypeIndex k : u) {
        if (k != l && beats(k, l)) {
          keep = false;
          break;
        }
      }
      in_a_[l] = keep;
      a_size_ += keep ? 1 : 0;
    }
    if (a_size_ == 0) {
      ++empty_rebuilds_;
      for (TypeIndex l : u) in_a_[l] = true;
      a_size_ = u.size();
    }
  }
  for (TypeIndex k = 0; k < K_; ++k) {
    if (in_a_[k]) out.push_back(k);
  }
}

void EtcRRPolicy::on_completion(const Observation& obs, TypeIndex l, std::span<const TypeIndex> active) {
  for (TypeIndex k : active) {
    if (k == l) continue;
    ++beta_[l * K_ + k];
    if (beats(l, k)) in_a_[k] = false;
    if (beats(k, l)) in_a_[l] = false;
  }
  if (obs.exhausted(l)) in_a_[l] = false;
  a_size_ = static_cast<std::size_t>(std::count(in_a_.begin(), in_a_.end(), true));
}

// UCB-RR ------------------------------------------------------------------

UcbRRPolicy::UcbRRPolicy(std::size_t n, std::size_t K, stats::KlucbBonus bonus)
    : bonus_(stats::klucb_bonus(n, K, bonus)), pulls_(K, 0), successes_(K, 0), cached_(K, 1.0),
      fresh_(K, false) {}

double UcbRRPolicy::index(TypeIndex k) {
  if (!fresh_[k]) {
    const std::uint64_t t = pulls_[k];
    cached_[k] = t == 0 ? 1.0
                        : stats::klucb_index(static_cast<double>(successes_[k]) / static_cast<double>(t), t,
                                             bonus_);
    fresh_[k] = true;
  }
  return cached_[k];
}

SlotRequest UcbRRPolicy::next(const Observation& obs) {
  const auto u = obs.unfinished();
  if (u.size() == 1) return {u.front(), 1, true};

  TypeIndex best = u.front();
  double best_index = index(best);
  double runner_up = -1.0;
  for (TypeIndex k : u.subspan(1)) {
    const double v = index(k);
    if (v > best_index) {
      runner_up = best_index;
      best = k;
      best_index = v;
    } else {
      runner_up = std::max(runner_up, v);
    }
  }

  // Largest 2^gamma such that the index after that many failed slots would
  // still be at least the runner-up's; one slot if even gamma = 0 fails.
  const double s = static_cast<double>(successes_[best]);
  std::uint64_t slots = 1;
  for (int gamma = 0; gamma <= kMaxGamma; ++gamma) {
    const std::uint64_t t = pulls_[best] + (std::uint64_t{1} << gamma);
    const double deflated = stats::klucb_index(s / static_cast<double>(t), t, bonus_);
    if (deflated < runner_up) break;
    slots = std::uint64_t{1} << gamma;
  }
  return {best, slots, false};
}

void UcbRRPolicy::on_slots(const Observation&, TypeIndex k, std::uint64_t failures, bool success) {
  pulls_[k] += failures + (success ? 1 : 0);
  successes_[k] += success ? 1 : 0;
  fresh_[k] = false;
}

// Dispatch ----------------------------------------------------------------

RunTrace run_policy(PolicyKind kind, const Instance& instance, const PolicyOptions& options) {
  const std::size_t n = instance.n();
  const std::size_t K = instance.num_types();
  switch (kind) {
    case PolicyKind::kOpt: {
      const auto order = opt_order(instance);
      return run_sequence(instance, order);
    }
    case PolicyKind::kFtpp: {
      FtppPolicy p(instance.params());
      return run_nonpreemptive(instance, p);
    }
    case PolicyKind::kRR:
      return run_round_robin(instance);
    case PolicyKind::kEtcU: {
      EtcUPolicy p(n, K, options.hoeffding);
      return run_nonpreemptive(instance, p);
    }
    case PolicyKind::kUcbU: {
      UcbUPolicy p(n, K);
      return run_nonpreemptive(instance, p);
    }
    case PolicyKind::kEtcRR: {
      EtcRRPolicy p(n, K, options.hoeffding);
      return run_processor_sharing(instance, p);
    }
    case PolicyKind::kUcbRR: {
      UcbRRPolicy p(n, K, options.bonus);
      return run_slotted(instance, p, options.delta);
    }
    case PolicyKind::kLsept: {
      LseptPolicy p(K);
      return run_nonpreemptive(instance, p);
    }
  }
  throw ParameterError("run_policy: unknown policy");
}

}  // namespace stosched
