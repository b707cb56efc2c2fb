#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "stosched/engine.hpp"
#include "stosched/instance.hpp"
#include "stosched/stats.hpp"

namespace stosched {

enum class PolicyKind { kOpt, kFtpp, kRR, kEtcU, kUcbU, kEtcRR, kUcbRR, kLsept };

[[nodiscard]] std::string_view policy_name(PolicyKind kind);
/// Accepts opt|ftpp|rr|etc-u|ucb-u|etc-rr|ucb-rr|lsept; throws ParameterError otherwise.
[[nodiscard]] PolicyKind parse_policy(std::string_view name);
[[nodiscard]] const std::vector<PolicyKind>& all_policies();
/// RR, ETC-RR and UCB-RR may interrupt a running job.
[[nodiscard]] bool is_preemptive(PolicyKind kind);

struct PolicyOptions {
  /// Slot length of UCB-RR.
  double delta = 0.01;
  stats::KlucbBonus bonus = stats::KlucbBonus::kLogN2K2;
  stats::HoeffdingConstant hoeffding = stats::HoeffdingConstant::kCubic;
};

/// Runs one policy on one instance in the engine mode it belongs to.
[[nodiscard]] RunTrace run_policy(PolicyKind kind, const Instance& instance, const PolicyOptions& options = {});

/// Realization-aware order: every job by increasing size, ties by (type, index).
[[nodiscard]] std::vector<JobId> opt_order(const Instance& instance);

/// Types by increasing lambda (ties by index), all n jobs of each in turn.
[[nodiscard]] std::vector<JobId> ftpp_order(const TypeParams& params);

class FtppPolicy final : public NonpreemptivePolicy {
 public:
  explicit FtppPolicy(const TypeParams& params);
  TypeIndex select(const Observation& obs) override;

 private:
  std::vector<TypeIndex> order_;
};

/// Explore-then-commit over paired same-rank comparisons.
class EtcUPolicy final : public NonpreemptivePolicy {
 public:
  EtcUPolicy(std::size_t n, std::size_t K,
             stats::HoeffdingConstant hoeffding = stats::HoeffdingConstant::kCubic);
  TypeIndex select(const Observation& obs) override;
  void on_completion(const Observation& obs, TypeIndex k, double size) override;

  [[nodiscard]] bool candidate(TypeIndex k) const { return in_a_[k]; }
  /// Times the candidate set had to be rebuilt, and how many of those rebuilds
  /// came out empty and fell back to every unfinished type.
  [[nodiscard]] std::size_t rebuilds() const { return rebuilds_; }
  [[nodiscard]] std::size_t empty_rebuilds() const { return empty_rebuilds_; }

 private:
  void refresh_pair(const Observation& obs, TypeIndex a, TypeIndex b);

  std::size_t n_;
  std::size_t K_;
  stats::HoeffdingConstant hoeffding_;
  std::vector<bool> in_a_;
  bool a_empty_ = true;
  // Indexed [k * K + l]: r_hat_{k,l}, delta_{k,l} as last stored, and the
  // same-rank win count of k over l on the first `compared_` ranks.
  std::vector<double> r_hat_;
  std::vector<double> radius_;
  std::vector<std::uint64_t> wins_;
  std::vector<std::size_t> compared_;
  std::size_t rebuilds_ = 0;
  std::size_t empty_rebuilds_ = 0;
};

/// Runs the type with the smallest chi-square lower confidence bound on its mean.
class UcbUPolicy final : public NonpreemptivePolicy {
 public:
  UcbUPolicy(std::size_t n, std::size_t K);
  TypeIndex select(const Observation& obs) override;
  void on_completion(const Observation& obs, TypeIndex k, double size) override;

  [[nodiscard]] double index(TypeIndex k) const;

 private:
  std::shared_ptr<const std::vector<double>> quantiles_;  // chi2_{2m}(level), m = 0..n
  std::vector<double> sums_;
  std::vector<std::size_t> counts_;
};

/// Greedy on the empirical mean; untried types count as mean 0.
class LseptPolicy final : public NonpreemptivePolicy {
 public:
  explicit LseptPolicy(std::size_t K);
  TypeIndex select(const Observation& obs) override;
  void on_completion(const Observation& obs, TypeIndex k, double size) override;

 private:
  std::vector<double> sums_;
  std::vector<std::size_t> counts_;
};

/// Candidates share the machine; beta_{l,k} counts completions of l while k was active.
class EtcRRPolicy final : public SharingPolicy {
 public:
  EtcRRPolicy(std::size_t n, std::size_t K,
              stats::HoeffdingConstant hoeffding = stats::HoeffdingConstant::kCubic);
  void active_set(const Observation& obs, std::vector<TypeIndex>& out) override;
  void on_completion(const Observation& obs, TypeIndex k, std::span<const TypeIndex> active) override;

  [[nodiscard]] std::uint64_t beta(TypeIndex k, TypeIndex l) const { return beta_[k * K_ + l]; }
  [[nodiscard]] std::size_t empty_rebuilds() const { return empty_rebuilds_; }

 private:
  [[nodiscard]] bool beats(TypeIndex k, TypeIndex l) const;

  std::size_t n_;
  std::size_t K_;
  stats::HoeffdingConstant hoeffding_;
  std::vector<bool> in_a_;
  std::size_t a_size_ = 0;
  std::vector<std::uint64_t> beta_;
  std::size_t empty_rebuilds_ = 0;
};

/// KL-UCB on per-slot completion indicators, with 2^gamma slot batches.
class UcbRRPolicy final : public SlottedPolicy {
 public:
  static constexpr int kMaxGamma = 30;

  UcbRRPolicy(std::size_t n, std::size_t K, stats::KlucbBonus bonus = stats::KlucbBonus::kLogN2K2);
  SlotRequest next(const Observation& obs) override;
  void on_slots(const Observation& obs, TypeIndex k, std::uint64_t failures, bool success) override;

  [[nodiscard]] double index(TypeIndex k);
  [[nodiscard]] std::uint64_t pulls(TypeIndex k) const { return pulls_[k]; }
  [[nodiscard]] std::uint64_t successes(TypeIndex k) const { return successes_[k]; }

 private:
  double bonus_;
  std::vector<std::uint64_t> pulls_;
  std::vector<std::uint64_t> successes_;
  std::vector<double> cached_;
  std::vector<bool> fresh_;
};

/// chi2_{2m}(1 - 1/(2 n^2 K^2)) for m = 0..n (entry 0 unused), memoized per (n, K).
[[nodiscard]] std::shared_ptr<const std::vector<double>> ucbu_quantile_table(std::size_t n, std::size_t K);

}  // namespace stosched
