#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stosched/types.hpp"

namespace stosched {

/// One realization of all job sizes: an n x K matrix, sizes(i, k) = P_i^k.
class Instance {
 public:
  Instance(TypeParams params, std::uint64_t seed, std::vector<double> sizes);

  [[nodiscard]] const TypeParams& params() const { return params_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::size_t n() const { return params_.n(); }
  [[nodiscard]] std::size_t num_types() const { return params_.num_types(); }

  [[nodiscard]] double size(JobIndex i, TypeIndex k) const { return sizes_[i * num_types() + k]; }
  [[nodiscard]] double size(JobId job) const { return size(job.index, job.type); }

  /// Row-major storage, row i holds job i of every type.
  [[nodiscard]] std::span<const double> data() const { return sizes_; }
  [[nodiscard]] std::vector<double> column(TypeIndex k) const;
  [[nodiscard]] double total_work() const;

  /// Same realization with every size multiplied by `factor`.
  [[nodiscard]] Instance scaled(double factor) const;

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  TypeParams params_;
  std::uint64_t seed_;
  std::vector<double> sizes_;
};

/// Draws P_i^k = -lambda_k * ln(U_ik) with U_ik from Philox keyed by `seed`
/// and addressed by (i, k). Deterministic in (params, seed).
[[nodiscard]] Instance sample_instance(const TypeParams& params, std::uint64_t seed);

/// Identifies the generator used by sample_instance, e.g. "philox4x32-10/v1".
[[nodiscard]] std::string generator_id();

void write_instance_csv(std::ostream& out, const Instance& instance);
[[nodiscard]] Instance read_instance_csv(std::istream& in);

}  // namespace stosched
