#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stosched {

/// Raised when a caller passes parameters outside an operation's domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a policy breaks the engine's selection contract.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using TypeIndex = std::size_t;
using JobIndex = std::size_t;

/// Identifies the i-th job (0-based) of type k (0-based).
struct JobId {
  TypeIndex type = 0;
  JobIndex index = 0;

  friend bool operator==(const JobId&, const JobId&) = default;
};

/// Expected sizes of the K job types and the number of jobs per type.
///
/// The order of `lambdas` carries no meaning; formulas that need the
/// ascending order sort a copy.
class TypeParams {
 public:
  TypeParams(std::vector<double> lambdas, std::size_t jobs_per_type);

  [[nodiscard]] const std::vector<double>& lambdas() const { return lambdas_; }
  [[nodiscard]] double lambda(TypeIndex k) const { return lambdas_.at(k); }
  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::size_t num_types() const { return lambdas_.size(); }
  [[nodiscard]] std::size_t num_jobs() const { return n_ * lambdas_.size(); }

  [[nodiscard]] std::vector<double> sorted_lambdas() const;
  [[nodiscard]] double lambda_sum() const;

  friend bool operator==(const TypeParams&, const TypeParams&) = default;

 private:
  std::vector<double> lambdas_;
  std::size_t n_;
};

}  // namespace stosched
