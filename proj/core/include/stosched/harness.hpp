#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stosched/policies.hpp"
#include "stosched/types.hpp"

namespace stosched::harness {

/// Malformed experiment configuration; the message names the offending field.
class ConfigError : public ParameterError {
 public:
  ConfigError(std::string field, const std::string& message)
      : ParameterError("config field '" + field + "': " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Aggregation { kMeanOfRatios, kRatioOfMeans };

[[nodiscard]] std::string_view to_string(Aggregation mode);

struct GridPoint {
  std::vector<double> lambdas;
  std::size_t n = 0;
};

struct ExperimentConfig {
  std::vector<PolicyKind> policies;
  std::vector<std::vector<double>> lambdas;
  std::vector<std::size_t> n;
  std::size_t seeds = 1;
  std::uint64_t base_seed = 0;
  PolicyOptions options;
  Aggregation aggregation = Aggregation::kMeanOfRatios;

  /// lambdas-major, n-minor.
  [[nodiscard]] std::vector<GridPoint> grid() const;
  void validate() const;
};

/// Fields: policies, lambdas (list or list of lists), n (int or list), k,
/// seeds, base_seed, delta, bonus ("log-n2k2" | "log-n2"), delta_constant
/// ("k3" | "k4"), aggregation ("mean-of-ratios" | "ratio-of-means").
[[nodiscard]] ExperimentConfig parse_config(std::string_view json_text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

struct ExperimentRecord {
  PolicyKind policy = PolicyKind::kOpt;
  std::size_t K = 0;
  std::size_t n = 0;
  std::vector<double> lambdas;
  std::uint64_t seed = 0;
  double flow = 0.0;
  double opt_flow = 0.0;
  double ftpp_flow = 0.0;
  double cr = 0.0;
  double excess = 0.0;
  /// Empty unless the run failed; numeric fields are NaN then.
  std::string error;
};

/// One instance per (grid point, seed), shared by every policy. Output is
/// ordered by (grid point, policy, seed) whatever the worker count.
[[nodiscard]] std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config, std::size_t jobs = 1);

struct SummaryRow {
  PolicyKind policy = PolicyKind::kOpt;
  std::size_t K = 0;
  std::size_t n = 0;
  std::vector<double> lambdas;
  double mean_cr = 0.0;
  double stderr_cr = 0.0;
  double mean_excess = 0.0;
  double stderr_excess = 0.0;
  std::size_t count = 0;
  /// 95% interval for the CR: normal for mean-of-ratios, bootstrap otherwise.
  double cr_low = 0.0;
  double cr_high = 0.0;
};

inline constexpr std::size_t kBootstrapResamples = 1000;
inline constexpr std::uint64_t kBootstrapSeed = 0x5eedb007u;

/// Groups by (grid point, policy) in record order; failed records are skipped.
[[nodiscard]] std::vector<SummaryRow> aggregate(const std::vector<ExperimentRecord>& records,
                                                Aggregation mode = Aggregation::kMeanOfRatios);

struct MeanStderr {
  double mean = 0.0;
  double se = 0.0;
};
[[nodiscard]] MeanStderr mean_stderr(const std::vector<double>& values);

/// Per-seed (cr - cr_FTPP) for every non-FTPP policy of each grid point.
struct ExcessCrRow {
  PolicyKind policy = PolicyKind::kOpt;
  std::size_t n = 0;
  std::vector<double> lambdas;
  double excess_cr = 0.0;
  double stderr_excess_cr = 0.0;
  std::size_t count = 0;
};
[[nodiscard]] std::vector<ExcessCrRow> excess_cr(const std::vector<ExperimentRecord>& records);

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
/// Both aggregations side by side with their 95% intervals.
void write_cr_summary_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
void write_excess_cr_csv(std::ostream& out, const std::vector<ExcessCrRow>& rows);

/// Writes records.csv, summary.csv and cr_summary.csv into `dir`.
void write_experiment_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                              const std::vector<ExperimentRecord>& records);

/// "%.12g" formatting used by every CSV column.
[[nodiscard]] std::string format_real(double value);
[[nodiscard]] std::string format_lambdas(const std::vector<double>& lambdas);

}  // namespace stosched::harness
