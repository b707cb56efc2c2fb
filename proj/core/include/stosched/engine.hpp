#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "stosched/instance.hpp"
#include "stosched/types.hpp"

namespace stosched {

/// Begin/end dates and processor time of every job after one run.
/// Matrices are row-major like Instance: entry (i, k) at i * K + k.
struct RunTrace {
  std::size_t n = 0;
  std::size_t K = 0;
  std::vector<double> begin;
  std::vector<double> end;
  std::vector<double> processed;
  /// Jobs in the order they completed.
  std::vector<JobId> completion_order;
  double flow_time = 0.0;

  [[nodiscard]] double begin_of(JobIndex i, TypeIndex k) const { return begin[i * K + k]; }
  [[nodiscard]] double end_of(JobIndex i, TypeIndex k) const { return end[i * K + k]; }
  [[nodiscard]] double processed_of(JobIndex i, TypeIndex k) const { return processed[i * K + k]; }
  [[nodiscard]] double makespan() const;

  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

/// What a policy may see: completed sizes and progress counters, never the
/// remaining work of a running job.
class Observation {
 public:
  Observation(std::size_t n, std::size_t K);

  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::size_t num_types() const { return K_; }
  [[nodiscard]] double now() const { return now_; }
  /// m_k: number of completed jobs of type k.
  [[nodiscard]] std::size_t completed(TypeIndex k) const { return sizes_[k].size(); }
  [[nodiscard]] bool exhausted(TypeIndex k) const { return completed(k) == n_; }
  /// Size of the r-th completed job of type k (0-based).
  [[nodiscard]] double completed_size(TypeIndex k, std::size_t r) const;
  [[nodiscard]] std::span<const double> completed_sizes(TypeIndex k) const { return sizes_[k]; }
  /// U: incomplete types in ascending index order.
  [[nodiscard]] std::span<const TypeIndex> unfinished() const { return unfinished_; }

 private:
  friend class EngineState;
  std::size_t n_;
  std::size_t K_;
  double now_ = 0.0;
  std::vector<std::vector<double>> sizes_;
  std::vector<TypeIndex> unfinished_;
};

/// Type selection for Algorithm-1 style runs: a chosen job runs to completion.
class NonpreemptivePolicy {
 public:
  virtual ~NonpreemptivePolicy() = default;
  [[nodiscard]] virtual TypeIndex select(const Observation& obs) = 0;
  virtual void on_completion(const Observation& obs, TypeIndex k, double size) {
    (void)obs, (void)k, (void)size;
  }
};

/// Processor-sharing controller: consulted at start and at every completion.
class SharingPolicy {
 public:
  virtual ~SharingPolicy() = default;
  /// Fills `out` with a non-empty subset of obs.unfinished().
  virtual void active_set(const Observation& obs, std::vector<TypeIndex>& out) = 0;
  /// Type k just completed a job while `active` were sharing the machine.
  virtual void on_completion(const Observation& obs, TypeIndex k, std::span<const TypeIndex> active) {
    (void)obs, (void)k, (void)active;
  }
};

struct SlotRequest {
  TypeIndex type = 0;
  std::uint64_t slots = 1;
  /// Run the current job of `type` until it completes, ignoring `slots`.
  bool to_completion = false;
};

/// Delta-slotted policy. One decision epoch covers `slots` slots or ends early
/// at the completion of the running job.
class SlottedPolicy {
 public:
  virtual ~SlottedPolicy() = default;
  [[nodiscard]] virtual SlotRequest next(const Observation& obs) = 0;
  /// `failures` slots ended without completion; `success` marks a final
  /// slot in which the job completed.
  virtual void on_slots(const Observation& obs, TypeIndex k, std::uint64_t failures, bool success) = 0;
};

/// Repeatedly runs the next job of the selected type to completion.
[[nodiscard]] RunTrace run_nonpreemptive(const Instance& instance, NonpreemptivePolicy& policy);

/// Runs an explicit permutation of all jobs back to back.
[[nodiscard]] RunTrace run_sequence(const Instance& instance, std::span<const JobId> order);

/// Exact fluid processor sharing among the current job of each active type.
[[nodiscard]] RunTrace run_processor_sharing(const Instance& instance, SharingPolicy& policy);

/// Per-job processor sharing among all unfinished jobs (every job starts at 0).
[[nodiscard]] RunTrace run_round_robin(const Instance& instance);

/// Slots of length delta; completion times are exact, not rounded to slot ends.
[[nodiscard]] RunTrace run_slotted(const Instance& instance, SlottedPolicy& policy, double delta);

enum class InversionMode {
  /// end <= begin: back-to-back jobs count, as needed for non-preemptive traces.
  kInclusive,
  /// end < begin.
  kStrict,
};

/// counts[k * K + l] = #{(i, j): end[j][k] (<= or <) begin[i][l]}.
[[nodiscard]] std::vector<std::uint64_t> inversion_counts(const RunTrace& trace,
                                                          InversionMode mode = InversionMode::kInclusive);

/// end[i][k] <= begin[i+1][k] for every type.
[[nodiscard]] bool is_typewise_nonpreemptive(const RunTrace& trace);

/// Largest relative gap between processed and realized size over all jobs.
[[nodiscard]] double max_processing_error(const RunTrace& trace, const Instance& instance);

/// CSV rows `type,job_index,begin,end` (1-based type and job index).
void write_trace_csv(std::ostream& out, const RunTrace& trace);

}  // namespace stosched
