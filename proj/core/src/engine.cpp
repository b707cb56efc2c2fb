#include "stosched/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

namespace stosched {

Observation::Observation(std::size_t n, std::size_t K) : n_(n), K_(K), sizes_(K), unfinished_(K) {
  std::iota(unfinished_.begin(), unfinished_.end(), TypeIndex{0});
  for (auto& s : sizes_) s.reserve(n);
}

double Observation::completed_size(TypeIndex k, std::size_t r) const {
  if (k >= K_ || r >= sizes_[k].size()) {
    throw ContractViolation("Observation: size of a job that has not completed");
  }
  return sizes_[k][r];
}

double RunTrace::makespan() const {
  return end.empty() ? 0.0 : *std::max_element(end.begin(), end.end());
}

// Mutable run state shared by every mode. Jobs of one type are always taken
// in index order, so "the current job of type k" is next_[k].
class EngineState {
 public:
  explicit EngineState(const Instance& instance)
      : instance_(instance), obs_(instance.n(), instance.num_types()), next_(instance.num_types(), 0),
        started_(instance.params().num_jobs(), false) {
    const std::size_t N = instance.params().num_jobs();
    trace_.n = instance.n();
    trace_.K = instance.num_types();
    trace_.begin.assign(N, 0.0);
    trace_.end.assign(N, 0.0);
    trace_.processed.assign(N, 0.0);
    trace_.completion_order.reserve(N);
  }

  const Observation& obs() const { return obs_; }
  double now() const { return obs_.now_; }
  void advance(double dt) { obs_.now_ += dt; }
  bool done() const { return obs_.unfinished_.empty(); }

  void require_unfinished(TypeIndex k, const char* who) const {
    if (k >= obs_.K_ || obs_.exhausted(k)) {
      throw ContractViolation(std::string(who) + ": selected type " + std::to_string(k) +
                              " has no remaining job");
    }
  }

  JobId current(TypeIndex k) const { return {k, next_[k]}; }
  std::size_t slot(JobId job) const { return job.index * obs_.K_ + job.type; }
  double size(JobId job) const { return instance_.size(job); }

  void mark_started(JobId job) {
    const std::size_t s = slot(job);
    if (!started_[s]) {
      started_[s] = true;
      trace_.begin[s] = now();
    }
  }

  void add_processing(JobId job, double amount) { trace_.processed[slot(job)] += amount; }

  // Completes the current job of type k at the current time.
  void complete(TypeIndex k) {
    const JobId job = current(k);
    trace_.end[slot(job)] = now();
    trace_.completion_order.push_back(job);
    obs_.sizes_[k].push_back(size(job));
    ++next_[k];
    if (obs_.exhausted(k)) {
      auto& u = obs_.unfinished_;
      u.erase(std::find(u.begin(), u.end(), k));
    }
  }

  RunTrace finish() {
    trace_.flow_time = 0.0;
    for (double e : trace_.end) trace_.flow_time += e;
    return std::move(trace_);
  }

 private:
  const Instance& instance_;
  Observation obs_;
  std::vector<JobIndex> next_;
  std::vector<bool> started_;
  RunTrace trace_;
};

RunTrace run_nonpreemptive(const Instance& instance, NonpreemptivePolicy& policy) {
  EngineState st(instance);
  while (!st.done()) {
    const TypeIndex k = policy.select(st.obs());
    st.require_unfinished(k, "run_nonpreemptive");
    const JobId job = st.current(k);
    const double p = st.size(job);
    st.mark_started(job);
    st.advance(p);
    st.add_processing(job, p);
    st.complete(k);
    policy.on_completion(st.obs(), k, p);
  }
  return st.finish();
}

RunTrace run_sequence(const Instance& instance, std::span<const JobId> order) {
  const std::size_t n = instance.n();
  const std::size_t K = instance.num_types();
  if (order.size() != n * K) throw ContractViolation("run_sequence: order must list every job once");
  std::vector<bool> seen(n * K, false);
  for (const JobId& job : order) {
    if (job.type >= K || job.index >= n || seen[job.index * K + job.type]) {
      throw ContractViolation("run_sequence: order must list every job once");
    }
    seen[job.index * K + job.type] = true;
  }

  RunTrace trace;
  trace.n = n;
  trace.K = K;
  trace.begin.assign(n * K, 0.0);
  trace.end.assign(n * K, 0.0);
  trace.processed.assign(n * K, 0.0);
  trace.completion_order.assign(order.begin(), order.end());
  double now = 0.0;
  for (const JobId& job : order) {
    const std::size_t s = job.index * K + job.type;
    const double p = instance.size(job);
    trace.begin[s] = now;
    now += p;
    trace.end[s] = now;
    trace.processed[s] = p;
  }
  for (double e : trace.end) trace.flow_time += e;
  return trace;
}

RunTrace run_processor_sharing(const Instance& instance, SharingPolicy& policy) {
  EngineState st(instance);
  const std::size_t K = instance.num_types();
  std::vector<double> remaining(K, 0.0);
  std::vector<bool> loaded(K, false);
  std::vector<TypeIndex> active;
  active.reserve(K);

  while (!st.done()) {
    active.clear();
    policy.active_set(st.obs(), active);
    if (active.empty()) throw ContractViolation("run_processor_sharing: empty active set");
    for (TypeIndex k : active) {
      st.require_unfinished(k, "run_processor_sharing");
      if (!loaded[k]) {
        remaining[k] = st.size(st.current(k));
        loaded[k] = true;
      }
      st.mark_started(st.current(k));
    }
    if (std::adjacent_find(active.begin(), active.end(), std::greater_equal<>()) != active.end()) {
      std::sort(active.begin(), active.end());
      if (std::adjacent_find(active.begin(), active.end()) != active.end()) {
        throw ContractViolation("run_processor_sharing: duplicate type in active set");
      }
    }

    // Lowest type index wins ties.
    TypeIndex winner = active.front();
    for (TypeIndex k : active) {
      if (remaining[k] < remaining[winner]) winner = k;
    }
    const double r = remaining[winner];
    st.advance(static_cast<double>(active.size()) * r);
    for (TypeIndex k : active) {
      st.add_processing(st.current(k), r);
      remaining[k] -= r;
    }
    remaining[winner] = 0.0;
    loaded[winner] = false;
    st.complete(winner);
    policy.on_completion(st.obs(), winner, active);
  }
  return st.finish();
}

RunTrace run_round_robin(const Instance& instance) {
  const std::size_t n = instance.n();
  const std::size_t K = instance.num_types();
  const std::size_t N = n * K;
  std::vector<JobId> order;
  order.reserve(N);
  for (TypeIndex k = 0; k < K; ++k) {
    for (JobIndex i = 0; i < n; ++i) order.push_back({k, i});
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](const JobId& a, const JobId& b) { return instance.size(a) < instance.size(b); });

  RunTrace trace;
  trace.n = n;
  trace.K = K;
  trace.begin.assign(N, 0.0);
  trace.end.assign(N, 0.0);
  trace.processed.assign(N, 0.0);
  trace.completion_order = order;
  // With j jobs already done, the remaining N - j share the machine equally,
  // so the next one ends (N - j) * (its size - previous size) later.
  double now = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    const JobId job = order[j];
    const double p = instance.size(job);
    now += static_cast<double>(N - j) * (p - prev);
    prev = p;
    const std::size_t s = job.index * K + job.type;
    trace.end[s] = now;
    trace.processed[s] = p;
  }
  for (double e : trace.end) trace.flow_time += e;
  return trace;
}

RunTrace run_slotted(const Instance& instance, SlottedPolicy& policy, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("run_slotted: delta must be positive");
  EngineState st(instance);
  const std::size_t K = instance.num_types();
  std::vector<double> remaining(K, 0.0);
  std::vector<bool> loaded(K, false);

  while (!st.done()) {
    const SlotRequest req = policy.next(st.obs());
    const TypeIndex k = req.type;
    st.require_unfinished(k, "run_slotted");
    if (!req.to_completion && req.slots == 0) throw ContractViolation("run_slotted: zero-slot request");
    const JobId job = st.current(k);
    if (!loaded[k]) {
      remaining[k] = st.size(job);
      loaded[k] = true;
    }
    st.mark_started(job);

    const double rem = remaining[k];
    const double needed = std::max(1.0, std::ceil(rem / delta));
    if (req.to_completion || needed <= static_cast<double>(req.slots)) {
      st.advance(rem);
      st.add_processing(job, rem);
      remaining[k] = 0.0;
      loaded[k] = false;
      st.complete(k);
      policy.on_slots(st.obs(), k, static_cast<std::uint64_t>(needed) - 1, true);
    } else {
      const double run = static_cast<double>(req.slots) * delta;
      st.advance(run);
      st.add_processing(job, run);
      remaining[k] = rem - run;
      policy.on_slots(st.obs(), k, req.slots, false);
    }
  }
  return st.finish();
}

std::vector<std::uint64_t> inversion_counts(const RunTrace& trace, InversionMode mode) {
  const std::size_t n = trace.n;
  const std::size_t K = trace.K;
  std::vector<std::vector<double>> begins(K);
  for (TypeIndex l = 0; l < K; ++l) {
    begins[l].reserve(n);
    for (JobIndex i = 0; i < n; ++i) begins[l].push_back(trace.begin_of(i, l));
    std::sort(begins[l].begin(), begins[l].end());
  }
  std::vector<std::uint64_t> counts(K * K, 0);
  for (TypeIndex k = 0; k < K; ++k) {
    for (TypeIndex l = 0; l < K; ++l) {
      if (k == l) continue;
      const auto& b = begins[l];
      std::uint64_t c = 0;
      for (JobIndex j = 0; j < n; ++j) {
        const double e = trace.end_of(j, k);
        const auto it = mode == InversionMode::kInclusive ? std::lower_bound(b.begin(), b.end(), e)
                                                          : std::upper_bound(b.begin(), b.end(), e);
        c += static_cast<std::uint64_t>(b.end() - it);
      }
      counts[k * K + l] = c;
    }
  }
  return counts;
}

bool is_typewise_nonpreemptive(const RunTrace& trace) {
  for (TypeIndex k = 0; k < trace.K; ++k) {
    for (JobIndex i = 0; i + 1 < trace.n; ++i) {
      if (trace.end_of(i, k) > trace.begin_of(i + 1, k)) return false;
    }
  }
  return true;
}

double max_processing_error(const RunTrace& trace, const Instance& instance) {
  double worst = 0.0;
  for (JobIndex i = 0; i < trace.n; ++i) {
    for (TypeIndex k = 0; k < trace.K; ++k) {
      const double p = instance.size(i, k);
      worst = std::max(worst, std::abs(trace.processed_of(i, k) - p) / p);
    }
  }
  return worst;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "type,job_index,begin,end\n";
  char buf[96];
  for (TypeIndex k = 0; k < trace.K; ++k) {
    for (JobIndex i = 0; i < trace.n; ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", k + 1, i + 1, trace.begin_of(i, k),
                    trace.end_of(i, k));
      out << buf;
    }
  }
}

}  // namespace stosched
