#include "stosched/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "stosched/instance.hpp"
#include "stosched/random.hpp"

namespace stosched::harness {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string_view>& known_fields() {
  static const std::vector<std::string_view> fields{
      "policies", "lambdas", "n", "k", "seeds", "base_seed", "delta", "bonus", "delta_constant", "aggregation"};
  return fields;
}

std::uint64_t read_uint(const json& j, const char* field, std::uint64_t min) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) throw ConfigError(field, "expected an integer");
  if (j.is_number_integer() && j.get<std::int64_t>() < 0) throw ConfigError(field, "must be nonnegative");
  const auto v = j.get<std::uint64_t>();
  if (v < min) throw ConfigError(field, "must be at least " + std::to_string(min));
  return v;
}

std::vector<double> read_lambda_list(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("lambdas", "expected a non-empty list of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError("lambdas", "expected numbers");
    const double l = v.get<double>();
    if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("lambdas", "every lambda must be positive");
    out.push_back(l);
  }
  return out;
}

}  // namespace

std::string_view to_string(Aggregation mode) {
  return mode == Aggregation::kMeanOfRatios ? "mean-of-ratios" : "ratio-of-means";
}

std::vector<GridPoint> ExperimentConfig::grid() const {
  std::vector<GridPoint> out;
  for (const auto& l : lambdas) {
    for (std::size_t nn : n) out.push_back({l, nn});
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (policies.empty()) throw ConfigError("policies", "at least one policy is required");
  if (lambdas.empty()) throw ConfigError("lambdas", "grid is empty");
  if (n.empty()) throw ConfigError("n", "grid is empty");
  if (seeds == 0) throw ConfigError("seeds", "must be at least 1");
  if (!(options.delta > 0.0)) throw ConfigError("delta", "must be positive");
  for (std::size_t v : n) {
    if (v == 0) throw ConfigError("n", "must be positive");
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("<document>", "expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto& known = known_fields();
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError(key, "unknown field");
  }

  ExperimentConfig c;
  if (!j.contains("policies")) throw ConfigError("policies", "missing");
  const json& pol = j["policies"];
  if (!pol.is_array() || pol.empty()) throw ConfigError("policies", "expected a non-empty list of names");
  for (const auto& p : pol) {
    if (!p.is_string()) throw ConfigError("policies", "expected policy names");
    try {
      c.policies.push_back(parse_policy(p.get<std::string>()));
    } catch (const ParameterError& e) {
      throw ConfigError("policies", e.what());
    }
  }

  if (!j.contains("lambdas")) throw ConfigError("lambdas", "missing");
  const json& lam = j["lambdas"];
  if (lam.is_array() && !lam.empty() && lam.front().is_array()) {
    for (const auto& row : lam) c.lambdas.push_back(read_lambda_list(row));
  } else {
    c.lambdas.push_back(read_lambda_list(lam));
  }

  if (!j.contains("n")) throw ConfigError("n", "missing");
  const json& n = j["n"];
  if (n.is_array()) {
    if (n.empty()) throw ConfigError("n", "grid is empty");
    for (const auto& v : n) c.n.push_back(read_uint(v, "n", 1));
  } else {
    c.n.push_back(read_uint(n, "n", 1));
  }

  if (j.contains("k")) {
    const auto k = read_uint(j["k"], "k", 1);
    for (const auto& l : c.lambdas) {
      if (l.size() != k) throw ConfigError("k", "does not match the number of lambdas");
    }
  }
  if (j.contains("seeds")) c.seeds = read_uint(j["seeds"], "seeds", 1);
  if (j.contains("base_seed")) c.base_seed = read_uint(j["base_seed"], "base_seed", 0);
  if (j.contains("delta")) {
    if (!j["delta"].is_number() || !(j["delta"].get<double>() > 0.0)) {
      throw ConfigError("delta", "expected a positive number");
    }
    c.options.delta = j["delta"].get<double>();
  }
  if (j.contains("bonus")) {
    const auto& b = j["bonus"];
    if (b == "log-n2k2") {
      c.options.bonus = stats::KlucbBonus::kLogN2K2;
    } else if (b == "log-n2") {
      c.options.bonus = stats::KlucbBonus::kLogN2;
    } else {
      throw ConfigError("bonus", "expected \"log-n2k2\" or \"log-n2\"");
    }
  }
  if (j.contains("delta_constant")) {
    const auto& d = j["delta_constant"];
    if (d == "k3") {
      c.options.hoeffding = stats::HoeffdingConstant::kCubic;
    } else if (d == "k4") {
      c.options.hoeffding = stats::HoeffdingConstant::kQuartic;
    } else {
      throw ConfigError("delta_constant", "expected \"k3\" or \"k4\"");
    }
  }
  if (j.contains("aggregation")) {
    const auto& a = j["aggregation"];
    if (a == "mean-of-ratios") {
      c.aggregation = Aggregation::kMeanOfRatios;
    } else if (a == "ratio-of-means") {
      c.aggregation = Aggregation::kRatioOfMeans;
    } else {
      throw ConfigError("aggregation", "expected \"mean-of-ratios\" or \"ratio-of-means\"");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<document>", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

// All records of one (grid point, seed) task, in config policy order.
std::vector<ExperimentRecord> run_task(const ExperimentConfig& config, const GridPoint& point,
                                       std::uint64_t seed) {
  const TypeParams params(point.lambdas, point.n);
  const Instance instance = sample_instance(params, seed);
  const double opt = run_policy(PolicyKind::kOpt, instance, config.options).flow_time;
  const double ftpp = run_policy(PolicyKind::kFtpp, instance, config.options).flow_time;

  std::vector<ExperimentRecord> out;
  out.reserve(config.policies.size());
  for (PolicyKind kind : config.policies) {
    ExperimentRecord r;
    r.policy = kind;
    r.K = params.num_types();
    r.n = params.n();
    r.lambdas = point.lambdas;
    r.seed = seed;
    r.opt_flow = opt;
    r.ftpp_flow = ftpp;
    try {
      if (kind == PolicyKind::kOpt) {
        r.flow = opt;
      } else if (kind == PolicyKind::kFtpp) {
        r.flow = ftpp;
      } else {
        r.flow = run_policy(kind, instance, config.options).flow_time;
      }
      r.cr = r.flow / opt;
      r.excess = r.flow - ftpp;
    } catch (const std::exception& e) {
      r.error = e.what();
      r.flow = r.cr = r.excess = kNaN;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config, std::size_t jobs) {
  config.validate();
  const auto grid = config.grid();
  const std::size_t S = config.seeds;
  const std::size_t tasks = grid.size() * S;
  std::vector<std::vector<ExperimentRecord>> results(tasks);

  auto work = [&](std::size_t t) { results[t] = run_task(config, grid[t / S], config.base_seed + t % S); };

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, tasks);
  if (jobs <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) work(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < tasks; t = next++) {
          try {
            work(t);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  // Reorder to (grid point, policy, seed).
  std::vector<ExperimentRecord> records;
  records.reserve(tasks * config.policies.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
      for (std::size_t s = 0; s < S; ++s) records.push_back(std::move(results[g * S + s][p]));
    }
  }
  return records;
}

MeanStderr mean_stderr(const std::vector<double>& values) {
  MeanStderr r;
  if (values.empty()) return {kNaN, kNaN};
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  const double m = static_cast<double>(values.size());
  r.se = std::sqrt(ss / (m - 1.0) / m);
  return r;
}

namespace {

struct Group {
  PolicyKind policy;
  std::size_t K;
  std::size_t n;
  std::vector<double> lambdas;
  std::vector<const ExperimentRecord*> rows;
};

// Groups in first-appearance order of (lambdas, n, policy).
std::vector<Group> group_records(const std::vector<ExperimentRecord>& records) {
  std::vector<Group> groups;
  std::map<std::tuple<std::vector<double>, std::size_t, int>, std::size_t> where;
  for (const auto& r : records) {
    const auto key = std::make_tuple(r.lambdas, r.n, static_cast<int>(r.policy));
    auto [it, inserted] = where.try_emplace(key, groups.size());
    if (inserted) groups.push_back({r.policy, r.K, r.n, r.lambdas, {}});
    if (r.error.empty()) groups[it->second].rows.push_back(&r);
  }
  return groups;
}

// Percentile bootstrap of mean(flow) / mean(opt_flow).
std::pair<double, double> bootstrap_ratio(const std::vector<const ExperimentRecord*>& rows, std::size_t group,
                                          double* se) {
  const std::size_t m = rows.size();
  const Philox4x32 gen(kBootstrapSeed);
  std::vector<double> stats;
  stats.reserve(kBootstrapResamples);
  for (std::size_t b = 0; b < kBootstrapResamples; ++b) {
    double f = 0.0;
    double o = 0.0;
    for (std::size_t d = 0; d < m; d += 4) {
      const auto words = gen({static_cast<std::uint32_t>(group), static_cast<std::uint32_t>(b),
                              static_cast<std::uint32_t>(d / 4), 1});
      for (std::size_t w = 0; w < 4 && d + w < m; ++w) {
        const std::size_t idx = static_cast<std::size_t>((std::uint64_t{words[w]} * m) >> 32);
        f += rows[idx]->flow;
        o += rows[idx]->opt_flow;
      }
    }
    stats.push_back(f / o);
  }
  std::sort(stats.begin(), stats.end());
  const auto s = mean_stderr(stats);
  // Spread of the bootstrap distribution estimates the ratio's standard error.
  *se = s.se * std::sqrt(static_cast<double>(stats.size()));
  const auto at = [&](double q) { return stats[static_cast<std::size_t>(q * (stats.size() - 1) + 0.5)]; };
  return {at(0.025), at(0.975)};
}

}  // namespace

std::vector<SummaryRow> aggregate(const std::vector<ExperimentRecord>& records, Aggregation mode) {
  std::vector<SummaryRow> out;
  const auto groups = group_records(records);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Group& grp = groups[g];
    SummaryRow row;
    row.policy = grp.policy;
    row.K = grp.K;
    row.n = grp.n;
    row.lambdas = grp.lambdas;
    row.count = grp.rows.size();
    std::vector<double> crs;
    std::vector<double> excess;
    for (const auto* r : grp.rows) {
      crs.push_back(r->cr);
      excess.push_back(r->excess);
    }
    const auto e = mean_stderr(excess);
    row.mean_excess = e.mean;
    row.stderr_excess = e.se;
    if (mode == Aggregation::kMeanOfRatios || grp.rows.empty()) {
      const auto c = mean_stderr(crs);
      row.mean_cr = c.mean;
      row.stderr_cr = c.se;
      row.cr_low = c.mean - 1.96 * c.se;
      row.cr_high = c.mean + 1.96 * c.se;
    } else {
      double f = 0.0;
      double o = 0.0;
      for (const auto* r : grp.rows) {
        f += r->flow;
        o += r->opt_flow;
      }
      row.mean_cr = f / o;
      std::tie(row.cr_low, row.cr_high) = bootstrap_ratio(grp.rows, g, &row.stderr_cr);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<ExcessCrRow> excess_cr(const std::vector<ExperimentRecord>& records) {
  // cr_FTPP per (lambdas, n, seed) equals ftpp_flow / opt_flow of any record.
  std::vector<ExcessCrRow> out;
  for (const Group& grp : group_records(records)) {
    if (grp.policy == PolicyKind::kFtpp) continue;
    std::vector<double> diff;
    for (const auto* r : grp.rows) diff.push_back(r->cr - r->ftpp_flow / r->opt_flow);
    const auto s = mean_stderr(diff);
    out.push_back({grp.policy, grp.n, grp.lambdas, s.mean, s.se, diff.size()});
  }
  return out;
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string format_lambdas(const std::vector<double>& lambdas) {
  std::string s;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (k) s += ';';
    s += format_real(lambdas[k]);
  }
  return s;
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << "policy,K,n,lambdas,seed,flow,opt_flow,ftpp_flow,cr,excess\n";
  for (const auto& r : records) {
    out << policy_name(r.policy) << ',' << r.K << ',' << r.n << ',' << format_lambdas(r.lambdas) << ','
        << r.seed << ',' << format_real(r.flow) << ',' << format_real(r.opt_flow) << ','
        << format_real(r.ftpp_flow) << ',' << format_real(r.cr) << ',' << format_real(r.excess) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "policy,K,n,lambdas,mean_cr,stderr_cr,mean_excess,stderr_excess,count\n";
  for (const auto& r : rows) {
    out << policy_name(r.policy) << ',' << r.K << ',' << r.n << ',' << format_lambdas(r.lambdas) << ','
        << format_real(r.mean_cr) << ',' << format_real(r.stderr_cr) << ',' << format_real(r.mean_excess)
        << ',' << format_real(r.stderr_excess) << ',' << r.count << '\n';
  }
}

void write_cr_summary_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  const auto mor = aggregate(records, Aggregation::kMeanOfRatios);
  const auto rom = aggregate(records, Aggregation::kRatioOfMeans);
  out << "policy,K,n,lambdas,mean_of_ratios,mor_stderr,mor_low,mor_high,ratio_of_means,rom_stderr,rom_low,"
         "rom_high,count\n";
  for (std::size_t i = 0; i < mor.size(); ++i) {
    const auto& a = mor[i];
    const auto& b = rom[i];
    out << policy_name(a.policy) << ',' << a.K << ',' << a.n << ',' << format_lambdas(a.lambdas) << ','
        << format_real(a.mean_cr) << ',' << format_real(a.stderr_cr) << ',' << format_real(a.cr_low) << ','
        << format_real(a.cr_high) << ',' << format_real(b.mean_cr) << ',' << format_real(b.stderr_cr) << ','
        << format_real(b.cr_low) << ',' << format_real(b.cr_high) << ',' << a.count << '\n';
  }
}

void write_excess_cr_csv(std::ostream& out, const std::vector<ExcessCrRow>& rows) {
  out << "policy,n,lambdas,lambda_1,excess_cr,stderr_excess_cr,count\n";
  for (const auto& r : rows) {
    out << policy_name(r.policy) << ',' << r.n << ',' << format_lambdas(r.lambdas) << ','
        << format_real(r.lambdas.front()) << ',' << format_real(r.excess_cr) << ','
        << format_real(r.stderr_excess_cr) << ',' << r.count << '\n';
  }
}

void write_experiment_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                              const std::vector<ExperimentRecord>& records) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("records.csv");
    write_records_csv(f, records);
  }
  {
    auto f = open("summary.csv");
    write_summary_csv(f, aggregate(records, config.aggregation));
  }
  {
    auto f = open("cr_summary.csv");
    write_cr_summary_csv(f, records);
  }
  {
    json m;
    m["generator"] = generator_id();
    std::vector<std::string> names;
    for (PolicyKind p : config.policies) names.emplace_back(policy_name(p));
    m["policies"] = names;
    m["lambdas"] = config.lambdas;
    m["n"] = config.n;
    m["seeds"] = config.seeds;
    m["base_seed"] = config.base_seed;
    m["delta"] = config.options.delta;
    m["bonus"] = config.options.bonus == stats::KlucbBonus::kLogN2K2 ? "log-n2k2" : "log-n2";
    m["delta_constant"] = config.options.hoeffding == stats::HoeffdingConstant::kCubic ? "k3" : "k4";
    m["aggregation"] = std::string(to_string(config.aggregation));
    auto f = open("manifest.json");
    f << m.dump(2) << '\n';
  }
}

}  // namespace stosched::harness
