#include "cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stosched/analytics.hpp"
#include "stosched/harness.hpp"
#include "stosched/instance.hpp"
#include "stosched/policies.hpp"

namespace stosched::cli {

namespace {

using nlohmann::json;
namespace an = stosched::analytics;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_lambdas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || p != field.data() + field.size()) {
      throw UsageError("--lambdas: cannot parse '" + field + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--lambdas: empty list");
  return out;
}

const std::vector<std::string>& formula_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v{"cost-opt", "cost-ftpp", "cost-rr", "cr-ftpp", "cr-rr", "cr-ftpp-upper-2types",
                               "cr-ftpp-upper-ktypes", "fk", "tilde-series"};
    for (auto b : an::all_upper_bounds()) v.push_back("upper-" + std::string(an::to_string(b)));
    for (auto b : an::all_lower_bounds()) v.push_back("lower-" + std::string(an::to_string(b)));
    return v;
  }();
  return names;
}

struct AnalyticArgs {
  std::string formula;
  std::string lambdas;
  std::size_t n = 1;
  double delta = 0.0;
  std::size_t k = 0;
  double lambda = 0.0;
};

json evaluate(const AnalyticArgs& a) {
  json params;
  const auto& names = formula_names();
  if (std::find(names.begin(), names.end(), a.formula) == names.end()) {
    throw UsageError("unknown formula '" + a.formula + "'");
  }
  double value = 0.0;
  if (a.formula == "cr-ftpp-upper-2types") {
    params["lambda"] = a.lambda;
    value = an::cr_ftpp_upper_2types(a.lambda);
  } else if (a.formula == "tilde-series") {
    if (a.k == 0) throw UsageError("tilde-series needs --k");
    const auto t = an::cr_ftpp_tilde_series(a.k, a.k <= 64);
    params["k"] = a.k;
    if (!t.lambdas.empty()) params["lambdas"] = t.lambdas;
    params["H"] = t.H;
    params["B"] = t.B;
    params["A"] = t.A;
    value = t.cr;
  } else {
    if (a.lambdas.empty()) throw UsageError(a.formula + " needs --lambdas");
    const TypeParams p(parse_lambdas(a.lambdas), a.n);
    params["lambdas"] = p.lambdas();
    params["n"] = p.n();
    if (a.formula == "cost-opt") {
      value = an::expected_cost_opt(p);
    } else if (a.formula == "cost-ftpp") {
      value = an::expected_cost_ftpp(p);
    } else if (a.formula == "cost-rr") {
      value = an::expected_cost_rr(p);
    } else if (a.formula == "cr-ftpp") {
      value = an::cr_ftpp_exact(p);
    } else if (a.formula == "cr-rr") {
      value = an::cr_rr(p);
    } else if (a.formula == "cr-ftpp-upper-ktypes") {
      value = an::cr_ftpp_upper_Ktypes(p.lambdas());
    } else if (a.formula == "fk") {
      value = an::ftpp_bound_fk(p.lambdas());
    } else if (a.formula.starts_with("upper-")) {
      params["delta"] = a.delta;
      value = an::excess_upper_bound(an::parse_upper_bound(a.formula.substr(6)), p, a.delta);
    } else {
      value = an::excess_lower_bound(an::parse_lower_bound(a.formula.substr(6)), p);
    }
  }
  return json{{"kind", a.formula}, {"params", params}, {"value", value}};
}

struct FigureRun {
  const char* name;
  harness::ExperimentConfig config;
};

std::vector<FigureRun> figure_configs(std::size_t seeds_override) {
  using harness::ExperimentConfig;
  const std::vector<PolicyKind> main{PolicyKind::kFtpp, PolicyKind::kRR, PolicyKind::kEtcU,
                                     PolicyKind::kUcbU, PolicyKind::kEtcRR, PolicyKind::kUcbRR};
  std::vector<FigureRun> out;

  ExperimentConfig fig1;
  fig1.policies = main;
  fig1.lambdas = {{1.0, 0.25}};
  fig1.n = {10, 20, 40, 80, 160, 320};
  fig1.seeds = 400;
  out.push_back({"fig1", fig1});

  ExperimentConfig fig2;
  fig2.policies = main;
  for (double l1 : {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9}) fig2.lambdas.push_back({l1, 1.0});
  fig2.n = {50};
  fig2.seeds = 5000;
  out.push_back({"fig2", fig2});

  ExperimentConfig lsept;
  lsept.policies = {PolicyKind::kFtpp, PolicyKind::kRR, PolicyKind::kUcbRR, PolicyKind::kLsept};
  lsept.lambdas = {{0.8, 1.0}};
  lsept.n = {50, 200};
  lsept.seeds = 200;
  out.push_back({"lsept", lsept});

  if (seeds_override > 0) {
    for (auto& f : out) f.config.seeds = seeds_override;
  }
  return out;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

int run_figures(const fs::path& out_dir, std::size_t seeds, std::size_t jobs, std::ostream& out) {
  for (const auto& run : figure_configs(seeds)) {
    const fs::path dir = out_dir / run.name;
    const auto records = harness::run_experiment(run.config, jobs);
    harness::write_experiment_outputs(dir, run.config, records);
    std::ofstream f(dir / "excess_cr.csv", std::ios::binary);
    harness::write_excess_cr_csv(f, harness::excess_cr(records));
    out << "wrote " << dir.string() << '\n';
  }
  write_json(out_dir / "figure1.json", {{"input", "fig1/summary.csv"},
                                        {"x", "n"},
                                        {"y", "mean_cr"},
                                        {"y_error", "stderr_cr"},
                                        {"log_x", true},
                                        {"log_y", false},
                                        {"output", "figure1.png"}});
  write_json(out_dir / "figure2.json", {{"input", "fig2/excess_cr.csv"},
                                        {"x", "lambda_1"},
                                        {"y", "excess_cr"},
                                        {"y_error", "stderr_excess_cr"},
                                        {"log_x", false},
                                        {"log_y", true},
                                        {"output", "figure2.png"}});
  write_json(out_dir / "figure_lsept.json", {{"input", "lsept/summary.csv"},
                                             {"x", "n"},
                                             {"y", "mean_cr"},
                                             {"y_error", "stderr_cr"},
                                             {"log_x", false},
                                             {"log_y", false},
                                             {"output", "figure_lsept.png"}});
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-machine stochastic scheduling laboratory", "stosched"};
  app.require_subcommand(1);

  AnalyticArgs an_args;
  auto* analytic = app.add_subcommand("analytic", "Evaluate a closed-form cost, ratio or bound as JSON");
  analytic->add_option("formula", an_args.formula, "Formula name")->required();
  analytic->add_option("--lambdas", an_args.lambdas, "Comma-separated expected sizes");
  analytic->add_option("--n", an_args.n, "Jobs per type")->check(CLI::PositiveNumber);
  analytic->add_option("--delta", an_args.delta, "Slot length (ucb-rr bound)");
  analytic->add_option("--k", an_args.k, "Number of types (tilde-series)");
  analytic->add_option("--lambda", an_args.lambda, "lambda_2 / lambda_1 (cr-ftpp-upper-2types)");
  bool list_formulas = false;
  analytic->add_flag("--list", list_formulas, "List formula names");

  std::string sim_policy;
  std::string sim_lambdas;
  std::size_t sim_n = 1;
  std::uint64_t sim_seed = 0;
  double sim_delta = 0.01;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Run one policy on one instance and dump its trace");
  simulate->add_option("--policy", sim_policy, "opt|ftpp|rr|etc-u|ucb-u|etc-rr|ucb-rr|lsept")->required();
  simulate->add_option("--lambdas", sim_lambdas, "Comma-separated expected sizes")->required();
  simulate->add_option("--n", sim_n, "Jobs per type")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "Instance seed");
  simulate->add_option("--delta", sim_delta, "Slot length for ucb-rr");
  simulate->add_option("--out", sim_out, "Trace CSV path (default: stdout)");

  std::string cfg_path;
  std::string exp_out = "results";
  std::size_t jobs = 1;
  auto* experiment = app.add_subcommand("experiment", "Run a JSON experiment config");
  experiment->add_option("config", cfg_path, "Config file")->required();
  experiment->add_option("--out", exp_out, "Output directory");
  experiment->add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  std::string fig_out = "figures";
  std::size_t fig_seeds = 0;
  auto* figures = app.add_subcommand("figures", "Emit the data files and figure specs for plotting");
  figures->add_option("--out", fig_out, "Output directory");
  figures->add_option("--seeds", fig_seeds, "Seeds per grid point (default: 400 / 5000 / 200)");
  figures->add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analytic) {
      if (list_formulas) {
        for (const auto& f : formula_names()) out << f << '\n';
        return kExitOk;
      }
      out << evaluate(an_args).dump() << '\n';
    } else if (*simulate) {
      const PolicyKind kind = parse_policy(sim_policy);
      const TypeParams params(parse_lambdas(sim_lambdas), sim_n);
      const Instance instance = sample_instance(params, sim_seed);
      PolicyOptions options;
      options.delta = sim_delta;
      const RunTrace trace = run_policy(kind, instance, options);
      const double opt = run_policy(PolicyKind::kOpt, instance, options).flow_time;
      if (sim_out.empty()) {
        write_trace_csv(out, trace);
      } else {
        std::ofstream f(sim_out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + sim_out);
        write_trace_csv(f, trace);
        out << json{{"policy", sim_policy}, {"seed", sim_seed}, {"generator", generator_id()},
                    {"flow", trace.flow_time}, {"opt_flow", opt}, {"cr", trace.flow_time / opt}}
                   .dump()
            << '\n';
      }
    } else if (*experiment) {
      const auto config = harness::load_config(cfg_path);
      const auto records = harness::run_experiment(config, jobs);
      harness::write_experiment_outputs(exp_out, config, records);
      std::size_t failed = 0;
      for (const auto& r : records) {
        if (!r.error.empty()) {
          ++failed;
          err << "record " << policy_name(r.policy) << " seed " << r.seed << ": " << r.error << '\n';
        }
      }
      out << "wrote " << records.size() << " records to " << exp_out << (failed ? " with failures" : "")
          << '\n';
    } else if (*figures) {
      return run_figures(fig_out, fig_seeds, jobs, out);
    }
  } catch (const harness::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const an::BoundNotApplicable& e) {
    err << "error: bound not applicable: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace stosched::cli
