#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

namespace stosched::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "stosched");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, AnalyticCostFtpp) {
  const auto r = run({"analytic", "cost-ftpp", "--lambdas", "1,2", "--n", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["kind"], "cost-ftpp");
  EXPECT_DOUBLE_EQ(j["value"].get<double>(), 13.0);
  EXPECT_EQ(j["params"]["n"], 2);
}

TEST(Cli, AnalyticBounds) {
  auto r = run({"analytic", "upper-ucb-rr", "--lambdas", "1,2", "--n", "50", "--delta", "0.5"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("not applicable"), std::string::npos);
  r = run({"analytic", "lower-large-gap", "--lambdas", "1,3", "--n", "7"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out)["value"].get<double>(), 7.0);
  r = run({"analytic", "tilde-series", "--k", "2"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NEAR(nlohmann::json::parse(r.out)["value"].get<double>(), 0.875 / 0.5125, 1e-12);
  r = run({"analytic", "--list", "x"});
  EXPECT_NE(r.out.find("upper-etc-rr-pair"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"analytic", "cost-sept", "--lambdas", "1", "--n", "2"}).code, kExitUsage);
  EXPECT_EQ(run({"analytic", "cost-opt", "--lambdas", "1,x", "--n", "2"}).code, kExitUsage);
  EXPECT_EQ(run({"analytic", "cost-opt", "--n", "2"}).code, kExitUsage);
  EXPECT_EQ(run({"simulate", "--policy", "sept", "--lambdas", "1", "--n", "2"}).code, kExitUsage);
  EXPECT_EQ(run({"bogus"}).code, kExitUsage);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, SimulateTrace) {
  const auto r = run({"simulate", "--policy", "ftpp", "--lambdas", "2,1", "--n", "2", "--seed", "4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "type,job_index,begin,end");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(Cli, ExperimentAndMalformedConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "stosched_cli_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "ok.json") << R"({"policies": ["opt", "rr"], "lambdas": [1, 2], "n": 3, "seeds": 2})";
    std::ofstream(dir / "bad.json") << R"({"policies": ["rr"], "lambdas": [1], "n": -3})";
  }
  auto r = run({"experiment", (dir / "ok.json").string(), "--out", (dir / "out").string(), "--jobs", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "records.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "summary.csv"));
  r = run({"experiment", (dir / "bad.json").string(), "--out", (dir / "out2").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("'n'"), std::string::npos);
  r = run({"experiment", (dir / "missing.json").string()});
  EXPECT_EQ(r.code, kExitUsage);
  std::filesystem::remove_all(dir);
}

TEST(Cli, FiguresWritesSpecs) {
  const auto dir = std::filesystem::temp_directory_path() / "stosched_fig_test";
  std::filesystem::remove_all(dir);
  const auto r = run({"figures", "--out", dir.string(), "--seeds", "2", "--jobs", "0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* f : {"figure1.json", "figure2.json", "figure_lsept.json", "fig1/summary.csv",
                        "fig2/excess_cr.csv", "lsept/records.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::ifstream spec(dir / "figure2.json");
  const auto j = nlohmann::json::parse(spec);
  EXPECT_EQ(j["x"], "lambda_1");
  EXPECT_EQ(j["log_y"], true);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace stosched::cli
