#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ncrate/cli/commands.hpp"

using namespace ncrate;
using namespace ncrate::cli;

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
};

// Runs the executable through the shell, capturing standard output.
CliRun run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(NCRATE_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / ("ncrate_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

Scenario small_scenario() {
  Scenario s;
  s.schemes = {Scheme::rlnc};
  s.networks = {LineNetwork::uniform(2, 0.05)};
  s.n_values = {64};
  return s;
}

}  // namespace

TEST(Scenario, ParsesJsonAndReportsFieldErrors) {
  const Scenario s = parse_scenario(R"({"schemes":["RLNC","SNC-S"],"field":"infinite","hops":[2,5],
      "delta":[0.05,0.2],"N":{"from":8,"to":32,"step":8},"targets":[1e-6,1e-3],"trials":50,"seed":9})");
  EXPECT_EQ(s.schemes.size(), 2u);
  EXPECT_TRUE(s.infinite_field);
  EXPECT_EQ(s.networks.size(), 4u);
  EXPECT_EQ(s.n_values, (std::vector<std::size_t>{8, 16, 24, 32}));
  EXPECT_EQ(s.seed, 9u);

  EXPECT_THROW(parse_scenario(R"({"schemes":["XYZ"]})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"bogus":1})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"hops":2,"delta":1.5})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"field":3})"), ConfigError);
  try {
    parse_scenario("{\n\"schemes\": [\"RLNC\",\n]\n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  try {
    parse_scenario(R"({"schemes":["RLNC","FOO"]})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("schemes[1]"), std::string::npos) << e.what();
  }
}

TEST(Scenario, ConfigHashTracksContent) {
  Scenario a = small_scenario(), b = small_scenario();
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = a.seed + 1;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(CmdPlr, RowsMatchLibraryCalls) {
  const Scenario s = small_scenario();
  const Table t = cmd_plr(s);
  EXPECT_EQ(t.header, kPlrHeader);
  ASSERT_EQ(t.rows.size(), 64u);
  for (std::size_t k = 1; k <= 64; ++k) {
    const auto& row = t.rows[k - 1];
    EXPECT_EQ(row[0], "RLNC");
    EXPECT_EQ(row[1], "2");
    EXPECT_EQ(row[2], "0.05");
    EXPECT_EQ(row[3], "64");
    EXPECT_EQ(row[4], std::to_string(k));
    EXPECT_EQ(row[6], format_number(plr_rlnc(k, 64, LineNetwork::uniform(2, 0.05), 256.0)));
    EXPECT_EQ(row[8], "analytic-eq1");
  }
}

TEST(CmdPlr, MixedSchemesKeepScenarioOrder) {
  Scenario s = small_scenario();
  s.schemes = {Scheme::snc_s, Scheme::rlnc};
  s.n_values = {8};
  s.trials = 200;
  const Table t = cmd_plr(s);
  ASSERT_EQ(t.rows.size(), 4u + 8u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(t.rows[i][0], "SNC-S");
    EXPECT_EQ(t.rows[i][8], "montecarlo");
  }
  for (std::size_t i = 4; i < 12; ++i) EXPECT_EQ(t.rows[i][0], "RLNC");
}

TEST(CmdPlr, OddKForSncsNamesParity) {
  Scenario s = small_scenario();
  s.schemes = {Scheme::snc_s};
  s.k_values = {3};
  try {
    cmd_plr(s);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("even"), std::string::npos);
  }
}

TEST(CmdPlr, AnalyticMethodForSimulationOnlySchemeIsAConfigError) {
  Scenario s = small_scenario();
  s.schemes = {Scheme::snc};
  s.methods = {"analytic-eq1"};
  EXPECT_THROW(cmd_plr(s), ConfigError);
}

TEST(CmdRate, InfeasibleRowsLeaveEmptyCells) {
  Scenario s = small_scenario();
  s.n_values = {1, 2, 64};
  s.targets = {1e-6};
  const auto records = run_rate(s);
  const Table t = rate_table(records);
  EXPECT_EQ(t.header, kRateHeader);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[0][5], "");
  EXPECT_EQ(t.rows[0][6], "");
  EXPECT_EQ(t.rows[0][7], "");
  EXPECT_FALSE(t.rows[2][5].empty());
  EXPECT_TRUE(any_feasible(records));
}

TEST(CmdRate, AnalyticAndSimulatedSchemesCoexist) {
  Scenario s = small_scenario();
  s.schemes = {Scheme::rlnc, Scheme::snc};
  s.networks = {LineNetwork::uniform(2, 0.2)};
  s.n_values = {16};
  s.targets = {1e-2};
  s.trials = 300;
  const Table t = cmd_rate(s);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "RLNC");
  EXPECT_EQ(t.rows[1][0], "SNC");
}

TEST(CmdSlope, RecoversPlantedCurveFromFile) {
  std::stringstream csv;
  csv << "# synthetic\n";
  for (std::size_t i = 0; i < kRateHeader.size(); ++i) csv << (i ? "," : "") << kRateHeader[i];
  csv << '\n';
  for (int n = 8; n <= 100; n += 4) {
    const double rho = 0.8 - 0.5 * std::exp(-0.05 * n);
    csv << "RLNC,2,0.2,0.01," << n << "," << format_number(rho) << "," << int(rho * n) << ",0.001,5\n";
  }
  const Table t = cmd_slope(Scenario{}, csv, "synthetic");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.header, kSlopeHeader);
  EXPECT_NEAR(std::stod(t.rows[0][4]), 0.5, 5e-4);
  EXPECT_NEAR(std::stod(t.rows[0][5]), 0.05, 5e-5);
  EXPECT_NEAR(std::stod(t.rows[0][6]), 0.8, 8e-4);
  EXPECT_NEAR(std::stod(t.rows[0][8]), 0.003606, 1e-5);
  EXPECT_EQ(t.rows[0][9], "8");
  EXPECT_EQ(t.rows[0][10], "100");
}

TEST(CmdSlope, TooFewPointsIsAnError) {
  Scenario s = small_scenario();
  s.n_values = {8, 16, 24};
  EXPECT_THROW(cmd_slope(s), DataError);
}

TEST(CmdSlope, FileRoundTripEqualsFusedRun) {
  Scenario s = small_scenario();
  s.schemes = {Scheme::rlnc, Scheme::snc_s};
  s.networks = {LineNetwork::uniform(2, 0.2)};
  s.targets = {1e-2};
  s.n_values = {8, 16, 24, 32, 40, 48};
  s.trials = 200;
  const auto records = run_rate(s);
  std::stringstream file;
  write_csv(file, rate_table(records), provenance("rate", s));
  const Table from_file = cmd_slope(s, file, "rate.csv");
  const Table fused = slope_table(fit_rate_curves(records, s.n1, s.n2));
  EXPECT_EQ(from_file.rows, fused.rows);
}

TEST(CmdFit, AcceptsPointFiles) {
  std::stringstream csv("N,rho\n10,0.6\n20,0.7\n30,0.75\n40,0.77\n50,0.78\n");
  const Table t = cmd_fit(csv, "pts", 0, 0);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][6], "10");
  EXPECT_EQ(t.rows[0][7], "50");
  std::stringstream bad("N,x\n1,2\n");
  EXPECT_THROW(cmd_fit(bad, "bad", 0, 0), DataError);
}

TEST(CmdSimulate, ReportsEstimateFields) {
  Scenario s = small_scenario();
  s.schemes = {Scheme::swnc};
  s.n_values = {8};
  s.k_values = {4};
  s.trials = 50;
  const Table t = cmd_simulate(s);
  ASSERT_EQ(t.rows.size(), 1u);
  const PlrEstimate e = estimate_plr(CodeSpec::make(Scheme::swnc, 4, 8), LineNetwork::uniform(2, 0.05), 50, s.seed);
  EXPECT_EQ(t.rows[0][8], format_number(e.mean));
  EXPECT_EQ(t.rows[0][7], std::to_string(e.packets_observed));
}

TEST(ParallelMap, KeepsOrder) {
  const auto v = parallel_map(4, 100, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < 100; ++i) ASSERT_EQ(v[i], i * i);
  EXPECT_THROW(parallel_map(3, 10, [](std::size_t i) -> int { throw std::runtime_error(std::to_string(i)); }),
               std::runtime_error);
}

TEST(Executable, RerunIsByteIdenticalAndIndependentOfJobs) {
  const fs::path dir = temp_dir();
  const std::string common = "rate -s RLNC -s SNC --hops 2 --delta 0.2 -N 8:32:8 -t 0.01 --trials 200 --seed 3";
  ASSERT_EQ(run_cli(common + " -o " + (dir / "a.csv").string()).code, 0);
  ASSERT_EQ(run_cli(common + " -o " + (dir / "b.csv").string()).code, 0);
  ASSERT_EQ(run_cli(common + " --jobs 3 -o " + (dir / "c.csv").string()).code, 0);
  const std::string a = slurp(dir / "a.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "b.csv"));
  EXPECT_EQ(a, slurp(dir / "c.csv"));
  EXPECT_EQ(a.rfind("# ncrate rate seed=3 config=", 0), 0u);
  fs::remove_all(dir);
}

TEST(Executable, DefaultsToStandardOutput) {
  const CliRun r = run_cli("plr -N 4");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("scheme,hops,delta,N,K,rho,plr,ci,method\n"), std::string::npos);
}

TEST(Executable, ExitCodes) {
  EXPECT_EQ(run_cli("plr -s SNC-S -K 3 -N 8").code, 2);
  EXPECT_EQ(run_cli("plr --trials nope").code, 2);
  EXPECT_EQ(run_cli("rate -N 1 -t 1e-9").code, 3);
  EXPECT_EQ(run_cli("fit -i /nonexistent.csv").code, 2);

  const fs::path dir = temp_dir();
  std::ofstream(dir / "bad.json") << "{\n  \"schemes\": [\"RLNC\"\n}\n";
  EXPECT_EQ(run_cli("plr -c " + (dir / "bad.json").string()).code, 2);
  fs::remove_all(dir);
}

TEST(Executable, SeedFromEnvironment) {
  const CliRun r = run_cli("plr -N 4", "NCRATE_SEED=777");
  EXPECT_EQ(r.out.rfind("# ncrate plr seed=777 ", 0), 0u);
  EXPECT_EQ(run_cli("plr -N 4", "NCRATE_SEED=abc").code, 2);
}

TEST(Executable, SlopeReadsRateOutput) {
  const fs::path dir = temp_dir();
  const std::string scenario = "--hops 2 --delta 0.05 -N 8:64:8 -t 1e-6";
  ASSERT_EQ(run_cli("rate " + scenario + " -o " + (dir / "rate.csv").string()).code, 0);
  const CliRun file = run_cli("slope " + scenario + " -i " + (dir / "rate.csv").string());
  const CliRun fused = run_cli("slope " + scenario);
  EXPECT_EQ(file.code, 0);
  EXPECT_EQ(file.out, fused.out);
  fs::remove_all(dir);
}
