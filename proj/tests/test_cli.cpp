#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef LEADSIM_CLI_PATH
#error "LEADSIM_CLI_PATH must be defined by the build"
#endif

namespace {

int run_cli(const std::string& args) {
  const std::string command = std::string(LEADSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

const char* kQuick = "--horizon 120 --warmup 40 --reps 4";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and parse errors") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("simulate --help") == 0);
  CHECK(run_cli("bogus-subcommand") == 2);
  CHECK(run_cli("simulate") == 2);  // neither --config nor --preset
  CHECK(run_cli("simulate --preset table1") == 2);  // missing --row
  CHECK(run_cli("simulate --preset table1 --row 37") == 2);
}

TEST_CASE("missing config file exits with the config code") {
  CHECK(run_cli("simulate --config /nonexistent/conf.json") == 2);
}

TEST_CASE("unwritable output path is a runtime fault") {
  CHECK(run_cli(std::string("simulate --preset table1 --row 2 ") + kQuick +
                " --out /nonexistent-dir/out.csv") == 3);
}

TEST_CASE("fixed seeds give byte-identical output files") {
  TempFile a("cli_a.csv"), b("cli_b.csv");
  const std::string args = std::string("simulate --preset table1 --row 2 ") + kQuick +
                           " --seed 7 --out ";
  REQUIRE(run_cli(args + a.path) == 0);
  REQUIRE(run_cli(args + b.path) == 0);
  const std::string text = slurp(a.path);
  CHECK(text == slurp(b.path));
  CHECK(text.rfind("policy,rep,", 0) == 0);
  CHECK(text.find("gbs,aggregate,") != std::string::npos);
  CHECK(text.find("cbs,aggregate,") != std::string::npos);
}

TEST_CASE("unit gain equals the cbs policy under one seed") {
  TempFile a("cli_gbs1.csv"), b("cli_cbs.csv");
  const std::string common =
      std::string("--preset table1 --row 2 ") + kQuick + " --seed 11 --out ";
  REQUIRE(run_cli("simulate --policy gbs --gamma 1.0 " + common + a.path) == 0);
  REQUIRE(run_cli("simulate --policy cbs " + common + b.path) == 0);
  std::string gbs_text = slurp(a.path);
  const std::string cbs_text = slurp(b.path);
  // Identical sample paths; only the policy label differs.
  std::string::size_type pos = 0;
  while ((pos = gbs_text.find("gbs,", pos)) != std::string::npos) {
    gbs_text.replace(pos, 4, "cbs,");
  }
  CHECK(gbs_text == cbs_text);
}

TEST_CASE("json format is emitted on request") {
  TempFile out("cli_sim.json");
  REQUIRE(run_cli(std::string("simulate --preset table1 --row 2 ") + kQuick +
                  " --format json --out " + out.path) == 0);
  const std::string text = slurp(out.path);
  CHECK(text.find("\"results\"") != std::string::npos);
  CHECK(text.find("\"aggregate\"") != std::string::npos);
  CHECK(text.find("\"gamma_x_star\"") != std::string::npos);
}

TEST_CASE("artificial subcommand runs the pinned-pipeline process") {
  TempFile out("cli_art.csv");
  REQUIRE(run_cli(std::string("artificial --preset table1 --row 2 ") + kQuick + " --out " +
                  out.path) == 0);
  const std::string text = slurp(out.path);
  CHECK(text.find("artificial,aggregate,") != std::string::npos);
}

TEST_CASE("artificial rejects non-exponential lead times") {
  CHECK(run_cli(std::string("artificial --preset table4 --row 2 ") + kQuick) == 2);
}

TEST_CASE("sweep-gamma emits a curve with a flagged minimum") {
  TempFile out("cli_sweep.csv");
  REQUIRE(run_cli(std::string("sweep-gamma --preset table1 --row 2 ") + kQuick +
                  " --lo 1.0 --hi 2.0 --step 0.5 --out " + out.path) == 0);
  const std::string text = slurp(out.path);
  CHECK(text.rfind("gamma,avg_cost,se,best", 0) == 0);
  CHECK(text.find(",1") != std::string::npos);
  int lines = 0;
  for (const char c : text) lines += c == '\n';
  CHECK(lines == 4);  // header + 3 grid points
}

TEST_CASE("mdp solves, reports gaps, and exports the LP") {
  TempFile out("cli_mdp.json"), lp("cli_mdp.lp");
  REQUIRE(run_cli(std::string("mdp --preset table6 --row 2 ") + kQuick + " --export-lp " +
                  lp.path + " --out " + out.path) == 0);
  const std::string text = slurp(out.path);
  CHECK(text.find("\"g\": 0.94") != std::string::npos);
  CHECK(text.find("\"opt_gap\"") != std::string::npos);
  CHECK(text.find("\"target\"") != std::string::npos);
  CHECK(text.find("\"gbs_target\"") != std::string::npos);
  const std::string lp_text = slurp(lp.path);
  CHECK(lp_text.find("Maximize") != std::string::npos);
  CHECK(lp_text.find("norm:") != std::string::npos);
}

TEST_CASE("mdp rejects non-exponential lead times with the config code") {
  CHECK(run_cli(std::string("mdp --preset table5 --row 2 ") + kQuick) == 2);
}

TEST_CASE("scaling emits points and fitted lines") {
  TempFile out("cli_scaling.csv");
  REQUIRE(run_cli(std::string("scaling --preset table1 --rows 2,10 ") + kQuick + " --out " +
                  out.path) == 0);
  const std::string text = slurp(out.path);
  CHECK(text.rfind("kind,lead_demand,policy", 0) == 0);
  CHECK(text.find("fit,,cbs,") != std::string::npos);
  CHECK(text.find("fit,,gbs,") != std::string::npos);
  // Two points define each fitted line exactly.
  CHECK(text.find(",1\n") != std::string::npos);
}

TEST_CASE("scaling from a config file with an explicit gain schedule") {
  TempFile conf("cli_scaling_conf.json"), out("cli_scaling_conf.csv");
  {
    std::ofstream file(conf.path);
    file << R"({"system": {"r": 1.0, "leadtime": {"kind": "exponential", "mean": 2.0}},
                "cost": {"h": 1.0, "theta": 1.0},
                "policy": {"kind": "gbs", "gamma": 1.0, "rounding": "floor"},
                "protocol": {"horizon": 120, "warmup": 40, "replications": 4}})";
  }
  CHECK(run_cli("scaling --config " + conf.path + " --rows 2,10") == 2);  // missing --gammas
  REQUIRE(run_cli("scaling --config " + conf.path +
                  " --rows 2,10 --gammas 1.6,2.2 --out " + out.path) == 0);
  const std::string text = slurp(out.path);
  CHECK(text.find("point,2,gbs,1.6,") != std::string::npos);
  CHECK(text.find("point,10,gbs,2.2,") != std::string::npos);
}

}  // TEST_SUITE
