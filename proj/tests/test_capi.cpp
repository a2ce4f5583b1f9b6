#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "leadsim/leadsim.h"

namespace {

const char* kSmallDoc = R"({
  "system": {"r": 10.0, "leadtime": {"kind": "exponential", "mean": 2.0}},
  "cost": {"h": 1.0, "theta": 1.0},
  "policy": {"kind": "gbs", "gamma": 2.4, "rounding": "floor"},
  "protocol": {"horizon": 300, "warmup": 100, "replications": 10, "seed": 42}
})";

struct ConfigGuard {
  leadsim_config* ptr = nullptr;
  ~ConfigGuard() { leadsim_config_free(ptr); }
};

struct ResultGuard {
  leadsim_result* ptr = nullptr;
  ~ResultGuard() { leadsim_result_free(ptr); }
};

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("version string is set") {
  CHECK(std::strlen(leadsim_version()) > 0);
}

TEST_CASE("config parse, info, dump") {
  ConfigGuard config;
  REQUIRE(leadsim_config_parse(kSmallDoc, &config.ptr) == LEADSIM_OK);
  double value = 0.0;
  CHECK(leadsim_config_info(config.ptr, "lead_demand", &value) == LEADSIM_OK);
  CHECK(value == 20.0);
  CHECK(leadsim_config_info(config.ptr, "gamma", &value) == LEADSIM_OK);
  CHECK(value == 2.4);
  CHECK(leadsim_config_info(config.ptr, "rounding", &value) == LEADSIM_OK);
  CHECK(value == 1.0);
  CHECK(leadsim_config_info(config.ptr, "nope", &value) == LEADSIM_ERR_CONFIG);
  CHECK(std::strlen(leadsim_last_error()) > 0);

  size_t needed = 0;
  CHECK(leadsim_config_dump(config.ptr, nullptr, 0, &needed) == LEADSIM_OK);
  REQUIRE(needed > 2);
  std::vector<char> buf(needed);
  CHECK(leadsim_config_dump(config.ptr, buf.data(), buf.size(), &needed) == LEADSIM_OK);
  CHECK(std::string(buf.data()).find("\"gamma\"") != std::string::npos);
}

TEST_CASE("invalid json reports a config error") {
  leadsim_config* config = nullptr;
  CHECK(leadsim_config_parse("{", &config) == LEADSIM_ERR_CONFIG);
  CHECK(config == nullptr);
  CHECK(leadsim_config_parse(nullptr, &config) == LEADSIM_ERR_CONFIG);
  CHECK(leadsim_config_load("/nonexistent/config.json", &config) == LEADSIM_ERR_CONFIG);
}

TEST_CASE("simulate and read statistics deterministically") {
  ConfigGuard config;
  REQUIRE(leadsim_config_parse(kSmallDoc, &config.ptr) == LEADSIM_OK);
  ResultGuard a, b;
  REQUIRE(leadsim_simulate(config.ptr, &a.ptr) == LEADSIM_OK);
  REQUIRE(leadsim_simulate(config.ptr, &b.ptr) == LEADSIM_OK);
  REQUIRE(leadsim_result_replications(a.ptr) == 10);

  double mean_a = 0.0, se_a = 0.0, mean_b = 0.0, se_b = 0.0;
  CHECK(leadsim_result_agg(a.ptr, LEADSIM_STAT_AVG_COST, &mean_a, &se_a) == LEADSIM_OK);
  CHECK(leadsim_result_agg(b.ptr, LEADSIM_STAT_AVG_COST, &mean_b, &se_b) == LEADSIM_OK);
  CHECK(mean_a == mean_b);
  CHECK(se_a == se_b);
  CHECK(mean_a > 0.0);

  double rep0 = 0.0, pos = 0.0, neg = 0.0;
  CHECK(leadsim_result_rep_stat(a.ptr, 0, LEADSIM_STAT_AVG_COST, &rep0) == LEADSIM_OK);
  CHECK(leadsim_result_rep_stat(a.ptr, 0, LEADSIM_STAT_MEAN_POS, &pos) == LEADSIM_OK);
  CHECK(leadsim_result_rep_stat(a.ptr, 0, LEADSIM_STAT_MEAN_NEG, &neg) == LEADSIM_OK);
  CHECK(rep0 == doctest::Approx(pos + neg).epsilon(1e-12));
  CHECK(leadsim_result_rep_stat(a.ptr, 10, LEADSIM_STAT_AVG_COST, &rep0) == LEADSIM_ERR_CONFIG);
}

TEST_CASE("config set switches the policy") {
  ConfigGuard config;
  REQUIRE(leadsim_config_parse(kSmallDoc, &config.ptr) == LEADSIM_OK);
  CHECK(leadsim_config_set(config.ptr, "policy.kind", "cbs") == LEADSIM_OK);
  double kind = -1.0;
  CHECK(leadsim_config_info(config.ptr, "policy_kind", &kind) == LEADSIM_OK);
  CHECK(kind == 1.0);
  double base = 0.0;
  CHECK(leadsim_config_info(config.ptr, "cbs_base", &base) == LEADSIM_OK);
  CHECK(base == 20.0);
  CHECK(leadsim_config_set(config.ptr, "policy.kind", "bogus") == LEADSIM_ERR_CONFIG);
}

TEST_CASE("preset round trips through the api") {
  ConfigGuard config;
  REQUIRE(leadsim_config_preset("table1", "2", &config.ptr) == LEADSIM_OK);
  double gamma = 0.0;
  CHECK(leadsim_config_info(config.ptr, "gamma", &gamma) == LEADSIM_OK);
  CHECK(gamma == 1.6);
  leadsim_config* bad = nullptr;
  CHECK(leadsim_config_preset("table1", "37", &bad) == LEADSIM_ERR_CONFIG);
}

TEST_CASE("gamma sweep handles") {
  ConfigGuard config;
  REQUIRE(leadsim_config_parse(kSmallDoc, &config.ptr) == LEADSIM_OK);
  leadsim_sweep* raw = nullptr;
  REQUIRE(leadsim_sweep_gamma(config.ptr, 1.0, 2.0, 0.5, &raw) == LEADSIM_OK);
  CHECK(leadsim_sweep_points(raw) == 3);
  const int best = leadsim_sweep_best(raw);
  CHECK(best >= 0);
  CHECK(best < 3);
  double gamma = 0.0, cost = 0.0, se = 0.0;
  CHECK(leadsim_sweep_point(raw, 0, &gamma, &cost, &se) == LEADSIM_OK);
  CHECK(gamma == 1.0);
  CHECK(cost > 0.0);
  CHECK(leadsim_sweep_point(raw, 3, &gamma, &cost, &se) == LEADSIM_ERR_CONFIG);
  leadsim_sweep_free(raw);
}

TEST_CASE("mdp solve, target table, lp export") {
  ConfigGuard config;
  REQUIRE(leadsim_config_preset("table6", "2", &config.ptr) == LEADSIM_OK);
  leadsim_mdp* raw = nullptr;
  REQUIRE(leadsim_mdp_solve(config.ptr, &raw) == LEADSIM_OK);
  CHECK(leadsim_mdp_avg_cost(raw) == doctest::Approx(0.95).epsilon(0.02));
  int64_t states = 0, actions = 0, y_min = 0, y_max = 0;
  CHECK(leadsim_mdp_counts(raw, &states, &actions) == LEADSIM_OK);
  CHECK(states > 0);
  CHECK(actions > states);
  CHECK(leadsim_mdp_target_range(raw, &y_min, &y_max) == LEADSIM_OK);
  CHECK(y_min < 0);
  int64_t level = -1;
  CHECK(leadsim_mdp_target_level(raw, y_max, &level) == LEADSIM_OK);
  CHECK(level == 0);
  CHECK(leadsim_mdp_target_level(raw, y_max + 1, &level) == LEADSIM_ERR_CONFIG);
  CHECK(leadsim_mdp_target_violations(raw) == 0);

  const char* path = "capi_export.lp";
  CHECK(leadsim_mdp_export_lp(raw, path) == LEADSIM_OK);
  std::ifstream in(path);
  CHECK(in.good());
  std::string first;
  std::getline(in, first);
  CHECK(first.find("average-cost LP") != std::string::npos);
  in.close();
  std::remove(path);
  leadsim_mdp_free(raw);
}

TEST_CASE("mdp rejects non-exponential lead times") {
  ConfigGuard config;
  REQUIRE(leadsim_config_preset("table4", "2", &config.ptr) == LEADSIM_OK);
  leadsim_mdp* raw = nullptr;
  CHECK(leadsim_mdp_solve(config.ptr, &raw) == LEADSIM_ERR_CONFIG);
  CHECK(raw == nullptr);
}

TEST_CASE("mdp rejects lead demand beyond the tractable range") {
  ConfigGuard config;
  REQUIRE(leadsim_config_preset("table6", "1000", &config.ptr) == LEADSIM_OK);
  REQUIRE(leadsim_config_set(config.ptr, "system.r", "600") == LEADSIM_OK);  // rb = 1200
  leadsim_mdp* raw = nullptr;
  CHECK(leadsim_mdp_solve(config.ptr, &raw) == LEADSIM_ERR_CONFIG);
  CHECK(raw == nullptr);
}

TEST_CASE("helpers: policy target, loglog fit, inverse normal") {
  ConfigGuard config;
  REQUIRE(leadsim_config_parse(kSmallDoc, &config.ptr) == LEADSIM_OK);
  double target = -1.0;
  CHECK(leadsim_policy_target(config.ptr, 0, &target) == LEADSIM_OK);
  CHECK(target == 20.0);
  CHECK(leadsim_policy_target(config.ptr, 2, &target) == LEADSIM_OK);
  CHECK(target == 16.0);  // ceil(20 - 2.4 * 2)

  const double x[] = {2.0, 20.0, 200.0};
  const double y[] = {2.0 * std::sqrt(2.0), 2.0 * std::sqrt(20.0), 2.0 * std::sqrt(200.0)};
  double b0 = 0.0, b1 = 0.0, r2 = 0.0;
  CHECK(leadsim_fit_loglog(x, y, 3, &b0, &b1, &r2) == LEADSIM_OK);
  CHECK(b1 == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(leadsim_fit_loglog(x, y, 1, &b0, &b1, &r2) == LEADSIM_ERR_CONFIG);

  double q = 0.0;
  CHECK(leadsim_inv_norm_cdf(0.9, &q) == LEADSIM_OK);
  CHECK(q == doctest::Approx(1.2815515655).epsilon(1e-9));
  CHECK(leadsim_inv_norm_cdf(1.5, &q) == LEADSIM_ERR_CONFIG);
}

}  // TEST_SUITE
