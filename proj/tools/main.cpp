// Command-line front end. Links only the shared library's C interface.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "leadsim/leadsim.h"

namespace {

struct ConfigDeleter {
  void operator()(leadsim_config* c) const { leadsim_config_free(c); }
};
struct ResultDeleter {
  void operator()(leadsim_result* r) const { leadsim_result_free(r); }
};
struct SweepDeleter {
  void operator()(leadsim_sweep* s) const { leadsim_sweep_free(s); }
};
struct MdpDeleter {
  void operator()(leadsim_mdp* m) const { leadsim_mdp_free(m); }
};

using ConfigPtr = std::unique_ptr<leadsim_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<leadsim_result, ResultDeleter>;
using SweepPtr = std::unique_ptr<leadsim_sweep, SweepDeleter>;
using MdpPtr = std::unique_ptr<leadsim_mdp, MdpDeleter>;

class CliError : public std::runtime_error {
public:
  CliError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

private:
  int code_;
};

void check(leadsim_status status) {
  if (status != LEADSIM_OK) throw CliError(status, leadsim_last_error());
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::string row;
  std::string policy;
  double gamma = -1.0;
  std::int64_t seed = -1;
  int reps = -1;
  double horizon = -1.0;
  double warmup = -1.0;
  std::string out;
  std::string format;

  void attach(CLI::App* cmd, bool with_policy = true) {
    cmd->add_option("--config", config_path, "Experiment config JSON file");
    cmd->add_option("--preset", preset, "Named parameter grid: table1..table6");
    cmd->add_option("--row", row,
                    "Preset row: mean lead-time demand (2..2000) or, for table3, h9t1..h1t9");
    if (with_policy) {
      cmd->add_option("--policy", policy, "Override policy kind: gbs|cbs|artificial");
      cmd->add_option("--gamma", gamma, "Override policy gain");
    }
    cmd->add_option("--seed", seed, "Override base seed");
    cmd->add_option("--reps", reps, "Override replication count");
    cmd->add_option("--horizon", horizon, "Override simulation horizon");
    cmd->add_option("--warmup", warmup, "Override warm-up length");
    cmd->add_option("--out", out, "Output path (default: stdout)");
    cmd->add_option("--format", format, "Output format: csv|json");
  }

  ConfigPtr make_config(bool apply_policy = true) const {
    leadsim_config* raw = nullptr;
    if (!config_path.empty()) {
      check(leadsim_config_load(config_path.c_str(), &raw));
    } else if (!preset.empty()) {
      if (row.empty()) throw CliError(LEADSIM_ERR_CONFIG, "--preset requires --row");
      check(leadsim_config_preset(preset.c_str(), row.c_str(), &raw));
    } else {
      throw CliError(LEADSIM_ERR_CONFIG, "either --config or --preset is required");
    }
    ConfigPtr config(raw);
    apply_overrides(config.get(), apply_policy);
    return config;
  }

  void apply_overrides(leadsim_config* config, bool apply_policy) const {
    if (apply_policy && !policy.empty()) {
      check(leadsim_config_set(config, "policy.kind", policy.c_str()));
    }
    if (apply_policy && gamma > 0.0) {
      check(leadsim_config_set(config, "policy.gamma", fmt(gamma).c_str()));
    }
    if (seed >= 0) check(leadsim_config_set(config, "protocol.seed", std::to_string(seed).c_str()));
    if (reps > 0) {
      check(leadsim_config_set(config, "protocol.replications", std::to_string(reps).c_str()));
    }
    // Each set re-validates; when moving both window edges, move the one
    // that stays consistent with the current values first.
    double current_horizon = 0.0;
    check(leadsim_config_info(config, "horizon", &current_horizon));
    const bool horizon_first = horizon > 0.0 && horizon >= current_horizon;
    if (horizon_first) check(leadsim_config_set(config, "protocol.horizon", fmt(horizon).c_str()));
    if (warmup >= 0.0) check(leadsim_config_set(config, "protocol.warmup", fmt(warmup).c_str()));
    if (horizon > 0.0 && !horizon_first) {
      check(leadsim_config_set(config, "protocol.horizon", fmt(horizon).c_str()));
    }
  }

  std::string resolved_format(const leadsim_config* config) const {
    if (!format.empty()) return format;
    char buf[4096];
    size_t needed = 0;
    if (leadsim_config_dump(config, buf, sizeof(buf), &needed) == LEADSIM_OK) {
      const std::string text(buf);
      if (text.find("\"format\": \"json\"") != std::string::npos) return "json";
    }
    return "csv";
  }
};

void write_output(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw CliError(LEADSIM_ERR_RUNTIME, "cannot open output file " + out);
  file << text;
  if (!file.good()) throw CliError(LEADSIM_ERR_RUNTIME, "failed writing " + out);
}

double info(const leadsim_config* config, const char* key) {
  double value = 0.0;
  check(leadsim_config_info(config, key, &value));
  return value;
}

std::string policy_name(const leadsim_config* config) {
  switch (static_cast<int>(info(config, "policy_kind"))) {
    case 1: return "cbs";
    case 2: return "artificial";
    default: return "gbs";
  }
}

const leadsim_stat kStats[] = {
    LEADSIM_STAT_AVG_COST, LEADSIM_STAT_MEAN_POS, LEADSIM_STAT_MEAN_NEG, LEADSIM_STAT_MEAN_Y,
    LEADSIM_STAT_MEAN_Z,   LEADSIM_STAT_VAR_Z,    LEADSIM_STAT_MEAN_GAP, LEADSIM_STAT_MAX_GAP,
    LEADSIM_STAT_EVENTS};
const char* kStatNames[] = {"avg_cost", "mean_pos", "mean_neg", "mean_y",  "mean_z",
                            "var_z",    "mean_gap", "max_gap",  "events"};
constexpr int kNumStats = 9;

void append_simulate_csv(std::ostringstream& os, const leadsim_config* config,
                         const leadsim_result* result) {
  const std::string name = policy_name(config);
  const int n = leadsim_result_replications(result);
  for (int rep = 0; rep < n; ++rep) {
    os << name << ',' << rep;
    for (int s = 0; s < kNumStats; ++s) {
      double v = 0.0;
      check(leadsim_result_rep_stat(result, rep, kStats[s], &v));
      os << ',' << fmt(v);
    }
    os << ",,\n";
  }
  os << name << ",aggregate";
  double se_cost = 0.0;
  for (int s = 0; s < kNumStats; ++s) {
    double mean = 0.0, se = 0.0;
    check(leadsim_result_agg(result, kStats[s], &mean, &se));
    if (kStats[s] == LEADSIM_STAT_AVG_COST) se_cost = se;
    os << ',' << fmt(mean);
  }
  os << ',' << fmt(se_cost) << ',' << n << "\n";
}

std::string simulate_json_entry(const leadsim_config* config, const leadsim_result* result) {
  std::ostringstream os;
  os << "    {\n      \"policy\": \"" << policy_name(config) << "\",\n";
  os << "      \"resolved\": {\"r\": " << fmt(info(config, "r"))
     << ", \"beta\": " << fmt(info(config, "beta"))
     << ", \"lead_demand\": " << fmt(info(config, "lead_demand"))
     << ", \"gamma\": " << fmt(info(config, "gamma"))
     << ", \"x_star\": " << fmt(info(config, "x_star"))
     << ", \"gamma_x_star\": " << fmt(info(config, "gamma_x_star"))
     << ", \"base\": " << fmt(info(config, "base")) << "},\n";
  const int n = leadsim_result_replications(result);
  os << "      \"replications\": [\n";
  for (int rep = 0; rep < n; ++rep) {
    os << "        {";
    for (int s = 0; s < kNumStats; ++s) {
      double v = 0.0;
      check(leadsim_result_rep_stat(result, rep, kStats[s], &v));
      os << (s == 0 ? "" : ", ") << "\"" << kStatNames[s] << "\": " << fmt(v);
    }
    os << "}" << (rep + 1 < n ? "," : "") << "\n";
  }
  os << "      ],\n      \"aggregate\": {";
  for (int s = 0; s < kNumStats; ++s) {
    double mean = 0.0, se = 0.0;
    check(leadsim_result_agg(result, kStats[s], &mean, &se));
    os << (s == 0 ? "" : ", ") << "\"" << kStatNames[s] << "\": " << fmt(mean) << ", \""
       << kStatNames[s] << "_se\": " << fmt(se);
  }
  os << "}\n    }";
  return os.str();
}

int cmd_simulate(const CommonFlags& flags, bool force_artificial) {
  std::vector<ConfigPtr> configs;
  configs.push_back(flags.make_config());
  if (force_artificial) {
    check(leadsim_config_set(configs[0].get(), "policy.kind", "artificial"));
  }
  // A preset without an explicit policy reproduces its table row: the tuned
  // gbs policy and the cbs baseline, in that order.
  if (!flags.preset.empty() && flags.policy.empty() && !force_artificial) {
    configs.push_back(flags.make_config());
    check(leadsim_config_set(configs[1].get(), "policy.kind", "cbs"));
  }

  std::vector<ResultPtr> results;
  for (const ConfigPtr& config : configs) {
    leadsim_result* raw = nullptr;
    check(leadsim_simulate(config.get(), &raw));
    results.emplace_back(raw);
  }

  std::ostringstream os;
  if (flags.resolved_format(configs[0].get()) == "json") {
    os << "{\n  \"results\": [\n";
    for (std::size_t i = 0; i < configs.size(); ++i) {
      os << simulate_json_entry(configs[i].get(), results[i].get())
         << (i + 1 < configs.size() ? "," : "") << "\n";
    }
    os << "  ]\n}\n";
  } else {
    os << "policy,rep,avg_cost,mean_pos,mean_neg,mean_y,mean_z,var_z,mean_gap,max_gap,events,"
          "se_avg_cost,replications\n";
    for (std::size_t i = 0; i < configs.size(); ++i) {
      append_simulate_csv(os, configs[i].get(), results[i].get());
    }
  }
  write_output(flags.out, os.str());
  return 0;
}

int cmd_sweep_gamma(const CommonFlags& flags, double lo, double hi, double step) {
  ConfigPtr config = flags.make_config();
  leadsim_sweep* raw = nullptr;
  check(leadsim_sweep_gamma(config.get(), lo, hi, step, &raw));
  SweepPtr sweep(raw);

  const int n = leadsim_sweep_points(sweep.get());
  const int best = leadsim_sweep_best(sweep.get());
  std::ostringstream os;
  if (flags.resolved_format(config.get()) == "json") {
    os << "{\n  \"curve\": [\n";
    for (int i = 0; i < n; ++i) {
      double gamma = 0.0, cost = 0.0, se = 0.0;
      check(leadsim_sweep_point(sweep.get(), i, &gamma, &cost, &se));
      os << "    {\"gamma\": " << fmt(gamma) << ", \"avg_cost\": " << fmt(cost)
         << ", \"se\": " << fmt(se) << "}" << (i + 1 < n ? "," : "") << "\n";
    }
    double best_gamma = 0.0, best_cost = 0.0;
    check(leadsim_sweep_point(sweep.get(), best, &best_gamma, &best_cost, nullptr));
    os << "  ],\n  \"best\": {\"gamma\": " << fmt(best_gamma)
       << ", \"avg_cost\": " << fmt(best_cost) << "}\n}\n";
  } else {
    os << "gamma,avg_cost,se,best\n";
    for (int i = 0; i < n; ++i) {
      double gamma = 0.0, cost = 0.0, se = 0.0;
      check(leadsim_sweep_point(sweep.get(), i, &gamma, &cost, &se));
      os << fmt(gamma) << ',' << fmt(cost) << ',' << fmt(se) << ',' << (i == best ? 1 : 0)
         << "\n";
    }
  }
  write_output(flags.out, os.str());
  return 0;
}

int cmd_mdp(const CommonFlags& flags, const std::string& export_lp, bool no_sim) {
  ConfigPtr config = flags.make_config();
  leadsim_mdp* raw = nullptr;
  check(leadsim_mdp_solve(config.get(), &raw));
  MdpPtr mdp(raw);
  const double g = leadsim_mdp_avg_cost(mdp.get());

  double gbs_cost = 0.0, gbs_se = 0.0, cbs_cost = 0.0, cbs_se = 0.0;
  if (!no_sim) {
    leadsim_result* sim = nullptr;
    check(leadsim_simulate(config.get(), &sim));
    ResultPtr gbs(sim);
    check(leadsim_result_agg(gbs.get(), LEADSIM_STAT_AVG_COST, &gbs_cost, &gbs_se));

    ConfigPtr cbs_config = flags.make_config();
    check(leadsim_config_set(cbs_config.get(), "policy.kind", "cbs"));
    check(leadsim_simulate(cbs_config.get(), &sim));
    ResultPtr cbs(sim);
    check(leadsim_result_agg(cbs.get(), LEADSIM_STAT_AVG_COST, &cbs_cost, &cbs_se));
  }

  if (!export_lp.empty()) check(leadsim_mdp_export_lp(mdp.get(), export_lp.c_str()));

  int64_t states = 0, state_actions = 0, y_min = 0, y_max = 0;
  check(leadsim_mdp_counts(mdp.get(), &states, &state_actions));
  check(leadsim_mdp_target_range(mdp.get(), &y_min, &y_max));

  std::ostringstream os;
  os << "{\n  \"g\": " << fmt(g) << ",\n";
  os << "  \"states\": " << states << ",\n  \"constraints\": " << state_actions + 1
     << ",\n  \"variables\": " << states + 1 << ",\n";
  os << "  \"target_violations\": " << leadsim_mdp_target_violations(mdp.get()) << ",\n";
  if (!no_sim) {
    os << "  \"gbs\": {\"avg_cost\": " << fmt(gbs_cost) << ", \"se\": " << fmt(gbs_se)
       << ", \"opt_gap\": " << fmt((gbs_cost - g) / g) << "},\n";
    os << "  \"cbs\": {\"avg_cost\": " << fmt(cbs_cost) << ", \"se\": " << fmt(cbs_se)
       << ", \"opt_gap\": " << fmt((cbs_cost - g) / g) << "},\n";
  }
  os << "  \"target\": [\n";
  for (int64_t y = y_min; y <= y_max; ++y) {
    int64_t level = 0;
    check(leadsim_mdp_target_level(mdp.get(), y, &level));
    double gbs_target = 0.0;
    check(leadsim_policy_target(config.get(), y, &gbs_target));
    os << "    {\"y\": " << y << ", \"level\": " << level
       << ", \"gbs_target\": " << fmt(gbs_target) << "}" << (y < y_max ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  write_output(flags.out, os.str());
  return 0;
}

int cmd_scaling(const CommonFlags& flags, const std::vector<std::string>& rows,
                const std::vector<double>& gammas) {
  if (rows.empty()) throw CliError(LEADSIM_ERR_CONFIG, "--rows is required");
  const bool from_preset = !flags.preset.empty();
  if (!from_preset && gammas.size() != rows.size()) {
    throw CliError(LEADSIM_ERR_CONFIG,
                   "--config scaling needs --gammas with one value per row");
  }

  std::vector<double> lead_demand;
  std::vector<double> gbs_costs, gbs_ses, gbs_gammas, cbs_costs, cbs_ses;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CommonFlags row_flags = flags;
    row_flags.row = rows[i];
    ConfigPtr gbs_config;
    if (from_preset) {
      gbs_config = row_flags.make_config();
    } else {
      gbs_config = flags.make_config();
      const double beta = info(gbs_config.get(), "beta");
      const double rb = std::stod(rows[i]);
      check(leadsim_config_set(gbs_config.get(), "system.r", fmt(rb * beta).c_str()));
      check(leadsim_config_set(gbs_config.get(), "policy.gamma", fmt(gammas[i]).c_str()));
      check(leadsim_config_set(gbs_config.get(), "policy.kind", "gbs"));
    }
    leadsim_result* raw = nullptr;
    check(leadsim_simulate(gbs_config.get(), &raw));
    ResultPtr gbs(raw);

    ConfigPtr cbs_config = from_preset ? row_flags.make_config() : flags.make_config();
    if (!from_preset) {
      const double beta = info(cbs_config.get(), "beta");
      check(leadsim_config_set(cbs_config.get(), "system.r",
                               fmt(std::stod(rows[i]) * beta).c_str()));
    }
    check(leadsim_config_set(cbs_config.get(), "policy.kind", "cbs"));
    check(leadsim_simulate(cbs_config.get(), &raw));
    ResultPtr cbs(raw);

    lead_demand.push_back(info(gbs_config.get(), "lead_demand"));
    gbs_gammas.push_back(info(gbs_config.get(), "gamma"));
    double mean = 0.0, se = 0.0;
    check(leadsim_result_agg(gbs.get(), LEADSIM_STAT_AVG_COST, &mean, &se));
    gbs_costs.push_back(mean);
    gbs_ses.push_back(se);
    check(leadsim_result_agg(cbs.get(), LEADSIM_STAT_AVG_COST, &mean, &se));
    cbs_costs.push_back(mean);
    cbs_ses.push_back(se);
  }

  double cbs_b0 = 0.0, cbs_b1 = 0.0, cbs_r2 = 0.0, gbs_b0 = 0.0, gbs_b1 = 0.0, gbs_r2 = 0.0;
  const int n = static_cast<int>(rows.size());
  check(leadsim_fit_loglog(lead_demand.data(), cbs_costs.data(), n, &cbs_b0, &cbs_b1, &cbs_r2));
  check(leadsim_fit_loglog(lead_demand.data(), gbs_costs.data(), n, &gbs_b0, &gbs_b1, &gbs_r2));

  std::ostringstream os;
  ConfigPtr fmt_probe = [&] {
    CommonFlags probe = flags;
    if (from_preset) probe.row = rows[0];
    return probe.make_config();
  }();
  if (flags.resolved_format(fmt_probe.get()) == "json") {
    os << "{\n  \"points\": [\n";
    for (int i = 0; i < n; ++i) {
      os << "    {\"lead_demand\": " << fmt(lead_demand[static_cast<std::size_t>(i)])
         << ", \"gbs_gamma\": " << fmt(gbs_gammas[static_cast<std::size_t>(i)])
         << ", \"gbs_cost\": " << fmt(gbs_costs[static_cast<std::size_t>(i)])
         << ", \"gbs_se\": " << fmt(gbs_ses[static_cast<std::size_t>(i)])
         << ", \"cbs_cost\": " << fmt(cbs_costs[static_cast<std::size_t>(i)])
         << ", \"cbs_se\": " << fmt(cbs_ses[static_cast<std::size_t>(i)]) << "}"
         << (i + 1 < n ? "," : "") << "\n";
    }
    os << "  ],\n";
    os << "  \"fit\": {\"cbs\": {\"intercept\": " << fmt(cbs_b0) << ", \"slope\": " << fmt(cbs_b1)
       << ", \"r_squared\": " << fmt(cbs_r2) << "}, \"gbs\": {\"intercept\": " << fmt(gbs_b0)
       << ", \"slope\": " << fmt(gbs_b1) << ", \"r_squared\": " << fmt(gbs_r2) << "}}\n}\n";
  } else {
    os << "kind,lead_demand,policy,gamma,avg_cost,se,intercept,slope,r_squared\n";
    for (int i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      os << "point," << fmt(lead_demand[idx]) << ",gbs," << fmt(gbs_gammas[idx]) << ','
         << fmt(gbs_costs[idx]) << ',' << fmt(gbs_ses[idx]) << ",,,\n";
      os << "point," << fmt(lead_demand[idx]) << ",cbs,1," << fmt(cbs_costs[idx]) << ','
         << fmt(cbs_ses[idx]) << ",,,\n";
    }
    os << "fit,,cbs,,,," << fmt(cbs_b0) << ',' << fmt(cbs_b1) << ',' << fmt(cbs_r2) << "\n";
    os << "fit,,gbs,,,," << fmt(gbs_b0) << ',' << fmt(gbs_b1) << ',' << fmt(gbs_r2) << "\n";
  }
  write_output(flags.out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leadsim: inventory policy simulation and optimization toolkit"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  CLI::App* simulate = app.add_subcommand("simulate", "Run the configured experiment");
  sim_flags.attach(simulate);

  CommonFlags art_flags;
  CLI::App* artificial =
      app.add_subcommand("artificial", "Run the pinned-pipeline birth-death process");
  art_flags.attach(artificial);

  CommonFlags sweep_flags;
  double lo = 1.0, hi = 4.0, step = 0.2;
  CLI::App* sweep = app.add_subcommand("sweep-gamma", "Cost-vs-gamma curve with shared streams");
  sweep_flags.attach(sweep);
  sweep->add_option("--lo", lo, "Smallest gamma");
  sweep->add_option("--hi", hi, "Largest gamma");
  sweep->add_option("--step", step, "Grid increment");

  CommonFlags mdp_flags;
  std::string export_lp;
  bool no_sim = false;
  CLI::App* mdp = app.add_subcommand("mdp", "Average-cost optimality benchmark");
  mdp_flags.attach(mdp);
  mdp->add_option("--export-lp", export_lp, "Write the LP formulation to this path");
  mdp->add_flag("--no-sim", no_sim, "Skip the policy simulations used for gap reporting");

  CommonFlags scaling_flags;
  std::vector<std::string> rows;
  std::vector<double> gammas;
  CLI::App* scaling = app.add_subcommand("scaling", "Cost growth and log-log fit across demand");
  scaling_flags.attach(scaling);
  scaling->add_option("--rows", rows, "Mean lead-time demand values")->delimiter(',');
  scaling->add_option("--gammas", gammas, "Gains per row (required with --config)")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : LEADSIM_ERR_CONFIG;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim_flags, false);
    if (artificial->parsed()) return cmd_simulate(art_flags, true);
    if (sweep->parsed()) return cmd_sweep_gamma(sweep_flags, lo, hi, step);
    if (mdp->parsed()) return cmd_mdp(mdp_flags, export_lp, no_sim);
    if (scaling->parsed()) return cmd_scaling(scaling_flags, rows, gammas);
  } catch (const CliError& e) {
    std::cerr << "leadsim: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "leadsim: " << e.what() << "\n";
    return LEADSIM_ERR_RUNTIME;
  }
  return 0;
}
