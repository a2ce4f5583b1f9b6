#include "leadsim/leadsim.h"

#include <cstring>
#include <string>

#include "analysis.hpp"
#include "config.hpp"
#include "mdp.hpp"
#include "sim.hpp"

using namespace leadsim;

struct leadsim_config {
  ExperimentConfig config;
};

struct leadsim_result {
  SimResult result;
};

struct leadsim_sweep {
  GammaSearchResult sweep;
};

struct leadsim_mdp {
  MdpSolution solution;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

template <typename Fn>
leadsim_status guarded(Fn&& fn) {
  try {
    fn();
    return LEADSIM_OK;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return LEADSIM_ERR_CONFIG;
  } catch (const std::domain_error& e) {
    set_error(e.what());
    return LEADSIM_ERR_CONFIG;
  } catch (const std::out_of_range& e) {
    set_error(e.what());
    return LEADSIM_ERR_CONFIG;
  } catch (const std::exception& e) {
    set_error(e.what());
    return LEADSIM_ERR_RUNTIME;
  } catch (...) {
    set_error("unknown error");
    return LEADSIM_ERR_RUNTIME;
  }
}

double stat_of(const RepStats& stats, leadsim_stat stat, bool* ok) {
  *ok = true;
  switch (stat) {
    case LEADSIM_STAT_AVG_COST: return stats.avg_cost;
    case LEADSIM_STAT_MEAN_POS: return stats.mean_pos;
    case LEADSIM_STAT_MEAN_NEG: return stats.mean_neg;
    case LEADSIM_STAT_MEAN_Y: return stats.mean_y;
    case LEADSIM_STAT_VAR_Y: return stats.var_y;
    case LEADSIM_STAT_MEAN_Z: return stats.mean_z;
    case LEADSIM_STAT_VAR_Z: return stats.var_z;
    case LEADSIM_STAT_MEAN_GAP: return stats.mean_gap;
    case LEADSIM_STAT_MAX_GAP: return stats.max_gap;
    case LEADSIM_STAT_EVENTS: return stats.events;
  }
  *ok = false;
  return 0.0;
}

}  // namespace

extern "C" {

const char* leadsim_version(void) { return "1.0.0"; }

const char* leadsim_last_error(void) { return g_last_error.c_str(); }

leadsim_status leadsim_config_parse(const char* json_text, leadsim_config** out) {
  if (json_text == nullptr || out == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] { *out = new leadsim_config{ExperimentConfig::parse(json_text)}; });
}

leadsim_status leadsim_config_load(const char* path, leadsim_config** out) {
  if (path == nullptr || out == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] { *out = new leadsim_config{ExperimentConfig::load(path)}; });
}

leadsim_status leadsim_config_preset(const char* table, const char* row, leadsim_config** out) {
  if (table == nullptr || row == nullptr || out == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] { *out = new leadsim_config{ExperimentConfig::preset(table, row)}; });
}

leadsim_status leadsim_config_set(leadsim_config* config, const char* key, const char* value) {
  if (config == nullptr || key == nullptr || value == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] { config->config.set(key, value); });
}

leadsim_status leadsim_config_dump(const leadsim_config* config, char* buf, size_t cap,
                                   size_t* needed) {
  if (config == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] {
    const std::string text = config->config.to_json();
    if (needed != nullptr) *needed = text.size() + 1;
    if (buf != nullptr && cap > 0) {
      const size_t n = text.size() < cap - 1 ? text.size() : cap - 1;
      std::memcpy(buf, text.data(), n);
      buf[n] = '\0';
    }
  });
}

leadsim_status leadsim_config_info(const leadsim_config* config, const char* key, double* out) {
  if (config == nullptr || key == nullptr || out == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] {
    const ResolvedConfig resolved = config->config.resolve();
    const std::string k = key;
    if (k == "r") *out = resolved.sim.sys.demand_rate;
    else if (k == "beta") *out = resolved.sim.sys.beta;
    else if (k == "lead_demand") *out = resolved.sim.sys.lead_demand();
    else if (k == "h") *out = resolved.sim.cost.holding;
    else if (k == "theta") *out = resolved.sim.cost.backlog;
    else if (k == "gamma") *out = resolved.sim.policy.gamma;
    else if (k == "f") *out = resolved.sim.policy.f;
    else if (k == "x_star") *out = resolved.x_star;
    else if (k == "gamma_x_star") *out = resolved.gamma_x_star;
    else if (k == "base") *out = resolved.base;
    else if (k == "cbs_base") *out = static_cast<double>(resolved.cbs_base);
    else if (k == "horizon") *out = resolved.sim.protocol.horizon;
    else if (k == "warmup") *out = resolved.sim.protocol.warmup;
    else if (k == "replications") *out = resolved.sim.protocol.replications;
    else if (k == "seed") *out = static_cast<double>(resolved.sim.protocol.seed);
    else if (k == "policy_kind") *out = static_cast<double>(static_cast<int>(resolved.kind));
    else if (k == "rounding") *out = resolved.sim.policy.rounding == OrderRounding::Floor ? 1.0 : 0.0;
    else throw std::invalid_argument("unknown info key \"" + k + "\"");
  });
}

void leadsim_config_free(leadsim_config* config) { delete config; }

leadsim_status leadsim_simulate(const leadsim_config* config, leadsim_result** out) {
  if (config == nullptr || out == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] {
    const ResolvedConfig resolved = config->config.resolve();
    SimResult result = resolved.kind == PolicyKind::Artificial
                           ? simulate_artificial(resolved.sim)
                           : run_experiment(resolved.sim);
    *out = new leadsim_result{std::move(result)};
  });
}

int leadsim_result_replications(const leadsim_result* result) {
  return result == nullptr ? 0 : static_cast<int>(result->result.reps.size());
}

leadsim_status leadsim_result_rep_stat(const leadsim_result* result, int rep, leadsim_stat stat,
                                       double* out) {
  if (result == nullptr || out == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  if (rep < 0 || rep >= static_cast<int>(result->result.reps.size())) {
    set_error("replication index out of range");
    return LEADSIM_ERR_CONFIG;
  }
  bool ok = false;
  *out = stat_of(result->result.reps[static_cast<std::size_t>(rep)], stat, &ok);
  if (!ok) {
    set_error("unknown statistic");
    return LEADSIM_ERR_CONFIG;
  }
  return LEADSIM_OK;
}

leadsim_status leadsim_result_agg(const leadsim_result* result, leadsim_stat stat, double* mean,
                                  double* se) {
  if (result == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  bool ok_mean = true;
  bool ok_se = true;
  if (mean != nullptr) *mean = stat_of(result->result.mean, stat, &ok_mean);
  if (se != nullptr) *se = stat_of(result->result.se, stat, &ok_se);
  if (!ok_mean || !ok_se) {
    set_error("unknown statistic");
    return LEADSIM_ERR_CONFIG;
  }
  return LEADSIM_OK;
}

void leadsim_result_free(leadsim_result* result) { delete result; }

leadsim_status leadsim_sweep_gamma(const leadsim_config* config, double lo, double hi,
                                   double step, leadsim_sweep** out) {
  if (config == nullptr || out == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] {
    const ResolvedConfig resolved = config->config.resolve();
    *out = new leadsim_sweep{gamma_search(resolved.sim, lo, hi, step)};
  });
}

int leadsim_sweep_points(const leadsim_sweep* sweep) {
  return sweep == nullptr ? 0 : static_cast<int>(sweep->sweep.curve.size());
}

leadsim_status leadsim_sweep_point(const leadsim_sweep* sweep, int index, double* gamma,
                                   double* cost, double* se) {
  if (sweep == nullptr || index < 0 ||
      index >= static_cast<int>(sweep->sweep.curve.size())) {
    set_error("sweep index out of range");
    return LEADSIM_ERR_CONFIG;
  }
  const GammaCurvePoint& point = sweep->sweep.curve[static_cast<std::size_t>(index)];
  if (gamma != nullptr) *gamma = point.gamma;
  if (cost != nullptr) *cost = point.cost;
  if (se != nullptr) *se = point.se;
  return LEADSIM_OK;
}

int leadsim_sweep_best(const leadsim_sweep* sweep) {
  return sweep == nullptr ? -1 : sweep->sweep.best_index;
}

void leadsim_sweep_free(leadsim_sweep* sweep) { delete sweep; }

leadsim_status leadsim_mdp_solve(const leadsim_config* config, leadsim_mdp** out) {
  if (config == nullptr || out == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] {
    const ResolvedConfig resolved = config->config.resolve();
    if (!resolved.sim.sys.leadtime.is_exponential()) {
      throw std::invalid_argument("mdp benchmark requires exponential lead times");
    }
    if (resolved.sim.sys.lead_demand() > 1000.0) {
      throw std::invalid_argument("mdp benchmark supports mean lead-time demand up to 1000");
    }
    MdpSolveOptions opts;
    const auto& doc = config->config.doc();
    if (doc.contains("mdp")) {
      const auto& m = doc["mdp"];
      if (m.contains("kappa0")) opts.kappa0 = m["kappa0"].get<double>();
      if (m.contains("kappa_max")) opts.kappa_max = m["kappa_max"].get<double>();
      if (m.contains("stabilization")) opts.stabilization = m["stabilization"].get<double>();
      if (m.contains("g_tol")) opts.g_tol = m["g_tol"].get<double>();
    }
    *out = new leadsim_mdp{solve_inventory_mdp(resolved.sim.sys.demand_rate,
                                               resolved.sim.sys.beta,
                                               resolved.sim.cost.holding,
                                               resolved.sim.cost.backlog, opts)};
  });
}

double leadsim_mdp_avg_cost(const leadsim_mdp* mdp) {
  return mdp == nullptr ? 0.0 : mdp->solution.g();
}

leadsim_status leadsim_mdp_counts(const leadsim_mdp* mdp, int64_t* states,
                                  int64_t* state_actions) {
  if (mdp == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  if (states != nullptr) *states = mdp->solution.states;
  if (state_actions != nullptr) *state_actions = mdp->solution.state_actions;
  return LEADSIM_OK;
}

leadsim_status leadsim_mdp_target_range(const leadsim_mdp* mdp, int64_t* y_min, int64_t* y_max) {
  if (mdp == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  if (y_min != nullptr) *y_min = mdp->solution.target.y_min;
  if (y_max != nullptr) *y_max = mdp->solution.target.y_max();
  return LEADSIM_OK;
}

leadsim_status leadsim_mdp_target_level(const leadsim_mdp* mdp, int64_t y, int64_t* level) {
  if (mdp == nullptr || level == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] { *level = mdp->solution.target.level_at(y); });
}

int64_t leadsim_mdp_target_violations(const leadsim_mdp* mdp) {
  return mdp == nullptr ? -1 : mdp->solution.target.violations;
}

leadsim_status leadsim_mdp_export_lp(const leadsim_mdp* mdp, const char* path) {
  if (mdp == nullptr || path == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] {
    InventoryMdp model(mdp->solution.spec);
    export_lp_file(model, path);
  });
}

void leadsim_mdp_free(leadsim_mdp* mdp) { delete mdp; }

leadsim_status leadsim_policy_target(const leadsim_config* config, int64_t y, double* target) {
  if (config == nullptr || target == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] {
    const ResolvedConfig resolved = config->config.resolve();
    *target = static_cast<double>(
        gbs_target_ceil(static_cast<long>(y), resolved.sim.policy, resolved.sim.sys));
  });
}

leadsim_status leadsim_fit_loglog(const double* x, const double* y, int n, double* intercept,
                                  double* slope, double* r_squared) {
  if (x == nullptr || y == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] {
    std::vector<std::pair<double, double>> points;
    points.reserve(static_cast<std::size_t>(n > 0 ? n : 0));
    for (int i = 0; i < n; ++i) points.emplace_back(x[i], y[i]);
    const LoglogFit fit = loglog_fit(points);
    if (intercept != nullptr) *intercept = fit.intercept;
    if (slope != nullptr) *slope = fit.slope;
    if (r_squared != nullptr) *r_squared = fit.r_squared;
  });
}

leadsim_status leadsim_inv_norm_cdf(double p, double* out) {
  if (out == nullptr) {
    set_error("null argument");
    return LEADSIM_ERR_CONFIG;
  }
  return guarded([&] { *out = inv_norm_cdf(p); });
}

}  // extern "C"
