#pragma once

#include <vector>

#include "sim.hpp"

namespace leadsim {

/// Exact stationary distribution of the artificial birth-death chain,
/// computed from detailed balance pi(y+1) * r = pi(y) * up(y).
struct StationaryDist {
  long y_min = 0;
  std::vector<double> pmf;  // pmf[i] = P{Y = y_min + i}
  double mean = 0.0;
  double mean_pos = 0.0;
  double mean_neg = 0.0;
  double stddev = 0.0;
  double max_balance_residual = 0.0;  // max |pi(y) up(y) - pi(y+1) r| / max pi

  long y_max() const noexcept { return y_min + static_cast<long>(pmf.size()) - 1; }
  double pmf_at(long y) const noexcept;
};

StationaryDist artificial_stationary(const GbsParams& params, const SystemParams& sys);

/// Closed-form cost of the limiting normal law: h E[(N+x*)+] + theta E[(N+x*)-]
/// for N ~ Normal(0, r/(gamma beta)).
double normal_limit_cost(const CostParams& cost, const SystemParams& sys, double gamma,
                         double x_star);

struct GammaCurvePoint {
  double gamma = 0.0;
  double x_star = 0.0;
  double cost = 0.0;
  double se = 0.0;
};

struct GammaSearchResult {
  std::vector<GammaCurvePoint> curve;
  int best_index = 0;

  const GammaCurvePoint& best() const { return curve[static_cast<std::size_t>(best_index)]; }
};

/// Grid search over gamma in [lo, hi] with the given step, re-deriving x*
/// per gamma and reusing the same replication streams at every grid point
/// (common random numbers).
GammaSearchResult gamma_search(const SimConfig& base, double gamma_lo, double gamma_hi,
                               double step);

struct LoglogFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of ln y on ln x. Requires n >= 2 and positive
/// coordinates; throws std::domain_error otherwise.
LoglogFit loglog_fit(const std::vector<std::pair<double, double>>& points);

enum class FluidKind { Gbs, Cbs, Pout };

/// Closed-form fluid inventory level at time t. `gain` is gamma for the
/// gbs kind and the position-decay rate delta for the pout kind; it is
/// ignored for cbs. u0 (initial pipeline offset) matters only for pout.
double fluid_trajectory(FluidKind kind, double y0, double u0, double beta, double gain,
                        double t);

struct GapRow {
  double lead_demand = 0.0;        // r / beta
  double mean_gap = 0.0;           // E D from simulation
  double mean_y = 0.0;             // E Y from simulation
  double se_mean_y = 0.0;
  double artificial_mean_y = 0.0;  // E Y-hat from the exact solve
  double scaled_mean_diff = 0.0;   // (E Y - E Y-hat) / sqrt(r)
};

/// Gap and actual-vs-artificial comparison across matched configurations
/// with increasing demand rate.
std::vector<GapRow> gap_summary(const std::vector<SimConfig>& configs);

}  // namespace leadsim
