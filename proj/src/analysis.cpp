#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace leadsim {

double StationaryDist::pmf_at(long y) const noexcept {
  if (y < y_min || y > y_max()) return 0.0;
  return pmf[static_cast<std::size_t>(y - y_min)];
}

StationaryDist artificial_stationary(const GbsParams& params, const SystemParams& sys) {
  if (!sys.leadtime.is_exponential()) {
    throw std::invalid_argument("artificial process requires exponential lead times");
  }
  const double r = sys.demand_rate;

  // Topmost reachable state: the smallest y with up-rate zero. T(y) > 0
  // exactly for y < X**/gamma, so this is ceil(X**/gamma) up to rounding.
  long y_top = ceil_snapped(params.base(sys) / params.gamma);
  for (int guard = 0; artificial_rates(y_top, params, sys).up > 0.0 && guard < 4; ++guard) {
    ++y_top;
  }
  for (int guard = 0; artificial_rates(y_top - 1, params, sys).up <= 0.0 && guard < 4; ++guard) {
    --y_top;
  }

  // Unnormalized log weights downward from the top; the tail decays at
  // least geometrically once the up-rate exceeds r.
  std::vector<double> log_w;
  log_w.push_back(0.0);
  double max_log = 0.0;
  constexpr double kLogCut = -37.0;  // ~1e-16 relative mass
  for (long y = y_top - 1;; --y) {
    const double up = artificial_rates(y, params, sys).up;
    const double next = log_w.back() + std::log(r) - std::log(up);
    log_w.push_back(next);
    if (next > max_log) max_log = next;
    if (up > r && next - max_log < kLogCut) break;
    if (y_top - y > 10000000L) throw std::runtime_error("artificial stationary tail not summable");
  }

  StationaryDist dist;
  const long n = static_cast<long>(log_w.size());
  dist.y_min = y_top - (n - 1);
  dist.pmf.resize(static_cast<std::size_t>(n));
  double total = 0.0;
  for (long i = 0; i < n; ++i) {
    // log_w is indexed from the top; pmf is indexed from the bottom.
    const double w = std::exp(log_w[static_cast<std::size_t>(n - 1 - i)] - max_log);
    dist.pmf[static_cast<std::size_t>(i)] = w;
    total += w;
  }
  double mean = 0.0, mean_pos = 0.0, mean_neg = 0.0, second = 0.0;
  for (long i = 0; i < n; ++i) {
    const double p = dist.pmf[static_cast<std::size_t>(i)] / total;
    dist.pmf[static_cast<std::size_t>(i)] = p;
    const double y = static_cast<double>(dist.y_min + i);
    mean += p * y;
    if (y > 0) mean_pos += p * y;
    if (y < 0) mean_neg += p * -y;
    second += p * y * y;
  }
  dist.mean = mean;
  dist.mean_pos = mean_pos;
  dist.mean_neg = mean_neg;
  dist.stddev = std::sqrt(std::max(0.0, second - mean * mean));

  double max_p = 0.0;
  for (double p : dist.pmf) max_p = std::max(max_p, p);
  double max_res = 0.0;
  for (long y = dist.y_min; y < dist.y_max(); ++y) {
    const double up = artificial_rates(y, params, sys).up;
    max_res = std::max(max_res, std::fabs(dist.pmf_at(y) * up - dist.pmf_at(y + 1) * r));
  }
  dist.max_balance_residual = max_res / max_p;
  return dist;
}

double normal_limit_cost(const CostParams& cost, const SystemParams& sys, double gamma,
                         double x_star) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  const double sigma = std::sqrt(sys.demand_rate / (gamma * sys.beta));
  // E[(N+m)+] = m Phi(m/s) + s phi(m/s); E[(N+m)-] = E[(N+m)+] - m.
  const double m = x_star;
  const double pos = m * norm_cdf(m / sigma) + sigma * norm_pdf(m / sigma);
  const double neg = pos - m;
  return cost.holding * pos + cost.backlog * neg;
}

GammaSearchResult gamma_search(const SimConfig& base, double gamma_lo, double gamma_hi,
                               double step) {
  if (!(step > 0.0) || !(gamma_lo >= step)) {
    throw std::invalid_argument("gamma_search requires gamma_lo >= step > 0");
  }
  if (!(gamma_hi >= gamma_lo)) {
    throw std::invalid_argument("gamma_search requires gamma_hi >= gamma_lo");
  }
  GammaSearchResult out;
  const int points = static_cast<int>(std::floor((gamma_hi - gamma_lo) / step + 1e-9)) + 1;
  for (int i = 0; i < points; ++i) {
    const double gamma = gamma_lo + step * i;
    SimConfig config = base;
    config.policy.gamma = gamma;
    config.policy.x_star = choose_xstar(config.cost, config.sys, gamma);
    const SimResult res = run_experiment(config);
    out.curve.push_back({gamma, config.policy.x_star, res.mean.avg_cost, res.se.avg_cost});
  }
  out.best_index = 0;
  for (int i = 1; i < points; ++i) {
    if (out.curve[static_cast<std::size_t>(i)].cost <
        out.curve[static_cast<std::size_t>(out.best_index)].cost) {
      out.best_index = i;
    }
  }
  return out;
}

LoglogFit loglog_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::domain_error("loglog_fit needs at least 2 points");
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  std::vector<std::pair<double, double>> logs;
  logs.reserve(points.size());
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::domain_error("loglog_fit needs positive coordinates");
    logs.emplace_back(std::log(x), std::log(y));
    sx += logs.back().first;
    sy += logs.back().second;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [lx, ly] : logs) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
  }
  if (!(sxx > 0.0)) throw std::domain_error("loglog_fit needs at least two distinct x values");
  LoglogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& [lx, ly] : logs) {
    const double pred = fit.intercept + fit.slope * lx;
    ss_res += (ly - pred) * (ly - pred);
    ss_tot += (ly - my) * (ly - my);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return fit;
}

double fluid_trajectory(FluidKind kind, double y0, double u0, double beta, double gain,
                        double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("fluid_trajectory requires t >= 0");
  switch (kind) {
    case FluidKind::Gbs:
      return y0 * std::exp(-beta * gain * t);
    case FluidKind::Cbs:
      return y0 * std::exp(-beta * t);
    case FluidKind::Pout: {
      // W = Y + U decays at rate delta; Y' + beta Y = beta W.
      const double delta = gain;
      const double w0 = y0 + u0;
      if (std::fabs(beta - delta) < 1e-12 * std::max(beta, delta)) {
        return y0 * std::exp(-beta * t) + beta * w0 * t * std::exp(-beta * t);
      }
      return y0 * std::exp(-beta * t) +
             beta * w0 * (std::exp(-delta * t) - std::exp(-beta * t)) / (beta - delta);
    }
  }
  return 0.0;
}

std::vector<GapRow> gap_summary(const std::vector<SimConfig>& configs) {
  std::vector<GapRow> rows;
  rows.reserve(configs.size());
  for (const SimConfig& config : configs) {
    const SimResult sim = run_experiment(config);
    const StationaryDist exact = artificial_stationary(config.policy, config.sys);
    GapRow row;
    row.lead_demand = config.sys.lead_demand();
    row.mean_gap = sim.mean.mean_gap;
    row.mean_y = sim.mean.mean_y;
    row.se_mean_y = sim.se.mean_y;
    row.artificial_mean_y = exact.mean;
    row.scaled_mean_diff = (sim.mean.mean_y - exact.mean) / std::sqrt(config.sys.demand_rate);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace leadsim
