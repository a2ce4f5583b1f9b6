#include "model.hpp"

#include <cmath>
#include <stdexcept>

namespace leadsim {

SystemParams::SystemParams(double r, const LeadTimeSpec& lt)
    : demand_rate(r), leadtime(lt), beta(1.0 / lt.mean()) {
  if (!(r > 0.0)) throw std::invalid_argument("demand rate must be > 0");
}

SystemParams::SystemParams(double r, const LeadTimeSpec& lt, double beta_claim)
    : SystemParams(r, lt) {
  if (std::fabs(beta_claim - beta) > 1e-12 * beta) {
    throw std::invalid_argument("beta inconsistent with the lead-time law's mean");
  }
}

CostParams::CostParams(double h, double theta) : holding(h), backlog(theta) {
  if (!(h > 0.0) || !(theta > 0.0)) {
    throw std::invalid_argument("cost rates must be > 0");
  }
}

GbsParams::GbsParams(double gamma_, double f_, double x_star_, OrderRounding rounding_)
    : gamma(gamma_), f(f_), x_star(x_star_), rounding(rounding_) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(f > 0.0)) throw std::invalid_argument("f must be > 0 (may be +inf)");
}

GbsParams GbsParams::cbs(long level, const SystemParams& sys) {
  return GbsParams(1.0, std::numeric_limits<double>::infinity(),
                   static_cast<double>(level) - sys.lead_demand());
}

double instantaneous_cost(long y, const CostParams& cost) noexcept {
  return y >= 0 ? cost.holding * static_cast<double>(y)
                : cost.backlog * static_cast<double>(-y);
}

double poisson_cdf(double lambda, long k) {
  if (!(lambda > 0.0)) throw std::invalid_argument("poisson_cdf: lambda must be > 0");
  if (k < 0) return 0.0;
  double log_pmf = -lambda;  // log P(X=0)
  double cdf = std::exp(log_pmf);
  for (long i = 1; i <= k; ++i) {
    log_pmf += std::log(lambda) - std::log(static_cast<double>(i));
    cdf += std::exp(log_pmf);
  }
  return cdf < 1.0 ? cdf : 1.0;
}

double choose_xstar(const CostParams& cost, const SystemParams& sys, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  const double sigma = std::sqrt(sys.demand_rate / (gamma * sys.beta));
  return inv_norm_cdf(cost.fractile()) * sigma;
}

long choose_cbs_base(const CostParams& cost, const SystemParams& sys) {
  const double lambda = sys.lead_demand();
  const double target = cost.fractile();
  double log_pmf = -lambda;
  double cdf = std::exp(log_pmf);
  long k = 0;
  // The quantile is reached well before lambda + 40*sqrt(lambda) for any
  // fractile representable in double precision.
  const long k_max = static_cast<long>(lambda + 40.0 * std::sqrt(lambda) + 100.0);
  while (cdf < target && k < k_max) {
    ++k;
    log_pmf += std::log(lambda) - std::log(static_cast<double>(k));
    cdf += std::exp(log_pmf);
  }
  return k;
}

}  // namespace leadsim
