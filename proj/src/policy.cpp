#include "policy.hpp"

#include <algorithm>
#include <stdexcept>

namespace leadsim {

PolicyDecision gbs_decide(long y, long z, const GbsParams& params,
                          const SystemParams& sys) noexcept {
  PolicyDecision d;
  const double x_star_base = sys.lead_demand();
  d.target_x = params.base(sys) - params.gamma * static_cast<double>(y);
  const double cap = x_star_base + params.f;  // +inf when f is infinite
  d.target_t = std::max(0.0, std::min(d.target_x, cap));
  d.order_qty = std::max(quantize(d.target_t - static_cast<double>(z), params.rounding), 0L);
  return d;
}

long gbs_target_ceil(long y, const GbsParams& params, const SystemParams& sys) noexcept {
  return ceil_snapped(gbs_decide(y, 0, params, sys).target_t);
}

Transition apply_event(long y, long z, EventKind kind, const GbsParams& params,
                       const SystemParams& sys) {
  Transition t;
  if (kind == EventKind::DemandArrival) {
    t.y = y - 1;
    t.z = z;
  } else {
    if (z < 1) throw std::logic_error("item arrival with empty pipeline");
    t.y = y + 1;
    t.z = z - 1;
  }
  const PolicyDecision d = gbs_decide(t.y, t.z, params, sys);
  t.orders = d.order_qty;
  t.z += d.order_qty;
  t.target_t = d.target_t;
  return t;
}

BirthDeathRates artificial_rates(long y, const GbsParams& params, const SystemParams& sys) {
  if (!sys.leadtime.is_exponential()) {
    throw std::invalid_argument("artificial process requires exponential lead times");
  }
  BirthDeathRates rates;
  rates.down = sys.demand_rate;
  rates.up = sys.beta * static_cast<double>(gbs_target_ceil(y, params, sys));
  return rates;
}

}  // namespace leadsim
