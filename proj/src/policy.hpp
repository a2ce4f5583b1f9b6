#pragma once

#include <cmath>

#include "model.hpp"

namespace leadsim {

/// Rounds values that sit within 1e-9 of an integer before applying the
/// ceiling, so grid-valued gains (0.2 increments) behave like exact
/// rationals instead of flipping an entire order on float noise.
inline double snap_to_int(double v) noexcept {
  const double r = std::nearbyint(v);
  return std::fabs(v - r) <= 1e-9 * std::fmax(1.0, std::fabs(r)) ? r : v;
}

inline long ceil_snapped(double v) noexcept {
  return static_cast<long>(std::ceil(snap_to_int(v)));
}

inline long floor_snapped(double v) noexcept {
  return static_cast<long>(std::floor(snap_to_int(v)));
}

inline long quantize(double v, OrderRounding rounding) noexcept {
  return rounding == OrderRounding::Ceil ? ceil_snapped(v) : floor_snapped(v);
}

struct PolicyDecision {
  double target_x = 0.0;   // X = X** - gamma * y
  double target_t = 0.0;   // T = clamp(X, 0, X* + f)
  long order_qty = 0;      // A = max(ceil(T - z), 0)
};

/// Target update and order quantity for the current (y, z) state.
PolicyDecision gbs_decide(long y, long z, const GbsParams& params,
                          const SystemParams& sys) noexcept;

/// Truncated target after rounding, ceil(T(y)).
long gbs_target_ceil(long y, const GbsParams& params, const SystemParams& sys) noexcept;

/// State jump for one arrival: step 1 adjusts (y, z) for the arrival kind,
/// steps 2-3 recompute the target and order. `orders` lead-time samples must
/// be drawn and scheduled by the caller.
struct Transition {
  long y = 0;
  long z = 0;
  long orders = 0;
  double target_t = 0.0;  // truncated target after the jump
};

/// Throws std::logic_error on an item arrival with an empty pipeline; that
/// state is unreachable when the calendar and z agree.
Transition apply_event(long y, long z, EventKind kind, const GbsParams& params,
                       const SystemParams& sys);

/// Birth-death rates of the artificial process in state y: items arrive at
/// beta * ceil(T(y)) because the pipeline is pinned to the target, demand
/// departs at rate r. Exponential lead times only; throws
/// std::invalid_argument otherwise.
struct BirthDeathRates {
  double up = 0.0;
  double down = 0.0;
};

BirthDeathRates artificial_rates(long y, const GbsParams& params, const SystemParams& sys);

}  // namespace leadsim
