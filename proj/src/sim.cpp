#include "sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <thread>

namespace leadsim {

void Protocol::validate() const {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (!(warmup >= 0.0) || !(warmup < horizon)) {
    throw std::invalid_argument("warmup must satisfy 0 <= warmup < horizon");
  }
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
}

void LevelHistogram::add(long level, double mass) {
  if (empty_) {
    offset_ = level;
    mass_.assign(1, 0.0);
    empty_ = false;
  }
  if (level < offset_) {
    mass_.insert(mass_.begin(), static_cast<std::size_t>(offset_ - level), 0.0);
    offset_ = level;
  } else if (level > max_level()) {
    mass_.resize(static_cast<std::size_t>(level - offset_) + 1, 0.0);
  }
  mass_[static_cast<std::size_t>(level - offset_)] += mass;
}

double LevelHistogram::total_mass() const noexcept {
  double s = 0.0;
  for (double m : mass_) s += m;
  return s;
}

double LevelHistogram::mass_at(long level) const noexcept {
  if (empty_ || level < offset_ || level > max_level()) return 0.0;
  return mass_[static_cast<std::size_t>(level - offset_)];
}

void LevelHistogram::merge(const LevelHistogram& other) {
  if (other.empty_) return;
  for (long lvl = other.min_level(); lvl <= other.max_level(); ++lvl) {
    const double m = other.mass_at(lvl);
    if (m != 0.0) add(lvl, m);
  }
}

double LevelHistogram::tv_distance(const LevelHistogram& a, const LevelHistogram& b) {
  const double ta = a.total_mass();
  const double tb = b.total_mass();
  if (!(ta > 0.0) || !(tb > 0.0)) return 1.0;
  const long lo = std::min(a.min_level(), b.min_level());
  const long hi = std::max(a.max_level(), b.max_level());
  double dist = 0.0;
  for (long lvl = lo; lvl <= hi; ++lvl) {
    dist += std::fabs(a.mass_at(lvl) / ta - b.mass_at(lvl) / tb);
  }
  return 0.5 * dist;
}

double LevelHistogram::tv_distance_pmf(long pmf_min, const std::vector<double>& pmf) const {
  const double t = total_mass();
  if (!(t > 0.0)) return 1.0;
  const long pmf_max = pmf_min + static_cast<long>(pmf.size()) - 1;
  const long lo = std::min(min_level(), pmf_min);
  const long hi = std::max(max_level(), pmf_max);
  double dist = 0.0;
  for (long lvl = lo; lvl <= hi; ++lvl) {
    const double p = (lvl >= pmf_min && lvl <= pmf_max)
                         ? pmf[static_cast<std::size_t>(lvl - pmf_min)]
                         : 0.0;
    dist += std::fabs(mass_at(lvl) / t - p);
  }
  return 0.5 * dist;
}

namespace {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) noexcept {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

struct CalendarEntry {
  double time;
  std::uint64_t seq;
  EventKind kind;
};

struct LaterFirst {
  bool operator()(const CalendarEntry& a, const CalendarEntry& b) const noexcept {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;  // ties resolved by insertion sequence
  }
};

using Calendar =
    std::priority_queue<CalendarEntry, std::vector<CalendarEntry>, LaterFirst>;

/// Accumulates the window-clipped time integrals of the piecewise-constant
/// state and, at the end, turns them into time averages.
class WindowStats {
public:
  WindowStats(const CostParams& cost, double warmup, double horizon,
              LevelHistogram* y_hist, LevelHistogram* z_hist)
      : cost_(cost), warmup_(warmup), horizon_(horizon), y_hist_(y_hist), z_hist_(z_hist) {}

  void observe(double from, double to, long y, long z, long gap) {
    const double lo = std::max(from, warmup_);
    const double hi = std::min(to, horizon_);
    if (hi <= lo) return;
    const double dt = hi - lo;
    const double yd = static_cast<double>(y);
    const double zd = static_cast<double>(z);
    cost_int_.add(instantaneous_cost(y, cost_) * dt);
    pos_int_.add(y > 0 ? yd * dt : 0.0);
    neg_int_.add(y < 0 ? -yd * dt : 0.0);
    y_int_.add(yd * dt);
    y2_int_.add(yd * yd * dt);
    z_int_.add(zd * dt);
    z2_int_.add(zd * zd * dt);
    gap_int_.add(static_cast<double>(gap) * dt);
    if (static_cast<double>(gap) > max_gap_) max_gap_ = static_cast<double>(gap);
    if (y_hist_ != nullptr) y_hist_->add(y, dt);
    if (z_hist_ != nullptr) z_hist_->add(z, dt);
  }

  RepStats finish(double events) const {
    const double w = horizon_ - warmup_;
    RepStats s;
    s.avg_cost = cost_int_.sum / w;
    s.mean_pos = pos_int_.sum / w;
    s.mean_neg = neg_int_.sum / w;
    s.mean_y = y_int_.sum / w;
    s.var_y = std::max(0.0, y2_int_.sum / w - s.mean_y * s.mean_y);
    s.mean_z = z_int_.sum / w;
    s.var_z = std::max(0.0, z2_int_.sum / w - s.mean_z * s.mean_z);
    s.mean_gap = gap_int_.sum / w;
    s.max_gap = max_gap_;
    s.events = events;
    return s;
  }

private:
  CostParams cost_;
  double warmup_;
  double horizon_;
  LevelHistogram* y_hist_;
  LevelHistogram* z_hist_;
  KahanSum cost_int_, pos_int_, neg_int_, y_int_, y2_int_, z_int_, z2_int_, gap_int_;
  double max_gap_ = 0.0;
};

constexpr double kEventCeilingFactor = 64.0;

double event_ceiling(const SimConfig& config) {
  return std::max(1.0e6, kEventCeilingFactor * config.sys.demand_rate *
                             config.protocol.horizon);
}

}  // namespace

RepStats run_replication(const SimConfig& config, int rep_index,
                         LevelHistogram* y_hist, LevelHistogram* z_hist) {
  config.protocol.validate();
  const SystemParams& sys = config.sys;
  const GbsParams& pol = config.policy;
  const double horizon = config.protocol.horizon;

  RngStream demand_rng(config.protocol.seed, 2ULL * static_cast<std::uint64_t>(rep_index));
  RngStream lead_rng(config.protocol.seed, 2ULL * static_cast<std::uint64_t>(rep_index) + 1ULL);

  Calendar calendar;
  std::uint64_t seq = 0;
  long y = 0;
  long z = 0;

  // Empty start: the policy runs its update immediately and orders up to the
  // quantized T(0); the warm-up window absorbs the transient.
  double target_t = 0.0;
  {
    const PolicyDecision d = gbs_decide(y, z, pol, sys);
    for (long i = 0; i < d.order_qty; ++i) {
      calendar.push({sample_leadtime(sys.leadtime, lead_rng), seq++, EventKind::ItemArrival});
    }
    z += d.order_qty;
    target_t = d.target_t;
  }
  calendar.push({exp_interarrival(sys.demand_rate, demand_rng), seq++, EventKind::DemandArrival});

  WindowStats stats(config.cost, config.protocol.warmup, horizon, y_hist, z_hist);
  // The reported gap always uses the defining D = z - ceil(T); the engine
  // invariant is that z never falls below the policy's own quantized target.
  long gap = z - ceil_snapped(target_t);
  double clock = 0.0;
  double events = 0.0;
  const double max_events = event_ceiling(config);

  while (!calendar.empty()) {
    const CalendarEntry ev = calendar.top();
    if (ev.time >= horizon) break;
    calendar.pop();
    stats.observe(clock, ev.time, y, z, gap);
    clock = ev.time;

    const Transition t = apply_event(y, z, ev.kind, pol, sys);
    y = t.y;
    z = t.z;
    if (ev.kind == EventKind::DemandArrival) {
      calendar.push({clock + exp_interarrival(sys.demand_rate, demand_rng), seq++,
                     EventKind::DemandArrival});
    }
    for (long i = 0; i < t.orders; ++i) {
      calendar.push({clock + sample_leadtime(sys.leadtime, lead_rng), seq++,
                     EventKind::ItemArrival});
    }

    gap = z - ceil_snapped(t.target_t);
    if (z - quantize(t.target_t, pol.rounding) < 0) {
      throw std::logic_error("pipeline fell below its target after ordering");
    }

    if (++events > max_events) {
      throw std::runtime_error("event-count ceiling exceeded; simulation did not terminate");
    }
  }
  stats.observe(clock, horizon, y, z, gap);
  return stats.finish(events);
}

RepStats run_artificial_replication(const SimConfig& config, int rep_index,
                                    LevelHistogram* y_hist, LevelHistogram* z_hist) {
  config.protocol.validate();
  const SystemParams& sys = config.sys;
  const GbsParams& pol = config.policy;
  const double horizon = config.protocol.horizon;

  RngStream rng(config.protocol.seed, 2ULL * static_cast<std::uint64_t>(rep_index));

  WindowStats stats(config.cost, config.protocol.warmup, horizon, y_hist, z_hist);
  long y = 0;
  double clock = 0.0;
  double events = 0.0;
  const double max_events = event_ceiling(config);

  while (true) {
    const BirthDeathRates rates = artificial_rates(y, pol, sys);
    const double total = rates.up + rates.down;
    const double next = clock + exp_interarrival(total, rng);
    if (next >= horizon) {
      stats.observe(clock, horizon, y, gbs_target_ceil(y, pol, sys), 0);
      break;
    }
    stats.observe(clock, next, y, gbs_target_ceil(y, pol, sys), 0);
    clock = next;
    y += (rng.next_uniform() * total < rates.up) ? 1 : -1;
    if (++events > max_events) {
      throw std::runtime_error("event-count ceiling exceeded; simulation did not terminate");
    }
  }
  return stats.finish(events);
}

int worker_count() {
  if (const char* env = std::getenv("LEADSIM_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && cap <= 4096) return static_cast<int>(cap);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

template <typename RepFn>
SimResult run_all_replications(const SimConfig& config, RepFn&& rep_fn) {
  config.protocol.validate();
  const int n = config.protocol.replications;
  SimResult result;
  result.reps.resize(static_cast<std::size_t>(n));
  result.window = config.protocol.horizon - config.protocol.warmup;
  std::vector<LevelHistogram> y_hists(static_cast<std::size_t>(n));
  std::vector<LevelHistogram> z_hists(static_cast<std::size_t>(n));

  const int workers = std::min(worker_count(), n);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        result.reps[static_cast<std::size_t>(i)] =
            rep_fn(config, i, &y_hists[static_cast<std::size_t>(i)],
                   &z_hists[static_cast<std::size_t>(i)]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Aggregation is in stream order, independent of the execution schedule.
  auto accumulate = [n](auto member, const std::vector<RepStats>& reps, RepStats& mean,
                        RepStats& se) {
    double m = 0.0;
    for (const RepStats& r : reps) m += r.*member;
    m /= n;
    double ss = 0.0;
    for (const RepStats& r : reps) {
      const double d = r.*member - m;
      ss += d * d;
    }
    mean.*member = m;
    se.*member = n > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n)) : 0.0;
  };
  for (auto member : {&RepStats::avg_cost, &RepStats::mean_pos, &RepStats::mean_neg,
                      &RepStats::mean_y, &RepStats::var_y, &RepStats::mean_z,
                      &RepStats::var_z, &RepStats::mean_gap, &RepStats::max_gap,
                      &RepStats::events}) {
    accumulate(member, result.reps, result.mean, result.se);
  }
  for (int i = 0; i < n; ++i) {
    result.y_hist.merge(y_hists[static_cast<std::size_t>(i)]);
    result.z_hist.merge(z_hists[static_cast<std::size_t>(i)]);
  }
  return result;
}

}  // namespace

SimResult run_experiment(const SimConfig& config) {
  return run_all_replications(
      config, [](const SimConfig& c, int i, LevelHistogram* yh, LevelHistogram* zh) {
        return run_replication(c, i, yh, zh);
      });
}

SimResult simulate_artificial(const SimConfig& config) {
  if (!config.sys.leadtime.is_exponential()) {
    throw std::invalid_argument("artificial process requires exponential lead times");
  }
  return run_all_replications(
      config, [](const SimConfig& c, int i, LevelHistogram* yh, LevelHistogram* zh) {
        return run_artificial_replication(c, i, yh, zh);
      });
}

}  // namespace leadsim
