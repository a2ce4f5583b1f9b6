#pragma once

#include <cstdint>
#include <vector>

#include "model.hpp"
#include "policy.hpp"

namespace leadsim {

struct Protocol {
  double horizon = 800.0;
  double warmup = 200.0;
  int replications = 100;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SimConfig {
  SystemParams sys;
  CostParams cost;
  GbsParams policy;
  Protocol protocol;
};

/// Time spent at each integer level over the measurement window.
class LevelHistogram {
public:
  void add(long level, double mass);
  double total_mass() const noexcept;
  long min_level() const noexcept { return offset_; }
  long max_level() const noexcept { return offset_ + static_cast<long>(mass_.size()) - 1; }
  double mass_at(long level) const noexcept;
  void merge(const LevelHistogram& other);
  bool operator==(const LevelHistogram&) const = default;

  /// Total-variation distance between the two normalized histograms.
  static double tv_distance(const LevelHistogram& a, const LevelHistogram& b);

  /// TV distance against an explicit pmf starting at pmf_min.
  double tv_distance_pmf(long pmf_min, const std::vector<double>& pmf) const;

private:
  bool empty_ = true;
  long offset_ = 0;
  std::vector<double> mass_;
};

/// Time-averaged statistics of one replication over [warmup, horizon].
struct RepStats {
  double avg_cost = 0.0;   // time-average of h y+ + theta y-
  double mean_pos = 0.0;   // time-average of y+
  double mean_neg = 0.0;   // time-average of y-
  double mean_y = 0.0;
  double var_y = 0.0;      // time-weighted variance of y
  double mean_z = 0.0;
  double var_z = 0.0;
  double mean_gap = 0.0;   // time-average of D = z - ceil(T)
  double max_gap = 0.0;    // max D observed inside the window
  double events = 0.0;     // arrivals applied over [0, horizon]

  bool operator==(const RepStats&) const = default;
};

struct SimResult {
  std::vector<RepStats> reps;
  RepStats mean;  // across replications
  RepStats se;    // standard error: sample std / sqrt(n)
  LevelHistogram y_hist;  // pooled across replications
  LevelHistogram z_hist;
  double window = 0.0;  // horizon - warmup

  bool operator==(const SimResult&) const = default;
};

/// One replication of the event-calendar simulation. Deterministic given
/// (protocol.seed, rep_index).
RepStats run_replication(const SimConfig& config, int rep_index,
                         LevelHistogram* y_hist = nullptr,
                         LevelHistogram* z_hist = nullptr);

/// All replications (stream ids 0..n-1), aggregated in stream order
/// regardless of the execution schedule. Worker count is capped by the
/// LEADSIM_THREADS environment variable.
SimResult run_experiment(const SimConfig& config);

/// The artificial process: a one-dimensional birth-death chain where the
/// pipeline is pinned to ceil(T(y)). Exponential lead times only.
RepStats run_artificial_replication(const SimConfig& config, int rep_index,
                                    LevelHistogram* y_hist = nullptr,
                                    LevelHistogram* z_hist = nullptr);
SimResult simulate_artificial(const SimConfig& config);

/// Worker cap from LEADSIM_THREADS (defaults to hardware concurrency).
int worker_count();

}  // namespace leadsim
