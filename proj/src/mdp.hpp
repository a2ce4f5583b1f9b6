#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"

namespace leadsim {

/// Truncation of the continuous-time inventory MDP: the order decision keeps
/// the inventory position y+z+a inside [band_lo, band_hi] and demand stops at
/// the backlog floor y_floor.
struct MdpSpec {
  double r = 1.0;
  double beta = 1.0;
  double h = 1.0;
  double theta = 1.0;
  long band_lo = 0;   // I_m
  long band_hi = 1;   // I_M
  long y_floor = -1;  // demand-stopping level, < 0

  void validate() const;

  /// I_M = r/b + kM sqrt(r/b), I_m = (r/b - km sqrt(r/b))+, floor = -ky sqrt(r/b).
  static MdpSpec from_kappa(double r, double beta, double h, double theta, double kappa_M,
                            double kappa_m, double kappa_y);
};

/// Enumerated truncated MDP with implicit transitions. States are (y, z) with
/// y_floor <= y <= band_hi, 0 <= z, y + z <= band_hi; actions are pipeline
/// choices w = z + a with max(z, band_lo - y) <= w <= band_hi - y. From
/// (y, z) under w, demand moves to (y-1, w) at rate r (0 at the floor) and an
/// item arrival moves to (y+1, w-1) at rate beta*w.
class InventoryMdp {
public:
  explicit InventoryMdp(const MdpSpec& spec);

  const MdpSpec& spec() const noexcept { return spec_; }
  int num_states() const noexcept { return total_; }
  long num_state_actions() const noexcept;

  int index_of(long y, long z) const;
  std::pair<long, long> state_of(int index) const;

  double cost_rate(int index) const noexcept;
  double demand_rate_at(long y) const noexcept {
    return y == spec_.y_floor ? 0.0 : spec_.r;
  }
  long pipeline_lo(long y, long z) const noexcept {
    return std::max(z, spec_.band_lo - y);
  }
  long pipeline_hi(long y) const noexcept { return spec_.band_hi - y; }

  double uniformization_rate() const noexcept;
  int normalization_state() const { return index_of(spec_.band_lo, 0); }
  std::string variable_name(int index) const;

  /// One Jacobi sweep of the uniformized Bellman operator with per-stage
  /// cost c(y)/lambda: out[s] = min_w Q(s, w; v).
  void backup(const std::vector<double>& v, std::vector<double>& out, double lambda) const;

  /// Minimizing pipeline choice per state (ties to the smallest w).
  void greedy(const std::vector<double>& v, double lambda, std::vector<long>& choice) const;

  /// Enumerates each action of a state as (total_rate, transitions).
  template <typename Fn>
  void for_each_action(int index, Fn&& fn) const {
    const auto [y, z] = state_of(index);
    const double ry = demand_rate_at(y);
    const long w_hi = pipeline_hi(y);
    for (long w = pipeline_lo(y, z); w <= w_hi; ++w) {
      std::vector<std::pair<int, double>> transitions;
      if (ry > 0.0) transitions.emplace_back(index_of(y - 1, w), ry);
      if (w > 0) transitions.emplace_back(index_of(y + 1, w - 1), spec_.beta * static_cast<double>(w));
      fn(ry + spec_.beta * static_cast<double>(w), transitions);
    }
  }

private:
  MdpSpec spec_;
  std::vector<int> row_offset_;  // indexed by y - y_floor
  std::vector<double> beta_w_;   // beta * w lookup
  int total_ = 0;
};

/// Hand-buildable continuous-time MDP with explicit transition lists; used
/// for small oracle models and cross-checks.
class GenericCtmdp {
public:
  int add_state(double cost_rate, std::string name = "");
  void add_action(int state, std::vector<std::pair<int, double>> transitions);

  int num_states() const noexcept { return static_cast<int>(cost_.size()); }
  long num_state_actions() const noexcept;
  double cost_rate(int index) const { return cost_.at(static_cast<std::size_t>(index)); }
  double uniformization_rate() const noexcept;
  int normalization_state() const noexcept { return 0; }
  std::string variable_name(int index) const;

  void backup(const std::vector<double>& v, std::vector<double>& out, double lambda) const;
  void greedy(const std::vector<double>& v, double lambda, std::vector<long>& choice) const;

  template <typename Fn>
  void for_each_action(int index, Fn&& fn) const {
    for (const auto& act : actions_.at(static_cast<std::size_t>(index))) {
      double total = 0.0;
      for (const auto& [next, rate] : act) total += rate;
      fn(total, act);
    }
  }

private:
  std::vector<double> cost_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::vector<std::pair<int, double>>>> actions_;
};

struct RviOptions {
  double g_tol = 1e-6;       // absolute accuracy certified for g
  long max_iter = 2000000;
  const std::vector<double>* warm_start = nullptr;
};

struct RviResult {
  double g = 0.0;
  std::vector<double> bias;   // normalized to 0 at the model's normalization state
  std::vector<long> choice;   // greedy action per state (pipeline w for InventoryMdp)
  long iterations = 0;
  double span = 0.0;          // Lambda-scaled span at termination
};

/// Relative value iteration on the uniformized chain until the span of
/// successive value differences certifies g within g_tol. Throws
/// std::runtime_error with the final span on non-convergence.
template <typename Model>
RviResult solve_rvi(const Model& model, const RviOptions& opts = {});

/// In-transit target extracted from a solved model: level(y) = w*(y, 0),
/// with states violating the order-up-to pattern counted, not faulted.
struct TargetTable {
  long y_min = 0;
  std::vector<long> level;
  long violations = 0;

  long y_max() const noexcept { return y_min + static_cast<long>(level.size()) - 1; }
  long level_at(long y) const;
};

TargetTable extract_target(const InventoryMdp& model, const RviResult& solution);

/// Writes the average-cost LP (max g subject to the Bellman inequalities and
/// the bias normalization) in CPLEX LP text format.
template <typename Model>
void export_lp(const Model& model, std::ostream& os);

template <typename Model>
void export_lp_file(const Model& model, const std::string& path);

struct MdpSolveOptions {
  double kappa0 = 5.0;
  double kappa_max = 40.0;
  double stabilization = 0.005;  // stop doubling once |delta g| is below this
  double g_tol = 1e-6;
  long max_iter = 2000000;
};

struct MdpSolution {
  MdpSpec spec;
  double kappa = 0.0;
  RviResult rvi;
  TargetTable target;
  long states = 0;
  long state_actions = 0;

  double g() const noexcept { return rvi.g; }
};

/// Builds and solves the truncated MDP with kappa = (k, k, k), doubling k
/// until g stabilizes; each solve warm-starts from the previous bias.
MdpSolution solve_inventory_mdp(double r, double beta, double h, double theta,
                                const MdpSolveOptions& opts = {});

}  // namespace leadsim
