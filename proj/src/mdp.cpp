#include "mdp.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace leadsim {

void MdpSpec::validate() const {
  if (!(r > 0.0) || !(beta > 0.0)) throw std::invalid_argument("mdp: r and beta must be > 0");
  if (!(h > 0.0) || !(theta > 0.0)) throw std::invalid_argument("mdp: cost rates must be > 0");
  if (band_lo < 0 || band_lo > band_hi) {
    throw std::invalid_argument("mdp: need 0 <= band_lo <= band_hi");
  }
  if (y_floor >= 0) throw std::invalid_argument("mdp: y_floor must be negative");
}

MdpSpec MdpSpec::from_kappa(double r, double beta, double h, double theta, double kappa_M,
                            double kappa_m, double kappa_y) {
  const double lead_demand = r / beta;
  const double root = std::sqrt(lead_demand);
  MdpSpec spec;
  spec.r = r;
  spec.beta = beta;
  spec.h = h;
  spec.theta = theta;
  spec.band_hi = static_cast<long>(std::ceil(lead_demand + kappa_M * root));
  spec.band_lo = std::max(0L, static_cast<long>(std::floor(lead_demand - kappa_m * root)));
  spec.y_floor = -static_cast<long>(std::ceil(kappa_y * root));
  if (spec.y_floor >= 0) spec.y_floor = -1;
  spec.validate();
  return spec;
}

InventoryMdp::InventoryMdp(const MdpSpec& spec) : spec_(spec) {
  spec_.validate();
  const long rows = spec_.band_hi - spec_.y_floor + 1;
  row_offset_.resize(static_cast<std::size_t>(rows));
  int offset = 0;
  for (long i = 0; i < rows; ++i) {
    row_offset_[static_cast<std::size_t>(i)] = offset;
    const long y = spec_.y_floor + i;
    offset += static_cast<int>(spec_.band_hi - y + 1);  // z in [0, band_hi - y]
  }
  total_ = offset;
  const long w_max = spec_.band_hi - spec_.y_floor;
  beta_w_.resize(static_cast<std::size_t>(w_max + 1));
  for (long w = 0; w <= w_max; ++w) {
    beta_w_[static_cast<std::size_t>(w)] = spec_.beta * static_cast<double>(w);
  }
}

long InventoryMdp::num_state_actions() const noexcept {
  long count = 0;
  for (long y = spec_.y_floor; y <= spec_.band_hi; ++y) {
    for (long z = 0; z <= spec_.band_hi - y; ++z) {
      count += pipeline_hi(y) - pipeline_lo(y, z) + 1;
    }
  }
  return count;
}

int InventoryMdp::index_of(long y, long z) const {
  if (y < spec_.y_floor || y > spec_.band_hi || z < 0 || y + z > spec_.band_hi) {
    throw std::out_of_range("mdp state out of range");
  }
  return row_offset_[static_cast<std::size_t>(y - spec_.y_floor)] + static_cast<int>(z);
}

std::pair<long, long> InventoryMdp::state_of(int index) const {
  if (index < 0 || index >= total_) throw std::out_of_range("mdp state index out of range");
  long lo = 0;
  long hi = spec_.band_hi - spec_.y_floor;
  while (lo < hi) {
    const long mid = (lo + hi + 1) / 2;
    if (row_offset_[static_cast<std::size_t>(mid)] <= index) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  const long y = spec_.y_floor + lo;
  const long z = index - row_offset_[static_cast<std::size_t>(lo)];
  return {y, z};
}

double InventoryMdp::cost_rate(int index) const noexcept {
  const auto [y, z] = state_of(index);
  (void)z;
  return y >= 0 ? spec_.h * static_cast<double>(y) : spec_.theta * static_cast<double>(-y);
}

double InventoryMdp::uniformization_rate() const noexcept {
  const double w_top = static_cast<double>(spec_.band_hi - spec_.y_floor);
  return std::max(spec_.beta * w_top, spec_.r + spec_.beta * (w_top - 1.0));
}

std::string InventoryMdp::variable_name(int index) const {
  const auto [y, z] = state_of(index);
  return "v_" + std::to_string(y - spec_.y_floor) + "_" + std::to_string(z);
}

void InventoryMdp::backup(const std::vector<double>& v, std::vector<double>& out,
                          double lambda) const {
  const long yf = spec_.y_floor;
  const long band_hi = spec_.band_hi;
  std::vector<double> psi(static_cast<std::size_t>(band_hi - yf + 1));

  for (long y = yf; y <= band_hi; ++y) {
    const double ry = demand_rate_at(y);
    const double c =
        y >= 0 ? spec_.h * static_cast<double>(y) : spec_.theta * static_cast<double>(-y);
    const long w_hi = band_hi - y;
    const long w_row_lo = std::max(0L, spec_.band_lo - y);
    const double* vdown =
        y > yf ? v.data() + row_offset_[static_cast<std::size_t>(y - 1 - yf)] : nullptr;
    const double* vup =
        y < band_hi ? v.data() + row_offset_[static_cast<std::size_t>(y + 1 - yf)] : nullptr;
    for (long w = w_row_lo; w <= w_hi; ++w) {
      double val = 0.0;
      if (ry > 0.0) val += ry * vdown[w];
      if (w > 0) val += beta_w_[static_cast<std::size_t>(w)] * vup[w - 1];
      psi[static_cast<std::size_t>(w)] = val;
    }
    const double* vrow = v.data() + row_offset_[static_cast<std::size_t>(y - yf)];
    double* orow = out.data() + row_offset_[static_cast<std::size_t>(y - yf)];
    for (long z = 0; z <= w_hi; ++z) {
      const double vyz = vrow[z];
      double best = std::numeric_limits<double>::infinity();
      for (long w = std::max(z, w_row_lo); w <= w_hi; ++w) {
        const double q = psi[static_cast<std::size_t>(w)] -
                         beta_w_[static_cast<std::size_t>(w)] * vyz;
        if (q < best) best = q;
      }
      orow[z] = vyz + (c - ry * vyz + best) / lambda;
    }
  }
}

void InventoryMdp::greedy(const std::vector<double>& v, double lambda,
                          std::vector<long>& choice) const {
  (void)lambda;
  choice.assign(static_cast<std::size_t>(total_), 0);
  const long yf = spec_.y_floor;
  const long band_hi = spec_.band_hi;
  std::vector<double> psi(static_cast<std::size_t>(band_hi - yf + 1));
  for (long y = yf; y <= band_hi; ++y) {
    const double ry = demand_rate_at(y);
    const long w_hi = band_hi - y;
    const long w_row_lo = std::max(0L, spec_.band_lo - y);
    const double* vdown =
        y > yf ? v.data() + row_offset_[static_cast<std::size_t>(y - 1 - yf)] : nullptr;
    const double* vup =
        y < band_hi ? v.data() + row_offset_[static_cast<std::size_t>(y + 1 - yf)] : nullptr;
    for (long w = w_row_lo; w <= w_hi; ++w) {
      double val = 0.0;
      if (ry > 0.0) val += ry * vdown[w];
      if (w > 0) val += beta_w_[static_cast<std::size_t>(w)] * vup[w - 1];
      psi[static_cast<std::size_t>(w)] = val;
    }
    const double* vrow = v.data() + row_offset_[static_cast<std::size_t>(y - yf)];
    long* crow = choice.data() + row_offset_[static_cast<std::size_t>(y - yf)];
    for (long z = 0; z <= w_hi; ++z) {
      const double vyz = vrow[z];
      double best = std::numeric_limits<double>::infinity();
      long best_w = std::max(z, w_row_lo);
      for (long w = std::max(z, w_row_lo); w <= w_hi; ++w) {
        const double q = psi[static_cast<std::size_t>(w)] -
                         beta_w_[static_cast<std::size_t>(w)] * vyz;
        if (q < best) {
          best = q;
          best_w = w;
        }
      }
      crow[z] = best_w;
    }
  }
}

int GenericCtmdp::add_state(double cost_rate, std::string name) {
  cost_.push_back(cost_rate);
  names_.push_back(std::move(name));
  actions_.emplace_back();
  return static_cast<int>(cost_.size()) - 1;
}

void GenericCtmdp::add_action(int state, std::vector<std::pair<int, double>> transitions) {
  for (const auto& [next, rate] : transitions) {
    if (next < 0 || next >= num_states()) throw std::out_of_range("transition target out of range");
    if (!(rate > 0.0)) throw std::invalid_argument("transition rates must be > 0");
  }
  actions_.at(static_cast<std::size_t>(state)).push_back(std::move(transitions));
}

long GenericCtmdp::num_state_actions() const noexcept {
  long count = 0;
  for (const auto& acts : actions_) count += static_cast<long>(acts.size());
  return count;
}

double GenericCtmdp::uniformization_rate() const noexcept {
  double max_rate = 0.0;
  for (const auto& acts : actions_) {
    for (const auto& act : acts) {
      double total = 0.0;
      for (const auto& [next, rate] : act) total += rate;
      max_rate = std::max(max_rate, total);
    }
  }
  return max_rate > 0.0 ? max_rate : 1.0;
}

std::string GenericCtmdp::variable_name(int index) const {
  const std::string& name = names_.at(static_cast<std::size_t>(index));
  return name.empty() ? "v_" + std::to_string(index) : name;
}

void GenericCtmdp::backup(const std::vector<double>& v, std::vector<double>& out,
                          double lambda) const {
  for (int s = 0; s < num_states(); ++s) {
    const auto& acts = actions_[static_cast<std::size_t>(s)];
    if (acts.empty()) {
      out[static_cast<std::size_t>(s)] =
          v[static_cast<std::size_t>(s)] + cost_[static_cast<std::size_t>(s)] / lambda;
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& act : acts) {
      double q = cost_[static_cast<std::size_t>(s)];
      double total = 0.0;
      for (const auto& [next, rate] : act) {
        q += rate * v[static_cast<std::size_t>(next)];
        total += rate;
      }
      q += (lambda - total) * v[static_cast<std::size_t>(s)];
      best = std::min(best, q / lambda);
    }
    out[static_cast<std::size_t>(s)] = best;
  }
}

void GenericCtmdp::greedy(const std::vector<double>& v, double lambda,
                          std::vector<long>& choice) const {
  choice.assign(static_cast<std::size_t>(num_states()), 0);
  for (int s = 0; s < num_states(); ++s) {
    const auto& acts = actions_[static_cast<std::size_t>(s)];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < acts.size(); ++a) {
      double q = cost_[static_cast<std::size_t>(s)];
      double total = 0.0;
      for (const auto& [next, rate] : acts[a]) {
        q += rate * v[static_cast<std::size_t>(next)];
        total += rate;
      }
      q += (lambda - total) * v[static_cast<std::size_t>(s)];
      if (q / lambda < best) {
        best = q / lambda;
        choice[static_cast<std::size_t>(s)] = static_cast<long>(a);
      }
    }
  }
}

template <typename Model>
RviResult solve_rvi(const Model& model, const RviOptions& opts) {
  const int n = model.num_states();
  if (n <= 0) throw std::invalid_argument("solve_rvi: empty model");
  const double lambda = model.uniformization_rate();
  const int ref = model.normalization_state();
  const double span_target = 2.0 * opts.g_tol / lambda;

  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  if (opts.warm_start != nullptr && opts.warm_start->size() == v.size()) {
    v = *opts.warm_start;
  }
  std::vector<double> next(static_cast<std::size_t>(n), 0.0);

  RviResult result;
  double span = std::numeric_limits<double>::infinity();
  double g_mid = 0.0;
  long iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    model.backup(v, next, lambda);
    double diff_lo = std::numeric_limits<double>::infinity();
    double diff_hi = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
      const double d = next[static_cast<std::size_t>(s)] - v[static_cast<std::size_t>(s)];
      diff_lo = std::min(diff_lo, d);
      diff_hi = std::max(diff_hi, d);
    }
    span = diff_hi - diff_lo;
    g_mid = 0.5 * (diff_hi + diff_lo);
    const double shift = next[static_cast<std::size_t>(ref)];
    for (int s = 0; s < n; ++s) {
      v[static_cast<std::size_t>(s)] = next[static_cast<std::size_t>(s)] - shift;
    }
    if (span <= span_target) break;
  }
  if (span > span_target) {
    std::ostringstream msg;
    msg << "relative value iteration did not converge in " << opts.max_iter
        << " sweeps; Lambda-scaled span " << lambda * span;
    throw std::runtime_error(msg.str());
  }

  result.g = lambda * g_mid;
  result.iterations = iter + 1;
  result.span = lambda * span;
  result.bias = std::move(v);
  const double ref_bias = result.bias[static_cast<std::size_t>(ref)];
  for (double& b : result.bias) b -= ref_bias;
  result.bias[static_cast<std::size_t>(ref)] = 0.0;
  model.greedy(result.bias, lambda, result.choice);
  return result;
}

template RviResult solve_rvi<InventoryMdp>(const InventoryMdp&, const RviOptions&);
template RviResult solve_rvi<GenericCtmdp>(const GenericCtmdp&, const RviOptions&);

long TargetTable::level_at(long y) const {
  if (y < y_min || y > y_max()) throw std::out_of_range("target table: y out of range");
  return level[static_cast<std::size_t>(y - y_min)];
}

TargetTable extract_target(const InventoryMdp& model, const RviResult& solution) {
  const MdpSpec& spec = model.spec();
  TargetTable table;
  table.y_min = spec.y_floor;
  table.level.reserve(static_cast<std::size_t>(spec.band_hi - spec.y_floor + 1));
  for (long y = spec.y_floor; y <= spec.band_hi; ++y) {
    table.level.push_back(solution.choice[static_cast<std::size_t>(model.index_of(y, 0))]);
  }
  for (long y = spec.y_floor; y <= spec.band_hi; ++y) {
    const long lvl = table.level_at(y);
    for (long z = 0; z <= spec.band_hi - y; ++z) {
      const long expected = std::max(lvl, model.pipeline_lo(y, z));
      if (solution.choice[static_cast<std::size_t>(model.index_of(y, z))] != expected) {
        ++table.violations;
      }
    }
  }
  return table;
}

namespace {

void write_coefficient(std::ostream& os, double coef, const std::string& name, bool first) {
  if (coef >= 0.0 && !first) os << " + ";
  if (coef < 0.0) os << (first ? "-" : " - ");
  std::ostringstream num;
  num.precision(17);
  num << std::fabs(coef);
  os << num.str() << " " << name;
}

}  // namespace

template <typename Model>
void export_lp(const Model& model, std::ostream& os) {
  const int n = model.num_states();
  const long constraints = model.num_state_actions() + 1;
  os << "\\ average-cost LP: maximize g subject to the Bellman inequalities\n";
  os << "\\ variables " << n + 1 << " constraints " << constraints << "\n";
  os << "Maximize\n obj: g\nSubject To\n";
  os.precision(17);
  long row = 0;
  for (int s = 0; s < n; ++s) {
    model.for_each_action(s, [&](double total_rate,
                                 const std::vector<std::pair<int, double>>& transitions) {
      // total_rate * v_s - sum rate * v_next + g <= c(s)
      std::map<int, double> coef;
      coef[s] += total_rate;
      for (const auto& [next, rate] : transitions) coef[next] -= rate;
      os << " c" << row++ << ":";
      bool first = true;
      for (const auto& [state, value] : coef) {
        if (value == 0.0) continue;
        os << (first ? " " : "");
        write_coefficient(os, value, model.variable_name(state), first);
        first = false;
      }
      if (first) os << " 0 " << model.variable_name(s);
      os << " + 1 g <= " << model.cost_rate(s) << "\n";
    });
  }
  os << " norm: " << model.variable_name(model.normalization_state()) << " = 0\n";
  os << "Bounds\n g free\n";
  for (int s = 0; s < n; ++s) os << " " << model.variable_name(s) << " free\n";
  os << "End\n";
}

template void export_lp<InventoryMdp>(const InventoryMdp&, std::ostream&);
template void export_lp<GenericCtmdp>(const GenericCtmdp&, std::ostream&);

template <typename Model>
void export_lp_file(const Model& model, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open LP output file: " + path);
  export_lp(model, os);
  if (!os.good()) throw std::runtime_error("failed writing LP output file: " + path);
}

template void export_lp_file<InventoryMdp>(const InventoryMdp&, const std::string&);
template void export_lp_file<GenericCtmdp>(const GenericCtmdp&, const std::string&);

MdpSolution solve_inventory_mdp(double r, double beta, double h, double theta,
                                const MdpSolveOptions& opts) {
  MdpSolution current;
  std::vector<double> warm;
  MdpSpec prev_spec;
  bool have_prev = false;
  double prev_g = 0.0;

  for (double kappa = opts.kappa0; kappa <= opts.kappa_max + 1e-9; kappa *= 2.0) {
    const MdpSpec spec = MdpSpec::from_kappa(r, beta, h, theta, kappa, kappa, kappa);
    InventoryMdp model(spec);
    RviOptions rvi_opts;
    rvi_opts.g_tol = opts.g_tol;
    rvi_opts.max_iter = opts.max_iter;

    std::vector<double> start;
    if (have_prev) {
      // Seed from the previous truncation: clamp each state into the old
      // band and reuse its bias.
      InventoryMdp prev_model(prev_spec);
      start.resize(static_cast<std::size_t>(model.num_states()));
      for (int s = 0; s < model.num_states(); ++s) {
        auto [y, z] = model.state_of(s);
        const long yc = std::clamp(y, prev_spec.y_floor, prev_spec.band_hi);
        const long zc = std::clamp(z, 0L, prev_spec.band_hi - yc);
        start[static_cast<std::size_t>(s)] =
            warm[static_cast<std::size_t>(prev_model.index_of(yc, zc))];
      }
      rvi_opts.warm_start = &start;
    }

    RviResult rvi = solve_rvi(model, rvi_opts);
    current.spec = spec;
    current.kappa = kappa;
    current.states = model.num_states();
    current.state_actions = model.num_state_actions();
    current.target = extract_target(model, rvi);
    const double g = rvi.g;
    warm = rvi.bias;
    current.rvi = std::move(rvi);

    if (have_prev && std::fabs(g - prev_g) <= opts.stabilization) {
      return current;
    }
    prev_g = g;
    prev_spec = spec;
    have_prev = true;
  }
  throw std::runtime_error("mdp truncation did not stabilize below kappa_max");
}

}  // namespace leadsim
