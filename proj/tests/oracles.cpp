#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oracles {

long double phi_series(long double x) {
  // erf by Taylor series, Phi(x) = (1 + erf(x/sqrt(2))) / 2.
  const long double t = x / std::sqrt(2.0L);
  long double term = t;
  long double sum = t;
  for (int n = 1; n < 400; ++n) {
    term *= -t * t / n;
    const long double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-30L * std::fabs(sum) + 1e-40L) break;
  }
  const long double erf = 2.0L / std::sqrt(M_PIl) * sum;
  return 0.5L * (1.0L + erf);
}

double inv_phi_bisect(double p) {
  long double lo = -10.0L;
  long double hi = 10.0L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (phi_series(mid) < static_cast<long double>(p)) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-14L) break;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

double ks_statistic(std::vector<double>& samples, double (*cdf)(double, double, double),
                    double p0, double p1) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i], p0, p1);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double cdf_exponential(double x, double mean, double) {
  return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x / mean);
}

double cdf_shifted_exponential(double x, double shift, double exp_mean) {
  return x <= shift ? 0.0 : 1.0 - std::exp(-(x - shift) / exp_mean);
}

double cdf_uniform(double x, double lo, double hi) {
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  return (x - lo) / (hi - lo);
}

double cdf_pareto(double x, double q, double tau) {
  return x <= 0.0 ? 0.0 : 1.0 - std::pow(1.0 + tau * x, -q);
}

double poisson_pmf(double lambda, long k) {
  if (k < 0) return 0.0;
  double log_p = -lambda + k * std::log(lambda);
  for (long i = 2; i <= k; ++i) log_p -= std::log(static_cast<double>(i));
  return std::exp(log_p);
}

double poisson_newsvendor_objective(double lambda, double h, double theta, long x) {
  const long k_max = static_cast<long>(lambda + 40.0 * std::sqrt(lambda) + 50.0);
  double over = 0.0;
  double under = 0.0;
  for (long k = 0; k <= k_max; ++k) {
    const double p = poisson_pmf(lambda, k);
    if (k > x) over += (k - x) * p;
    if (k < x) under += (x - k) * p;
  }
  return theta * over + h * under;
}

double normal_newsvendor_objective(double sigma, double h, double theta, double x) {
  const double u = x / sigma;
  const double phi = std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI);
  const double Phi = 0.5 * (1.0 + std::erf(u / std::sqrt(2.0)));
  const double e_under = x * Phi + sigma * phi;           // E[(x-N)+]
  const double e_over = sigma * phi - x * (1.0 - Phi);    // E[(N-x)+]
  return theta * e_over + h * e_under;
}

double pout_rk4(double y0, double u0, double beta, double delta, double t, double dt) {
  auto dy = [beta](double, double u) { return beta * u; };
  auto du = [beta, delta](double y, double u) { return -delta * (y + u) - beta * u; };
  double y = y0;
  double u = u0;
  double s = 0.0;
  while (s < t - 1e-15) {
    const double h = std::min(dt, t - s);
    const double k1y = dy(y, u), k1u = du(y, u);
    const double k2y = dy(y + 0.5 * h * k1y, u + 0.5 * h * k1u);
    const double k2u = du(y + 0.5 * h * k1y, u + 0.5 * h * k1u);
    const double k3y = dy(y + 0.5 * h * k2y, u + 0.5 * h * k2u);
    const double k3u = du(y + 0.5 * h * k2y, u + 0.5 * h * k2u);
    const double k4y = dy(y + h * k3y, u + h * k3u);
    const double k4u = du(y + h * k3y, u + h * k3u);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    s += h;
  }
  return y;
}

std::vector<double> ctmc_stationary(const std::vector<std::vector<double>>& rates) {
  const std::size_t n = rates.size();
  // pi Q = 0 with sum(pi) = 1; build A^T pi = b replacing the last balance
  // equation by the normalization.
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) {
        double out = 0.0;
        for (std::size_t k = 0; k < n; ++k) out += rates[i][k];
        a[j][i] = -out;
      } else {
        a[j][i] = rates[i][j];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) a[n - 1][i] = 1.0;
  a[n - 1][n] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
    }
    if (std::fabs(a[pivot][col]) < 1e-12) {
      throw std::runtime_error("ctmc_stationary: singular balance system");
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col) continue;
      const double factor = a[row][col] / a[col][col];
      for (std::size_t k = col; k <= n; ++k) a[row][k] -= factor * a[col][k];
    }
  }
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = a[i][n] / a[i][i];
  return pi;
}

namespace {

// Strongly connected components by Kosaraju's algorithm.
std::vector<int> scc_components(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<std::vector<int>> radj(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    for (const int v : adj[static_cast<std::size_t>(u)]) {
      radj[static_cast<std::size_t>(v)].push_back(u);
    }
  }
  std::vector<int> order;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  auto dfs1 = [&](auto&& self, int u) -> void {
    seen[static_cast<std::size_t>(u)] = true;
    for (const int v : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) self(self, v);
    }
    order.push_back(u);
  };
  for (int u = 0; u < n; ++u) {
    if (!seen[static_cast<std::size_t>(u)]) dfs1(dfs1, u);
  }
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int label = 0;
  auto dfs2 = [&](auto&& self, int u, int c) -> void {
    comp[static_cast<std::size_t>(u)] = c;
    for (const int v : radj[static_cast<std::size_t>(u)]) {
      if (comp[static_cast<std::size_t>(v)] < 0) self(self, v, c);
    }
  };
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[static_cast<std::size_t>(*it)] < 0) dfs2(dfs2, *it, label++);
  }
  return comp;
}

}  // namespace

double enumerate_min_average_cost(
    const std::vector<double>& cost,
    const std::vector<std::vector<std::vector<std::pair<int, double>>>>& actions) {
  const std::size_t n = cost.size();
  std::vector<std::size_t> pick(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<std::vector<double>> rates(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<int>> adj(n);
    for (std::size_t s = 0; s < n; ++s) {
      for (const auto& [next, rate] : actions[s][pick[s]]) {
        rates[s][static_cast<std::size_t>(next)] += rate;
        adj[s].push_back(next);
      }
    }
    // A fixed policy may split the chain into several closed classes; each
    // class is an achievable stationary regime, so evaluate each separately.
    const std::vector<int> comp = scc_components(adj);
    int labels = 0;
    for (const int c : comp) labels = std::max(labels, c + 1);
    for (int c = 0; c < labels; ++c) {
      std::vector<int> members;
      for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] == c) members.push_back(static_cast<int>(s));
      }
      bool closed = true;
      for (const int s : members) {
        for (const int v : adj[static_cast<std::size_t>(s)]) {
          closed = closed && comp[static_cast<std::size_t>(v)] == c;
        }
      }
      if (!closed) continue;
      const std::size_t m = members.size();
      std::vector<std::vector<double>> sub(m, std::vector<double>(m, 0.0));
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          sub[i][j] = rates[static_cast<std::size_t>(members[i])]
                           [static_cast<std::size_t>(members[j])];
        }
      }
      const std::vector<double> pi = ctmc_stationary(sub);
      double g = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        g += pi[i] * cost[static_cast<std::size_t>(members[i])];
      }
      best = std::min(best, g);
    }

    std::size_t s = 0;
    while (s < n && ++pick[s] == actions[s].size()) {
      pick[s] = 0;
      ++s;
    }
    if (s == n) break;
  }
  return best;
}

ParsedLp parse_lp(const std::string& text) {
  ParsedLp lp;
  std::istringstream in(text);
  std::string line;
  enum class Section { None, Objective, Constraints, Bounds } section = Section::None;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '\\') {
      std::istringstream ls(line);
      std::string word;
      while (ls >> word) {
        if (word == "variables") ls >> lp.declared_variables;
        if (word == "constraints") ls >> lp.declared_constraints;
      }
      continue;
    }
    if (line == "Maximize") { section = Section::Objective; continue; }
    if (line == "Subject To") { section = Section::Constraints; continue; }
    if (line == "Bounds") { section = Section::Bounds; continue; }
    if (line == "End") break;

    std::istringstream ls(line);
    if (section == Section::Objective) {
      std::string label;
      ls >> label >> lp.objective_var;
      continue;
    }
    if (section == Section::Bounds) {
      std::string name, kind;
      ls >> name >> kind;
      if (kind == "free") lp.free_vars.push_back(name);
      continue;
    }
    if (section == Section::Constraints) {
      ParsedLp::Constraint c;
      std::string token;
      ls >> token;  // label "cN:" or "norm:"
      double sign = 1.0;
      double pending = 1.0;
      bool have_coef = false;
      while (ls >> token) {
        if (token == "+") { sign = 1.0; continue; }
        if (token == "-") { sign = -1.0; continue; }
        if (token == "<=" || token == "=") {
          c.equality = token == "=";
          ls >> c.rhs;
          break;
        }
        char* end = nullptr;
        const double value = std::strtod(token.c_str(), &end);
        if (end != nullptr && *end == '\0') {
          pending = value;
          have_coef = true;
        } else {
          c.terms.emplace_back(token, sign * (have_coef ? pending : 1.0));
          sign = 1.0;
          pending = 1.0;
          have_coef = false;
        }
      }
      lp.constraints.push_back(std::move(c));
    }
  }
  return lp;
}

}  // namespace oracles
