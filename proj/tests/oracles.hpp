// Test-only oracles, independent of the library implementation paths they
// check.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oracles {

/// Standard normal CDF from a long-double error-function Taylor series.
/// Good to ~1e-15 absolute for |x| <= 5.
long double phi_series(long double x);

/// Inverse of phi_series by bisection to 1e-13.
double inv_phi_bisect(double p);

/// Empirical one-sample Kolmogorov-Smirnov statistic. `samples` is consumed
/// (sorted); cdf(x) must be the analytic CDF.
double ks_statistic(std::vector<double>& samples, double (*cdf)(double, double, double),
                    double p0, double p1);

/// Analytic lead-time CDFs, parameterized as (x, p0, p1).
double cdf_exponential(double x, double mean, double unused);
double cdf_shifted_exponential(double x, double shift, double exp_mean);
double cdf_uniform(double x, double lo, double hi);
double cdf_pareto(double x, double q, double tau);

/// Poisson pmf by direct recursion and the discrete newsvendor objective
/// theta E[(P-x)+] + h E[(x-P)+] by direct summation.
double poisson_pmf(double lambda, long k);
double poisson_newsvendor_objective(double lambda, double h, double theta, long x);

/// Continuous newsvendor objective theta E[(N-x)+] + h E[(x-N)+] for
/// N ~ Normal(0, sigma^2), via std::erf-based partial expectations.
double normal_newsvendor_objective(double sigma, double h, double theta, double x);

/// Fourth-order Runge-Kutta integration of the proportional-order-up-to
/// fluid ODE: Y' = beta U, (Y+U)' = -delta (Y+U). Returns Y(t).
double pout_rk4(double y0, double u0, double beta, double delta, double t, double dt);

/// Exact stationary distribution of a small CTMC given its rate matrix
/// (rates[i][j] = rate i->j, zero diagonal). Throws if the balance system is
/// singular beyond one degree of freedom.
std::vector<double> ctmc_stationary(const std::vector<std::vector<double>>& rates);

/// Minimum average cost over all stationary deterministic policies of a
/// small CT-MDP by exhaustive enumeration + exact stationary solves.
/// actions[s][a] lists (next_state, rate) pairs.
double enumerate_min_average_cost(
    const std::vector<double>& cost,
    const std::vector<std::vector<std::vector<std::pair<int, double>>>>& actions);

/// Parsed LP in the exported text format.
struct ParsedLp {
  struct Constraint {
    std::vector<std::pair<std::string, double>> terms;  // variable, coefficient
    bool equality = false;
    double rhs = 0.0;
  };
  std::string objective_var;
  std::vector<Constraint> constraints;
  std::vector<std::string> free_vars;
  long declared_variables = 0;
  long declared_constraints = 0;
};

ParsedLp parse_lp(const std::string& text);

}  // namespace oracles
