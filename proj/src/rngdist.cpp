#include "rngdist.hpp"

#include <cmath>
#include <stdexcept>

namespace leadsim {

namespace {

constexpr std::uint64_t kPhiloxM = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;

inline void philox_round(std::uint64_t& x0, std::uint64_t& x1, std::uint64_t k) noexcept {
  const unsigned __int128 prod = static_cast<unsigned __int128>(kPhiloxM) * x0;
  const std::uint64_t lo = static_cast<std::uint64_t>(prod);
  const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
  x0 = hi ^ k ^ x1;
  x1 = lo;
}

}  // namespace

std::uint64_t RngStream::next_u64() noexcept {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  std::uint64_t x0 = counter_++;
  std::uint64_t x1 = key1_;
  std::uint64_t k = key0_;
  for (int round = 0; round < 10; ++round) {
    philox_round(x0, x1, k);
    k += kWeyl;
  }
  cached_ = x1;
  has_cached_ = true;
  return x0;
}

double norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double inv_norm_cdf(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("inv_norm_cdf: p must lie in (0,1)");
  }

  // Acklam's rational approximation, relative error ~1.15e-9.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double t = q * q;
    x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * q /
        (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Newton step against the erfc-based CDF.
  const double err = norm_cdf(x) - p;
  const double dens = norm_pdf(x);
  if (dens > 0.0) x -= err / dens;
  return x;
}

LeadTimeSpec LeadTimeSpec::exponential(double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("exponential lead time: mean must be > 0");
  return {Kind::Exponential, mean, 0.0};
}

LeadTimeSpec LeadTimeSpec::shifted_exponential(double shift, double exp_mean) {
  if (!(shift > 0.0)) throw std::invalid_argument("shifted exponential: shift must be > 0");
  if (!(exp_mean > 0.0)) throw std::invalid_argument("shifted exponential: mean must be > 0");
  return {Kind::ShiftedExponential, shift, exp_mean};
}

LeadTimeSpec LeadTimeSpec::uniform(double lo, double hi) {
  if (!(lo >= 0.0)) throw std::invalid_argument("uniform lead time: lo must be >= 0");
  if (!(hi > lo)) throw std::invalid_argument("uniform lead time: hi must exceed lo");
  return {Kind::Uniform, lo, hi};
}

LeadTimeSpec LeadTimeSpec::pareto(double shape_q, double scale_tau) {
  if (!(shape_q > 1.0)) throw std::invalid_argument("pareto lead time: q must be > 1 for a finite mean");
  if (!(scale_tau > 0.0)) throw std::invalid_argument("pareto lead time: tau must be > 0");
  return {Kind::Pareto, shape_q, scale_tau};
}

LeadTimeSpec LeadTimeSpec::deterministic(double value) {
  if (!(value > 0.0)) throw std::invalid_argument("deterministic lead time: value must be > 0");
  return {Kind::Deterministic, value, 0.0};
}

double LeadTimeSpec::mean() const noexcept {
  switch (kind) {
    case Kind::Exponential: return p0;
    case Kind::ShiftedExponential: return p0 + p1;
    case Kind::Uniform: return 0.5 * (p0 + p1);
    case Kind::Pareto: return 1.0 / (p1 * (p0 - 1.0));
    case Kind::Deterministic: return p0;
  }
  return 0.0;
}

std::string LeadTimeSpec::describe() const {
  switch (kind) {
    case Kind::Exponential: return "exponential(mean=" + std::to_string(p0) + ")";
    case Kind::ShiftedExponential:
      return "shifted_exponential(shift=" + std::to_string(p0) + ",mean=" + std::to_string(p1) + ")";
    case Kind::Uniform: return "uniform(" + std::to_string(p0) + "," + std::to_string(p1) + ")";
    case Kind::Pareto: return "pareto(q=" + std::to_string(p0) + ",tau=" + std::to_string(p1) + ")";
    case Kind::Deterministic: return "deterministic(" + std::to_string(p0) + ")";
  }
  return "?";
}

double sample_leadtime(const LeadTimeSpec& spec, RngStream& rng) noexcept {
  switch (spec.kind) {
    case LeadTimeSpec::Kind::Exponential:
      return -spec.p0 * std::log1p(-rng.next_uniform());
    case LeadTimeSpec::Kind::ShiftedExponential:
      return spec.p0 - spec.p1 * std::log1p(-rng.next_uniform());
    case LeadTimeSpec::Kind::Uniform:
      return spec.p0 + (spec.p1 - spec.p0) * rng.next_uniform();
    case LeadTimeSpec::Kind::Pareto: {
      // Inversion of the tail 1/(1+tau x)^q.
      const double u = rng.next_uniform();
      return (std::pow(1.0 - u, -1.0 / spec.p0) - 1.0) / spec.p1;
    }
    case LeadTimeSpec::Kind::Deterministic:
      return spec.p0;
  }
  return 0.0;
}

double exp_interarrival(double rate, RngStream& rng) {
  if (!(rate > 0.0)) throw std::invalid_argument("exp_interarrival: rate must be > 0");
  return -std::log1p(-rng.next_uniform()) / rate;
}

}  // namespace leadsim
