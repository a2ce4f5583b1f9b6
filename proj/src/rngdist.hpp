#pragma once

#include <cstdint>
#include <string>

namespace leadsim {

/// Counter-based random stream (Philox2x64-10). The pair (seed, stream_id)
/// selects a dedicated counter space, so distinct stream ids give disjoint,
/// statistically independent sequences and identical pairs replay the exact
/// same variates on every run and platform.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : key0_(seed), key1_(stream_id), counter_(0), cached_(0), has_cached_(false) {}

  std::uint64_t seed() const noexcept { return key0_; }
  std::uint64_t stream_id() const noexcept { return key1_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform in [0, 1) with 53 random bits.
  double next_uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

private:
  std::uint64_t key0_;
  std::uint64_t key1_;
  std::uint64_t counter_;
  std::uint64_t cached_;
  bool has_cached_;
};

/// Standard normal CDF and density.
double norm_cdf(double x) noexcept;
double norm_pdf(double x) noexcept;

/// Inverse standard normal CDF, |error| <= 1e-9 on (0,1).
/// Rational approximation refined by one Newton step on the erfc-based CDF.
/// Throws std::domain_error for p outside (0,1).
double inv_norm_cdf(double p);

/// Replenishment lead-time law. Parameters are validated at construction;
/// sampling assumes a valid spec.
struct LeadTimeSpec {
  enum class Kind { Exponential, ShiftedExponential, Uniform, Pareto, Deterministic };

  Kind kind = Kind::Exponential;
  double p0 = 1.0;  // mean | shift | lo | shape q | value
  double p1 = 0.0;  // unused | exp mean | hi | scale tau | unused

  static LeadTimeSpec exponential(double mean);
  static LeadTimeSpec shifted_exponential(double shift, double exp_mean);
  static LeadTimeSpec uniform(double lo, double hi);
  static LeadTimeSpec pareto(double shape_q, double scale_tau);
  static LeadTimeSpec deterministic(double value);

  double mean() const noexcept;
  bool is_exponential() const noexcept { return kind == Kind::Exponential; }
  std::string describe() const;
};

/// One lead-time variate from the given law.
double sample_leadtime(const LeadTimeSpec& spec, RngStream& rng) noexcept;

/// Exponential interarrival with the given rate (mean 1/rate).
/// Throws std::invalid_argument for rate <= 0.
double exp_interarrival(double rate, RngStream& rng);

}  // namespace leadsim
