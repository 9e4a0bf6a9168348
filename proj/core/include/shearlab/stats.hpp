#pragma once

#include <cstdint>
#include <span>

namespace shearlab {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  [[nodiscard]] double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Compensated sum in index order.
[[nodiscard]] double compensated_sum(std::span<const double> xs);
[[nodiscard]] double mean(std::span<const double> xs);

struct BootstrapSummary {
  double mean = 0.0;
  double std_error = 0.0;  ///< standard deviation of the resampled means
  double ci_lo = 0.0;      ///< percentile interval at the requested level
  double ci_hi = 0.0;
};

/// Nonparametric bootstrap of the sample mean with a seeded resampler.
/// The result depends only on (xs, resamples, seed, level).
[[nodiscard]] BootstrapSummary bootstrap_mean(std::span<const double> xs, int resamples,
                                              std::uint64_t seed, double level = 0.95);

/// Fraction of sum(xs) carried by the largest ceil(fraction * n) entries.
[[nodiscard]] double tail_mass_fraction(std::span<const double> xs, double fraction = 0.01);

}  // namespace shearlab
