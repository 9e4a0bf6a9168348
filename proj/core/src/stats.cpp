#include "shearlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "shearlab/error.hpp"

namespace shearlab {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw InvalidArgument("mean of an empty sample");
  return compensated_sum(xs) / static_cast<double>(xs.size());
}

BootstrapSummary bootstrap_mean(std::span<const double> xs, int resamples, std::uint64_t seed,
                                double level) {
  if (xs.empty()) throw InvalidArgument("bootstrap of an empty sample");
  if (resamples < 2) throw InvalidArgument("bootstrap needs at least two resamples");
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");

  BootstrapSummary out;
  out.mean = mean(xs);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0xb0075u};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  std::vector<double> means(resamples);
  for (int b = 0; b < resamples; ++b) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < xs.size(); ++i) acc.add(xs[pick(rng)]);
    means[b] = acc.value() / static_cast<double>(xs.size());
  }
  const double centre = mean(means);
  CompensatedSum ss;
  for (double m : means) ss.add((m - centre) * (m - centre));
  out.std_error = std::sqrt(ss.value() / (resamples - 1));

  std::sort(means.begin(), means.end());
  const double alpha = 0.5 * (1.0 - level);
  auto quantile = [&](double q) {
    const double pos = q * (resamples - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= means.size()) return means.back();
    return means[i] + frac * (means[i + 1] - means[i]);
  };
  out.ci_lo = quantile(alpha);
  out.ci_hi = quantile(1.0 - alpha);
  return out;
}

double tail_mass_fraction(std::span<const double> xs, double fraction) {
  if (xs.empty()) return 0.0;
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto top = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(sorted.size())));
  const double total = compensated_sum(sorted);
  if (total == 0.0) return 0.0;
  return compensated_sum(std::span<const double>(sorted).first(top)) / total;
}

}  // namespace shearlab
