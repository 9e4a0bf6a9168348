#include "shearlab/stochastic.hpp"

#include <cmath>
#include <random>

#include "shearlab/error.hpp"
#include "shearlab/parallel.hpp"
#include "shearlab/stats.hpp"

namespace shearlab {
namespace {

constexpr std::uint64_t kBootstrapTag = 0x9e3779b97f4a7c15ULL;

void check_monte_carlo(int n_samples, double t, double nu, const MonteCarloOptions& options) {
  if (n_samples < kMinMonteCarloSamples) {
    throw InvalidArgument("Monte Carlo estimates need at least 100 samples");
  }
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("time must be finite and >= 0");
  if (!(nu > 0.0)) throw InvalidArgument("diffusivity must be positive");
  if (options.n_steps < 1) throw InvalidArgument("n_steps must be >= 1");
}

}  // namespace

BrownianPath sample_path(std::uint64_t seed, std::uint64_t sample_index, double dt, int n_steps) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("path step dt must be positive");
  if (n_steps < 1) throw InvalidArgument("path needs at least one step");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(sample_index),
                    static_cast<std::uint32_t>(sample_index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));

  BrownianPath path;
  path.dt = dt;
  path.n_steps = n_steps;
  path.seed = seed;
  path.sample_index = sample_index;
  path.values.resize(static_cast<std::size_t>(n_steps) + 1);
  path.values[0] = 0.0;
  for (int j = 1; j <= n_steps; ++j) path.values[j] = path.values[j - 1] + normal(rng);
  return path;
}

BrownianPath zero_noise_path(double dt, int n_steps) {
  if (!(dt > 0.0)) throw InvalidArgument("path step dt must be positive");
  if (n_steps < 1) throw InvalidArgument("path needs at least one step");
  BrownianPath path;
  path.dt = dt;
  path.n_steps = n_steps;
  path.values.assign(static_cast<std::size_t>(n_steps) + 1, 0.0);
  path.zero_noise = true;
  return path;
}

BrownianPath coarsen(const BrownianPath& path, int factor) {
  if (factor < 1 || path.n_steps % factor != 0) {
    throw InvalidArgument("coarsening factor must divide the number of steps");
  }
  BrownianPath out = path;
  out.dt = path.dt * factor;
  out.n_steps = path.n_steps / factor;
  out.values.resize(static_cast<std::size_t>(out.n_steps) + 1);
  for (int j = 0; j <= out.n_steps; ++j) out.values[j] = path.values[static_cast<std::size_t>(j) * factor];
  return out;
}

int steps_for(const BrownianPath& path, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("time must be >= 0");
  const double ratio = t / path.dt;
  const double m = std::round(ratio);
  if (std::abs(ratio - m) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidArgument("time is not on the path grid");
  }
  if (m > path.n_steps) throw InvalidArgument("path horizon is shorter than the requested time");
  return static_cast<int>(m);
}

CharacteristicSample characteristics(const ShearProfile& profile, double y, double nu, double t,
                                     const BrownianPath& path) {
  if (!(nu >= 0.0)) throw InvalidArgument("diffusivity must be >= 0");
  const int m = steps_for(path, t);
  const double amp = std::sqrt(nu);
  CharacteristicSample out;
  out.y = y;
  double prev = profile.evaluate(y + amp * path.values[0]);
  CompensatedSum shift;
  for (int j = 1; j <= m; ++j) {
    const double cur = profile.evaluate(y + amp * path.values[j]);
    shift.add(0.5 * path.dt * (prev + cur));
    prev = cur;
  }
  out.shift = shift.value();
  out.endpoint = y + amp * path.values[m];
  return out;
}

Estimate feynman_kac(const ShearProfile& profile, const InitialDatum& f0, double t, double nu,
                     double x, double y, int n_samples, std::uint64_t seed,
                     const MonteCarloOptions& options) {
  check_monte_carlo(n_samples, t, nu, options);
  if (t == 0.0) return {f0.evaluate(x, y), 0.0};

  const double dt = t / options.n_steps;
  std::vector<double> values(static_cast<std::size_t>(n_samples));
  parallel_for(values.size(), options.workers, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto path = sample_path(seed, i, dt, options.n_steps);
      const auto c = characteristics(profile, y, nu, path.horizon(), path);
      values[i] = f0.evaluate(x - c.shift, c.endpoint);
    }
  });
  const auto boot = bootstrap_mean(values, options.bootstrap_resamples, seed ^ kBootstrapTag);
  return {boot.mean, boot.std_error};
}

ComplexEstimate mode_feynman_kac(const ShearProfile& profile, int k, const ModeDatum& f0k, double t,
                                 double nu, double y, int n_samples, std::uint64_t seed,
                                 const MonteCarloOptions& options) {
  check_monte_carlo(n_samples, t, nu, options);
  if (k == 0) throw InvalidArgument("mode k = 0 is excluded");
  if (t == 0.0) return {f0k.evaluate(y), 0.0, 0.0};

  const double dt = t / options.n_steps;
  std::vector<double> re(static_cast<std::size_t>(n_samples));
  std::vector<double> im(re.size());
  parallel_for(re.size(), options.workers, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto path = sample_path(seed, i, dt, options.n_steps);
      const auto c = characteristics(profile, y, nu, path.horizon(), path);
      const std::complex<double> v = std::polar(1.0, -k * c.shift) * f0k.evaluate(c.endpoint);
      re[i] = v.real();
      im[i] = v.imag();
    }
  });
  const auto bre = bootstrap_mean(re, options.bootstrap_resamples, seed ^ kBootstrapTag);
  const auto bim = bootstrap_mean(im, options.bootstrap_resamples, (seed ^ kBootstrapTag) + 1);
  return {{bre.mean, bim.mean}, bre.std_error, bim.std_error};
}

}  // namespace shearlab
