#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "shearlab/initial_datum.hpp"
#include "shearlab/profiles.hpp"

namespace shearlab {

/// Brownian sample path on the uniform grid s_j = j * dt, j = 0..n_steps.
struct BrownianPath {
  double dt = 0.0;
  int n_steps = 0;
  std::vector<double> values;  ///< B_0 = 0, ..., B_{n_steps}
  std::uint64_t seed = 0;
  std::uint64_t sample_index = 0;
  bool zero_noise = false;     ///< debug path B == 0, analytic tests only

  [[nodiscard]] double horizon() const { return dt * n_steps; }
};

/// Path number `sample_index` of the stream identified by `seed`.
///
/// Each (seed, sample_index) pair seeds its own generator, so a sample does
/// not depend on which other samples were drawn or in what order.
[[nodiscard]] BrownianPath sample_path(std::uint64_t seed, std::uint64_t sample_index, double dt,
                                       int n_steps);

/// The zero path. Flagged as such; only meant for closed-form tests.
[[nodiscard]] BrownianPath zero_noise_path(double dt, int n_steps);

/// Every `factor`-th grid value of a path (same Brownian motion, coarser grid).
[[nodiscard]] BrownianPath coarsen(const BrownianPath& path, int factor);

/// Number of grid steps covering [0, t]; t must be a grid time within the horizon.
[[nodiscard]] int steps_for(const BrownianPath& path, double t);

/// Stochastic characteristics started from (., y):
///   shift    = I_t = int_0^t u(y + sqrt(nu) B_s) ds   (trapezoid on the path grid)
///   endpoint = y + sqrt(nu) B_t
struct CharacteristicSample {
  double y = 0.0;
  double shift = 0.0;
  double endpoint = 0.0;
};

/// nu = 0 is accepted here (deterministic characteristics) for testing.
[[nodiscard]] CharacteristicSample characteristics(const ShearProfile& profile, double y,
                                                   double nu, double t,
                                                   const BrownianPath& path);

struct MonteCarloOptions {
  int n_steps = 4096;
  int workers = 1;
  int bootstrap_resamples = 200;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct ComplexEstimate {
  std::complex<double> value;
  double std_error_re = 0.0;
  double std_error_im = 0.0;
};

inline constexpr int kMinMonteCarloSamples = 100;

/// f(t, x, y) = E f0(x - I_t, y + sqrt(nu) B_t), the backward form of the
/// characteristics representation. Standard error is bootstrapped.
/// Throws InvalidArgument for n_samples < 100.
[[nodiscard]] Estimate feynman_kac(const ShearProfile& profile, const InitialDatum& f0, double t,
                                   double nu, double x, double y, int n_samples,
                                   std::uint64_t seed, const MonteCarloOptions& options = {});

/// Mode form E[exp(-i k I_t) f0k(y + sqrt(nu) B_t)] with componentwise
/// bootstrap standard errors.
[[nodiscard]] ComplexEstimate mode_feynman_kac(const ShearProfile& profile, int k,
                                               const ModeDatum& f0k, double t, double nu,
                                               double y, int n_samples, std::uint64_t seed,
                                               const MonteCarloOptions& options = {});

}  // namespace shearlab
