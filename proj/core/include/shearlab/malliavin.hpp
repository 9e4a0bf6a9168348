#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shearlab/profiles.hpp"
#include "shearlab/stochastic.hpp"

namespace shearlab {

// Quantities attached to the x-component of the stochastic characteristics.
// With f1(s) = u'(y + sqrt(nu) B_s) and f2(s) = u''(y + sqrt(nu) B_s):
//
//   g(r)  = int_r^t f1 ds - (1/t) int_0^t s f1(s) ds
//   detM  = int_0^t g(r)^2 dr
//
// All integrals use the trapezoid rule on the path grid. The (1/t) s-moment
// uses the exact discrete counterpart of the Fubini identity
// int_0^t int_m^t f ds dm = int_0^t s f(s) ds, so that the trapezoid integral
// of g vanishes to roundoff.

/// Discrete Malliavin derivative of the Skorokhod weight g / (sqrt(nu) detM).
///
/// Entry (l, i) is D_z W(r_i) for z in the grid interval (s_{l-1}, s_l],
/// l = 1..n_steps, i = 0..n_steps: the exact derivative of the discretized
/// weight along the Cameron-Martin direction 1_{(s_{l-1}, s_l]}.
struct MalliavinKernel {
  double dt = 0.0;
  Eigen::MatrixXd values;  ///< row l-1, column i

  [[nodiscard]] int n_steps() const { return static_cast<int>(values.rows()); }
  [[nodiscard]] double at(int l, int i) const { return values(l - 1, i); }
};

struct MalliavinSample {
  double y = 0.0;
  double nu = 0.0;
  double t = 0.0;
  double dt = 0.0;
  std::vector<double> g;
  double detM = 0.0;
  std::vector<double> Y;  ///< y_weight: g / (nu detM)
  double h_sup = 0.0;
  std::optional<MalliavinKernel> kernel;
};

/// Determinants below this are treated as degenerate.
inline constexpr double kDetFloor = 1e-300;

/// g on the grid r_i = i dt, i = 0..m with m dt = t.
[[nodiscard]] std::vector<double> g_function(const ShearProfile& profile, double y, double nu,
                                             const BrownianPath& path, double t);

/// Trapezoid integral of g^2 with step dt.
[[nodiscard]] double malliavin_det(std::span<const double> g, double dt);

/// Y(r) = g(r) / (nu detM), normalized so that nu int Y g = 1.
/// Throws DegenerateSampleError when detM <= kDetFloor.
[[nodiscard]] std::vector<double> y_weight(std::span<const double> g, double detM, double nu);

/// W(r) = g(r) / (sqrt(nu) detM) = sqrt(nu) Y(r), the weight in the
/// integration-by-parts identity for the x-derivative. int W^2 = 1/(nu detM).
[[nodiscard]] std::vector<double> skorokhod_weight(std::span<const double> g, double detM,
                                                   double nu);

/// Maximum of |u''| over [y + sqrt(nu) min B, y + sqrt(nu) max B] on [0, t]:
/// the path values themselves plus a 257-point grid across the hull.
[[nodiscard]] double h_sup(const ShearProfile& profile, double y, double nu,
                           const BrownianPath& path, double t);

/// D_z W_r on the (interval, point) grid. Throws DegenerateSampleError when
/// detM <= kDetFloor.
[[nodiscard]] MalliavinKernel malliavin_kernel(const ShearProfile& profile, double y, double nu,
                                               const BrownianPath& path,
                                               std::span<const double> g, double detM, double t);

/// Builds a full sample; the kernel is computed only when requested.
[[nodiscard]] MalliavinSample malliavin_sample(const ShearProfile& profile, double y, double nu,
                                               double t, const BrownianPath& path,
                                               bool with_kernel);

/// Throws ComputationError naming the first violated sample invariant:
/// int g = 0, detM >= 0, nu int Y g = 1, (int |g|)^2 <= t detM.
void check_sample_invariants(const MalliavinSample& sample);

/// int_0^t int_0^t D_r W_z D_z W_r dz dr, with W averaged over each r-interval.
[[nodiscard]] double kernel_cross_integral(const MalliavinKernel& kernel);

/// Pointwise bound on the kernel:
///   |D_z W_r| <= 2 t h / detM + 4 t h |g(r)| int |g| / detM^2
/// and the cross-integral bound |int int D W D W| <= 36 t^2 (t h)^2 / detM^2.
struct KernelEnvelope {
  static constexpr double kEntryConst1 = 2.0;
  static constexpr double kEntryConst2 = 4.0;
  static constexpr double kCrossConst = 36.0;
};

/// Number of kernel entries above the pointwise envelope.
[[nodiscard]] long envelope_violations(const MalliavinSample& sample);
[[nodiscard]] double cross_integral_envelope(const MalliavinSample& sample);

struct SkorokhodEstimate {
  double term1 = 0.0;  ///< E int W^2 = E[1 / (nu detM)]
  double term2 = 0.0;  ///< E int int D_r W_z D_z W_r
  double std_error1 = 0.0;
  double std_error2 = 0.0;
  double std_error_total = 0.0;
  long n_samples = 0;
  long entry_envelope_violations = 0;
  long cross_envelope_violations = 0;

  [[nodiscard]] double total() const { return term1 + term2; }
};

/// Both terms of E(delta W)^2 from already computed samples sharing (y, nu, t).
/// Throws InvalidArgument on an empty list, mixed parameters, or a missing
/// kernel when with_kernel is set.
[[nodiscard]] SkorokhodEstimate skorokhod_variance(std::span<const MalliavinSample> samples,
                                                   bool with_kernel, int resamples = 200,
                                                   std::uint64_t seed = 0);

/// Streaming version: draws n_samples paths, computes each kernel in a
/// per-worker scratch buffer and keeps only the per-sample integrals.
[[nodiscard]] SkorokhodEstimate skorokhod_scan(const ShearProfile& profile, double y, double nu,
                                               double t, int n_samples, std::uint64_t seed,
                                               bool with_kernel,
                                               const MonteCarloOptions& options = {});

struct DegenerateRecord {
  std::uint64_t seed = 0;
  std::uint64_t sample_index = 0;
  double detM = 0.0;
};

struct InverseMomentResult {
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double std_error = 0.0;
  double tail_fraction = 0.0;  ///< share of the sum carried by the top 1% of samples
  long n_samples = 0;
  std::vector<DegenerateRecord> degenerate;
};

inline constexpr int kMinInverseMomentSamples = 10000;
inline constexpr double kMaxDegenerateFraction = 1e-4;

/// E[detM^{-p}] for p in {0, 1, 2} with a 95% bootstrap interval.
/// Degenerate samples are excluded from the mean and reported; more than
/// 0.01% of them raises DegenerateSampleError.
[[nodiscard]] InverseMomentResult inverse_moment(const ShearProfile& profile, double y, double nu,
                                                 double t, int p, int n_samples,
                                                 std::uint64_t seed,
                                                 const MonteCarloOptions& options = {});

/// Grid check of
///   ||f'|| <= 4 ||f|| max{1/t, ||f||^{-1/(1+a)} [f']_a^{1/(1+a)}}
/// for samples f, f' on the uniform grid of [0, t], with sup norms and the
/// Hoelder constant [f']_a taken over grid points. alpha in (0, 1].
[[nodiscard]] bool check_interpolation(std::span<const double> f, std::span<const double> df,
                                       double t, double alpha);

}  // namespace shearlab
