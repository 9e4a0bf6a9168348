#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace shearlab {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 1.0;
  int n_points = 0;
};

using XY = std::pair<double, double>;

/// Ordinary least squares of y on x. Needs at least 3 points and two distinct x.
[[nodiscard]] FitResult fit_linear(std::span<const XY> points);

/// OLS on (log x, log y); the intercept is log of the prefactor.
///
/// log y is split as log(mantissa) + exponent * log 2 with exponents taken
/// relative to the first point, so rescaling every y by a power of two leaves
/// slope, stderr and r^2 bit-identical and moves only the intercept.
[[nodiscard]] FitResult fit_power_law(std::span<const XY> points);

/// Exponents of t* ~ nu^a k^b predicted for maximal critical order n0:
/// a = -(n0 + 1)/(n0 + 3), b = -2/(n0 + 3).
struct ExponentTargets {
  double nu_slope = 0.0;
  double k_slope = 0.0;
};
[[nodiscard]] ExponentTargets theorem_targets(int n0);

/// One row of a decay-time scan; t_star is empty when the cap was hit.
struct DecayPoint {
  int k = 1;
  double nu = 0.0;
  std::optional<double> t_star;
};

struct ExponentOptions {
  std::string experiment = "spectral-scan";
  double nu_slope_tol = 0.1;
  double k_slope_tol = 0.1;
  double nu_tilde = 1.0;  ///< points with nu / k above this are left out
};

struct AxisFit {
  double fixed = 0.0;  ///< the k (for a nu fit) or nu (for a k fit) held constant
  FitResult fit;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ExponentReport {
  std::string experiment;
  int n0 = 1;
  ExponentTargets targets;
  std::optional<AxisFit> nu_fit;
  std::optional<AxisFit> k_fit;
  ExponentOptions options;
  bool pass = false;

  [[nodiscard]] std::string to_json() const;
};

/// Fits log t* against log nu along the k with the most usable points and
/// log t* against log k along the best nu. A point is usable when it reached
/// the threshold and nu / k <= nu_tilde; an axis needs 4 usable points.
/// At least one axis must qualify, otherwise InvalidArgument
/// "insufficient grid". pass requires every fitted axis to be within tolerance.
[[nodiscard]] ExponentReport exponent_report(std::span<const DecayPoint> scan, int n0,
                                             const ExponentOptions& options = {});

struct GevreyFit {
  double lambda = 0.0;
  FitResult fit;
  int excluded = 0;  ///< modes dropped at the solver floor
};

/// Fits log ||S(t) P_k|| = c - lambda k^{2/(n0+3)}. Norms <= 1e-14 are
/// dropped; fewer than 4 remaining modes is an error.
[[nodiscard]] GevreyFit gevrey_fit(std::span<const std::pair<int, double>> mode_norms, int n0);

inline constexpr double kNormFloor = 1e-14;

/// Parameters a quantity was computed at, used to refuse mismatched inputs.
struct CrosscheckParams {
  std::string profile;
  int k = 1;
  double nu = 0.0;
  double t = 0.0;
  friend bool operator==(const CrosscheckParams&, const CrosscheckParams&) = default;
};

struct CrosscheckResult {
  double spectral_norm = 0.0;
  double bound = 0.0;      ///< k^{-1} sqrt(total)
  double allowance = 0.0;  ///< bound * (1 + 3 relative stderr)
  bool vacuous = false;    ///< bound >= 1, nothing is being tested
  bool pass = false;
};

/// pass iff spectral_norm <= k^{-1} sqrt(total) (1 + 3 stderr / total).
[[nodiscard]] CrosscheckResult bound_crosscheck(double spectral_norm, double skorokhod_total,
                                                double skorokhod_stderr, int k);

/// Same, after checking that both sides were computed at matching parameters.
[[nodiscard]] CrosscheckResult bound_crosscheck(double spectral_norm,
                                                const CrosscheckParams& spectral,
                                                double skorokhod_total, double skorokhod_stderr,
                                                const CrosscheckParams& skorokhod);

}  // namespace shearlab
