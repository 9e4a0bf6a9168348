#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shearlab {

/// Highest derivative order evaluate() supports; bounds critical-point orders.
inline constexpr int kMaxDerivative = 12;

/// One Fourier term a*cos(m y) + b*sin(m y) of a shear profile.
struct TrigMode {
  int m = 1;
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const TrigMode&, const TrigMode&) = default;
};

/// Shear profile u(y) on the torus, stored as a zero-mean trigonometric
/// polynomial u(y) = sum_m a_m cos(m y) + b_m sin(m y).
///
/// A non-periodic linear profile u(y) = c*y is available through
/// linear_debug() for closed-form tests of the Malliavin quantities. It has
/// u' = c everywhere and is rejected by the spectral solver.
class ShearProfile {
 public:
  /// Builds a profile from (m, a_m, b_m) triples. Repeated modes are summed.
  /// Throws InvalidArgument for m < 1, non-finite coefficients, or u == const.
  static ShearProfile from_modes(std::span<const TrigMode> modes);

  /// Named presets: "sin", "cos", "sin3" = (3 sin y - sin 3y)/4, "cos2",
  /// and "linear" (the debug profile with slope 1).
  static ShearProfile preset(std::string_view name);

  static ShearProfile linear_debug(double slope);

  /// u^{(d)}(y), term-by-term. Requires 0 <= d <= kMaxDerivative.
  [[nodiscard]] double evaluate(double y, int d = 0) const;

  /// Largest mode index M; zero for the linear debug profile.
  [[nodiscard]] int degree() const { return static_cast<int>(cos_.size()); }
  [[nodiscard]] bool periodic() const { return !linear_; }
  [[nodiscard]] double linear_slope() const { return slope_; }

  /// a_1..a_M and b_1..b_M (index m-1 holds mode m).
  [[nodiscard]] std::span<const double> cos_coeffs() const { return cos_; }
  [[nodiscard]] std::span<const double> sin_coeffs() const { return sin_; }

  /// Nonzero modes in increasing m, the canonical config representation.
  [[nodiscard]] std::vector<TrigMode> modes() const;

  /// Upper bound on sup_y |u^{(d)}(y)| from the coefficients.
  [[nodiscard]] double coefficient_bound(int d) const;

  friend bool operator==(const ShearProfile&, const ShearProfile&) = default;

 private:
  ShearProfile() = default;

  std::vector<double> cos_;
  std::vector<double> sin_;
  bool linear_ = false;
  double slope_ = 0.0;
};

/// Zero y0 of u' of order n (u' = ... = u^{(n)} = 0, u^{(n+1)} != 0) with a
/// radius eta on which
///   c1 |z-y0|^n     <= |u'(z)|  <= c2 |z-y0|^n
///   c3 |z-y0|^{n-1} <= |u''(z)| <= c4 |z-y0|^{n-1}.
struct CriticalPoint {
  double location = 0.0;
  int order = 1;
  double radius = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
};

/// All zeros of u' in [0, 2 pi), sorted by location.
///
/// Simple and odd-order zeros are bracketed by sign changes of u' on a 2^14
/// grid, even-order zeros by sign changes of u''; both are refined by
/// bisection to `tol`. The order is the smallest n with
/// |u^{(n+1)}(y0)| > 1e-8. Throws ComputationError if that exceeds
/// kMaxDerivative - 1. The linear debug profile has no critical points.
[[nodiscard]] std::vector<CriticalPoint> critical_points(const ShearProfile& profile,
                                                         double tol = 1e-12);

/// Maximal critical-point order n0 (0 when u' never vanishes).
[[nodiscard]] int max_order(const ShearProfile& profile);

/// Cyclic distance on the torus of circumference 2 pi.
[[nodiscard]] double torus_distance(double a, double b);

struct PresetInfo {
  std::string name;
  std::string description;
};

/// Presets in a fixed order; descriptions carry n0 as computed by max_order.
[[nodiscard]] std::vector<PresetInfo> list_presets();

}  // namespace shearlab
