#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shearlab/initial_datum.hpp"
#include "shearlab/profiles.hpp"

namespace shearlab {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Fourier mode k of the shear advection-diffusion equation
///   d_t f + u(y) d_x f = (nu/2) d_yy f
/// discretized by Fourier collocation on n_y uniform points in y.
struct ModeProblem {
  int k = 1;
  double nu = 1.0;
  int n_y = 128;
  ShearProfile profile;

  /// Throws InvalidArgument unless k >= 1, nu in (0, 1], n_y a power of two
  /// with n_y >= 4 * degree, and the profile periodic.
  void validate() const;
};

/// exp(t L_k) for a mode generator L_k.
struct Propagator {
  ComplexMatrix matrix;
  double t = 0.0;
};

/// y_j = 2 pi j / n, j = 0..n-1.
[[nodiscard]] std::vector<double> collocation_points(int n);

/// Periodic Fourier second-derivative matrix with symbol -eta^2 for
/// eta = -n/2..n/2-1 (the Nyquist mode keeps -(n/2)^2).
[[nodiscard]] Eigen::MatrixXd second_derivative_matrix(int n);

/// L_k = -i k diag(u(y_j)) + (nu/2) D2.
[[nodiscard]] ComplexMatrix build_generator(const ModeProblem& problem);

/// exp(t L) by Pade scaling and squaring. Throws ComputationError when
/// t * ||L||_1 is beyond the guard or the result is not finite.
[[nodiscard]] Propagator propagate(const ComplexMatrix& generator, double t);

/// Largest singular value. With uniform collocation weights this is the
/// L2 -> L2 norm of the discrete mode semigroup.
[[nodiscard]] double operator_norm(const ComplexMatrix& m);
[[nodiscard]] double semigroup_norm(const Propagator& p);

/// Smallest t with ||exp(t L_k)|| <= theta, by doubling then bisection to
/// relative tolerance rel_tol. The search is capped at t = 1/nu; nullopt
/// means the threshold was not reached by the cap. theta must be in (0, 1].
[[nodiscard]] std::optional<double> decay_time(const ModeProblem& problem, double theta = 0.5,
                                               double rel_tol = 1e-3);

struct NormPoint {
  double t = 0.0;
  double norm = 0.0;
};

/// ||exp(t L_k)|| on sorted times. Successive propagators are built by
/// multiplying step exponentials; repeated step sizes reuse one matrix.
[[nodiscard]] std::vector<NormPoint> norm_curve(const ModeProblem& problem,
                                                std::span<const double> times);

/// Trigonometric interpolant of collocation values at an arbitrary y.
[[nodiscard]] std::complex<double> interpolate(const ComplexVector& values, double y);

/// exp(t L_k) applied to the mode datum sampled at the collocation points.
[[nodiscard]] ComplexVector mode_solution(const ModeProblem& problem, const ModeDatum& datum,
                                          double t);

/// f(t, x, y) for a full initial datum: each x-mode is propagated on its own
/// and the real part of sum_k exp(i k x) g_k(t, y) is returned.
[[nodiscard]] double spectral_solution(const ShearProfile& profile, const InitialDatum& datum,
                                       double t, double nu, int n_y, double x, double y);

}  // namespace shearlab
