#include "shearlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "shearlab/error.hpp"

namespace shearlab {
namespace {

constexpr double kExponentGuard = 1e9;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void ModeProblem::validate() const {
  if (k < 1) throw InvalidArgument("mode index k must be >= 1 (k = 0 is removed by the mean-zero condition)");
  if (!(nu > 0.0 && nu <= 1.0)) throw InvalidArgument("diffusivity nu must lie in (0, 1]");
  if (!is_power_of_two(n_y)) throw InvalidArgument("n_y must be a power of two");
  if (!profile.periodic()) throw InvalidArgument("spectral solver needs a periodic profile");
  if (n_y < 4 * profile.degree()) {
    std::ostringstream msg;
    msg << "n_y = " << n_y << " under-resolves a profile of degree " << profile.degree();
    throw InvalidArgument(msg.str());
  }
}

std::vector<double> collocation_points(int n) {
  std::vector<double> y(n);
  for (int j = 0; j < n; ++j) y[j] = 2.0 * std::numbers::pi * j / n;
  return y;
}

Eigen::MatrixXd second_derivative_matrix(int n) {
  // Circulant: D2[j, l] = c[(j - l) mod n], c[m] = (1/n) sum_eta -eta^2 e^{i eta 2 pi m / n}.
  // The +-eta pairs combine into cosines and the Nyquist term into (-1)^m.
  std::vector<double> c(n, 0.0);
  const int half = n / 2;
  for (int m = 0; m < n; ++m) {
    double s = 0.0;
    for (int eta = 1; eta < half; ++eta) {
      s -= 2.0 * eta * eta * std::cos(2.0 * std::numbers::pi * eta * m / n);
    }
    s -= static_cast<double>(half) * half * ((m % 2 == 0) ? 1.0 : -1.0);
    c[m] = s / n;
  }
  Eigen::MatrixXd d2(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) d2(j, l) = c[((j - l) % n + n) % n];
  }
  return d2;
}

ComplexMatrix build_generator(const ModeProblem& problem) {
  problem.validate();
  const int n = problem.n_y;
  ComplexMatrix gen = (0.5 * problem.nu * second_derivative_matrix(n)).cast<std::complex<double>>();
  const auto y = collocation_points(n);
  for (int j = 0; j < n; ++j) {
    gen(j, j) += std::complex<double>(0.0, -problem.k * problem.profile.evaluate(y[j]));
  }
  return gen;
}

Propagator propagate(const ComplexMatrix& generator, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("propagation time must be finite and >= 0");
  if (generator.rows() != generator.cols()) throw InvalidArgument("generator must be square");
  const Eigen::Index n = generator.rows();
  if (t == 0.0) return {ComplexMatrix::Identity(n, n), 0.0};
  const ComplexMatrix scaled = t * generator;
  const double norm1 = scaled.cwiseAbs().colwise().sum().maxCoeff();
  if (!(norm1 < kExponentGuard)) {
    std::ostringstream msg;
    msg << "matrix exponential guard: ||t L||_1 = " << norm1;
    throw ComputationError(msg.str());
  }
  ComplexMatrix result = scaled.exp();
  if (!result.allFinite()) throw ComputationError("matrix exponential produced non-finite entries");
  return {std::move(result), t};
}

double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double semigroup_norm(const Propagator& p) { return operator_norm(p.matrix); }

std::optional<double> decay_time(const ModeProblem& problem, double theta, double rel_tol) {
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidArgument("threshold theta must lie in (0, 1]");
  if (!(rel_tol > 0.0)) throw InvalidArgument("relative tolerance must be positive");
  const ComplexMatrix gen = build_generator(problem);
  if (theta >= 1.0) return 0.0;

  const double cap = 1.0 / problem.nu;
  double lo = 0.0;
  double hi = std::min(1.0, cap);
  ComplexMatrix p = propagate(gen, hi).matrix;
  while (operator_norm(p) > theta) {
    if (hi >= cap) return std::nullopt;
    const double next = 2.0 * hi;
    if (next > cap) {
      p = propagate(gen, cap).matrix;
      lo = hi;
      hi = cap;
    } else {
      p = p * p;
      lo = hi;
      hi = next;
    }
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (semigroup_norm(propagate(gen, mid)) <= theta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<NormPoint> norm_curve(const ModeProblem& problem, std::span<const double> times) {
  const ComplexMatrix gen = build_generator(problem);
  const double cap = 1.0 / problem.nu;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0 && times[i] <= cap)) throw InvalidArgument("norm_curve times must lie in [0, 1/nu]");
    if (i > 0 && times[i] < times[i - 1]) throw InvalidArgument("norm_curve times must be sorted");
  }
  const Eigen::Index n = gen.rows();
  std::vector<NormPoint> out;
  out.reserve(times.size());
  ComplexMatrix current = ComplexMatrix::Identity(n, n);
  double current_t = 0.0;
  double cached_step = -1.0;
  ComplexMatrix step_matrix;
  for (double t : times) {
    const double step = t - current_t;
    if (step > 0.0) {
      if (step != cached_step) {
        step_matrix = propagate(gen, step).matrix;
        cached_step = step;
      }
      current = step_matrix * current;
      current_t = t;
    }
    out.push_back({t, operator_norm(current)});
  }
  return out;
}

std::complex<double> interpolate(const ComplexVector& values, double y) {
  const Eigen::Index n = values.size();
  if (n == 0) throw InvalidArgument("cannot interpolate an empty vector");
  const auto nodes = collocation_points(static_cast<int>(n));
  const Eigen::Index half = n / 2;
  std::complex<double> sum = 0.0;
  for (Eigen::Index eta = -half; eta < n - half; ++eta) {
    std::complex<double> coeff = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      coeff += values(j) * std::polar(1.0, -static_cast<double>(eta) * nodes[j]);
    }
    coeff /= static_cast<double>(n);
    if (n % 2 == 0 && eta == -half) {
      sum += coeff * std::cos(static_cast<double>(half) * y);
    } else {
      sum += coeff * std::polar(1.0, static_cast<double>(eta) * y);
    }
  }
  return sum;
}

ComplexVector mode_solution(const ModeProblem& problem, const ModeDatum& datum, double t) {
  const ComplexMatrix gen = build_generator(problem);
  const auto y = collocation_points(problem.n_y);
  ComplexVector v(problem.n_y);
  for (int j = 0; j < problem.n_y; ++j) v(j) = datum.evaluate(y[j]);
  return propagate(gen, t).matrix * v;
}

double spectral_solution(const ShearProfile& profile, const InitialDatum& datum, double t,
                         double nu, int n_y, double x, double y) {
  std::map<int, ModeDatum> by_mode;
  for (const auto& term : datum.positive_terms()) {
    by_mode[term.k].terms.emplace_back(term.eta, term.coeff);
  }
  double value = 0.0;
  for (const auto& [k, mode] : by_mode) {
    for (const auto& [eta, c] : mode.terms) {
      if (2 * std::abs(eta) >= n_y) throw InvalidArgument("datum frequency eta is not resolved by n_y");
    }
    const ModeProblem problem{k, nu, n_y, profile};
    const ComplexVector g = mode_solution(problem, mode, t);
    value += (std::polar(1.0, k * x) * interpolate(g, y)).real();
  }
  return value;
}

}  // namespace shearlab
