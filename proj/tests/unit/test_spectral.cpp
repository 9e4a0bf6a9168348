#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "shearlab/error.hpp"
#include "shearlab/spectral.hpp"

using namespace shearlab;
using std::numbers::pi;

namespace {

ModeProblem sin_problem(int k, double nu, int n_y = 64) {
  return ModeProblem{k, nu, n_y, ShearProfile::preset("sin")};
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

double least_negative_real_part(const ModeProblem& p) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(build_generator(p));
  return es.eigenvalues().real().maxCoeff();
}

}  // namespace

TEST_CASE("generator splits into skew transport and symmetric diffusion") {
  const auto p = sin_problem(3, 0.05);
  const ComplexMatrix l = build_generator(p);
  const ComplexMatrix sym = l + l.adjoint();
  const ComplexMatrix diffusion = (p.nu * second_derivative_matrix(p.n_y)).cast<std::complex<double>>();
  CHECK(max_abs(sym - diffusion) < 1e-10 * max_abs(diffusion));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    ComplexVector v(p.n_y);
    for (int j = 0; j < p.n_y; ++j) v(j) = {n01(rng), n01(rng)};
    CHECK(v.dot(sym * v).real() <= 1e-9 * v.squaredNorm());
  }
}

TEST_CASE("second derivative matrix has symbol -eta^2") {
  const int n = 32;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * second_derivative_matrix(n));
  std::vector<double> expected;
  for (int eta = -n / 2; eta < n / 2; ++eta) expected.push_back(-0.5 * eta * eta);
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < n; ++i) CHECK(es.eigenvalues()(i) == doctest::Approx(expected[i]).epsilon(1e-10).scale(1.0));

  // Exact on resolved modes.
  const auto y = collocation_points(n);
  Eigen::VectorXd f(n);
  for (int j = 0; j < n; ++j) f(j) = std::cos(5 * y[j]) + std::sin(2 * y[j]);
  const Eigen::VectorXd d2f = second_derivative_matrix(n) * f;
  for (int j = 0; j < n; ++j) {
    CHECK(d2f(j) == doctest::Approx(-25 * std::cos(5 * y[j]) - 4 * std::sin(2 * y[j])).scale(1.0).epsilon(1e-10));
  }
}

TEST_CASE("spectrum is stable and converged under resolution doubling") {
  const double coarse = least_negative_real_part(sin_problem(1, 1e-2, 64));
  const double fine = least_negative_real_part(sin_problem(1, 1e-2, 128));
  CHECK(coarse <= 0.0);
  CHECK(std::abs(coarse - fine) <= 1e-8 * std::abs(fine));
  Eigen::ComplexEigenSolver<ComplexMatrix> es(build_generator(sin_problem(1, 1e-2, 64)));
  CHECK(es.eigenvalues().real().maxCoeff() <= 0.0);
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(sin_problem(0, 0.1).validate(), InvalidArgument);
  CHECK_THROWS_AS(sin_problem(1, 0.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(sin_problem(1, 2.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(sin_problem(1, 0.1, 48).validate(), InvalidArgument);
  const TrigMode high[] = {{40, 0.0, 1.0}};
  CHECK_THROWS_AS((ModeProblem{1, 0.1, 64, ShearProfile::from_modes(high)}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ModeProblem{1, 0.1, 64, ShearProfile::linear_debug(1.0)}.validate()), InvalidArgument);
}

TEST_CASE("propagator basics") {
  const ComplexMatrix l = build_generator(sin_problem(2, 0.1, 32));
  const auto id = propagate(l, 0.0);
  CHECK(max_abs(id.matrix - ComplexMatrix::Identity(32, 32)) == 0.0);
  CHECK(semigroup_norm(id) == doctest::Approx(1.0));

  const double t = 1e-6;
  const ComplexMatrix first_order = ComplexMatrix::Identity(32, 32) + t * l;
  const double lnorm = operator_norm(l);
  CHECK(max_abs(propagate(l, t).matrix - first_order) <= 10 * t * t * lnorm * lnorm);

  const ComplexMatrix p3 = propagate(l, 0.7).matrix * propagate(l, 1.6).matrix;
  CHECK(max_abs(p3 - propagate(l, 2.3).matrix) < 1e-8);

  CHECK_THROWS_AS((void)propagate(l, -1.0), InvalidArgument);
  CHECK_THROWS_AS((void)propagate(l, 1e12), ComputationError);
}

TEST_CASE("operator norm") {
  CHECK(operator_norm(ComplexMatrix::Identity(4, 4)) == doctest::Approx(1.0));
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 0.5;
  d(1, 1) = 0.1;
  CHECK(operator_norm(d) == doctest::Approx(0.5));
}

TEST_CASE("norm curve is a non-increasing contraction and matches direct evaluation") {
  const auto p = sin_problem(1, 1e-4);
  std::vector<double> times;
  for (int t = 0; t <= 100; ++t) times.push_back(t);
  const auto curve = norm_curve(p, times);
  CHECK(curve.front().norm == doctest::Approx(1.0));
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].norm <= curve[i - 1].norm + 1e-10);
    CHECK(curve[i].norm <= 1.0 + 1e-8);
  }

  const double zero[] = {0.0};
  const auto single = norm_curve(p, zero);
  REQUIRE(single.size() == 1);
  CHECK(single[0].norm == doctest::Approx(1.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ut(0.0, 200.0);
  std::vector<double> random_times(5);
  for (double& t : random_times) t = ut(rng);
  std::sort(random_times.begin(), random_times.end());
  const auto gen = build_generator(p);
  const auto pts = norm_curve(p, random_times);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(std::abs(pts[i].norm - semigroup_norm(propagate(gen, random_times[i]))) < 1e-8);
  }

  const double unsorted[] = {2.0, 1.0};
  CHECK_THROWS_AS((void)norm_curve(p, unsorted), InvalidArgument);
  const double beyond[] = {1e5};
  CHECK_THROWS_AS((void)norm_curve(p, beyond), InvalidArgument);
}

TEST_CASE("decay time") {
  CHECK(decay_time(sin_problem(1, 1e-2), 1.0).value() == 0.0);
  CHECK_THROWS_AS((void)decay_time(sin_problem(1, 1e-2), 0.0), InvalidArgument);
  CHECK_THROWS_AS((void)decay_time(sin_problem(1, 1e-2), 1.5), InvalidArgument);

  // The bisection brackets the threshold crossing.
  const auto p = sin_problem(1, 1e-3);
  const double ts = decay_time(p, 0.5).value();
  const auto gen = build_generator(p);
  CHECK(semigroup_norm(propagate(gen, ts)) <= 0.5);
  CHECK(semigroup_norm(propagate(gen, ts * (1 - 2e-3))) > 0.5);

  double prev = INFINITY;
  for (double nu : {1e-3, 1e-2, 1e-1}) {
    const double t = decay_time(sin_problem(1, nu), 0.5).value();
    CHECK(t <= prev);
    prev = t;
  }

  // A threshold that cannot be met before t = 1/nu.
  CHECK_FALSE(decay_time(sin_problem(1, 0.5), 1e-6).has_value());
}

TEST_CASE("decay time scales like nu^{-1/2} for a simple critical point") {
  for (int e : {12, 16}) {
    const double nu = std::ldexp(1.0, -e);
    const double slow = decay_time(sin_problem(1, nu, 128)).value();
    const double fast = decay_time(sin_problem(1, 16 * nu, 128)).value();
    CHECK(slow / fast == doctest::Approx(4.0).epsilon(0.2));
  }
}

TEST_CASE("decay time is converged in n_y at the shipped scan extremes") {
  for (const char* name : {"sin", "sin3"}) {
    const auto u = ShearProfile::preset(name);
    for (double nu : {std::ldexp(1.0, -8), std::ldexp(1.0, -16)}) {
      const double a = decay_time(ModeProblem{1, nu, 128, u}).value();
      const double b = decay_time(ModeProblem{1, nu, 256, u}).value();
      CHECK(std::abs(a - b) <= 1e-2 * b);
    }
  }
}

TEST_CASE("trigonometric interpolation is exact for resolved data") {
  const int n = 16;
  const auto y = collocation_points(n);
  ComplexVector v(n);
  auto f = [](double s) { return std::complex<double>(std::cos(3 * s), 0.5 * std::sin(7 * s)) + std::cos(8 * s); };
  for (int j = 0; j < n; ++j) v(j) = f(y[j]);
  for (double s : {0.1, 1.7, 4.2}) {
    const auto got = interpolate(v, s);
    CHECK(std::abs(got - f(s)) < 1e-12);
  }
}

TEST_CASE("spectral solution assembles the propagated x-modes") {
  const auto u = ShearProfile::preset("sin");
  const FourierTerm terms[] = {{1, 0, {1.0, 0.0}}, {-2, 3, {0.0, 0.5}}};
  const auto f0 = InitialDatum::from_terms(terms);
  CHECK(spectral_solution(u, f0, 0.0, 0.1, 32, 0.4, 1.1) == doctest::Approx(f0.evaluate(0.4, 1.1)));

  const ModeProblem p{1, 0.1, 32, u};
  ModeDatum d;
  d.terms.emplace_back(0, 1.0);
  const auto g = mode_solution(p, d, 0.8);
  const FourierTerm cosx[] = {{1, 0, {1.0, 0.0}}};
  const double direct = (std::polar(1.0, 0.3) * interpolate(g, 2.0)).real();
  CHECK(spectral_solution(u, InitialDatum::from_terms(cosx), 0.8, 0.1, 32, 0.3, 2.0) ==
        doctest::Approx(direct).epsilon(1e-12));
}
