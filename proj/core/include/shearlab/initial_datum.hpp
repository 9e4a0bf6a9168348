#pragma once

#include <complex>
#include <span>
#include <vector>

namespace shearlab {

/// One term c * exp(i (k x + eta y)) of an initial datum.
struct FourierTerm {
  int k = 1;
  int eta = 0;
  std::complex<double> coeff{1.0, 0.0};

  friend bool operator==(const FourierTerm&, const FourierTerm&) = default;
};

/// Real initial datum f0(x, y) = Re sum c exp(i (k x + eta y)) with every
/// k != 0, so that f0 has zero mean in x for each y.
class InitialDatum {
 public:
  /// Throws InvalidArgument on an empty list, a k = 0 term, or a non-finite
  /// coefficient.
  static InitialDatum from_terms(std::span<const FourierTerm> terms);

  [[nodiscard]] double evaluate(double x, double y) const;

  /// The datum (x, y) -> f0(x - a, y).
  [[nodiscard]] InitialDatum shifted(double a) const;

  /// Equivalent terms with k >= 1, using Re(z) = Re(conj z).
  [[nodiscard]] std::vector<FourierTerm> positive_terms() const;

  [[nodiscard]] std::span<const FourierTerm> terms() const { return terms_; }

  friend bool operator==(const InitialDatum&, const InitialDatum&) = default;

 private:
  std::vector<FourierTerm> terms_;
};

/// x-Fourier coefficient of a datum as a function of y:
/// sum over (eta, c) of c * exp(i eta y).
struct ModeDatum {
  std::vector<std::pair<int, std::complex<double>>> terms;

  [[nodiscard]] std::complex<double> evaluate(double y) const;
  /// sum |c|, an upper bound for sup_y |value|.
  [[nodiscard]] double sup_bound() const;
};

}  // namespace shearlab
