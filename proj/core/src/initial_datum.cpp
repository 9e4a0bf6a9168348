#include "shearlab/initial_datum.hpp"

#include <cmath>

#include "shearlab/error.hpp"

namespace shearlab {

InitialDatum InitialDatum::from_terms(std::span<const FourierTerm> terms) {
  if (terms.empty()) throw InvalidArgument("initial datum needs at least one Fourier term");
  InitialDatum d;
  for (const auto& term : terms) {
    if (term.k == 0) throw InvalidArgument("initial datum terms with k = 0 are forbidden (mean-zero in x)");
    if (!std::isfinite(term.coeff.real()) || !std::isfinite(term.coeff.imag())) {
      throw InvalidArgument("initial datum coefficients must be finite");
    }
    d.terms_.push_back(term);
  }
  return d;
}

double InitialDatum::evaluate(double x, double y) const {
  double sum = 0.0;
  for (const auto& term : terms_) {
    sum += (term.coeff * std::polar(1.0, term.k * x + term.eta * y)).real();
  }
  return sum;
}

InitialDatum InitialDatum::shifted(double a) const {
  InitialDatum d = *this;
  for (auto& term : d.terms_) term.coeff *= std::polar(1.0, -term.k * a);
  return d;
}

std::vector<FourierTerm> InitialDatum::positive_terms() const {
  std::vector<FourierTerm> out;
  out.reserve(terms_.size());
  for (const auto& term : terms_) {
    if (term.k > 0) {
      out.push_back(term);
    } else {
      out.push_back({-term.k, -term.eta, std::conj(term.coeff)});
    }
  }
  return out;
}

std::complex<double> ModeDatum::evaluate(double y) const {
  std::complex<double> sum = 0.0;
  for (const auto& [eta, c] : terms) sum += c * std::polar(1.0, eta * y);
  return sum;
}

double ModeDatum::sup_bound() const {
  double s = 0.0;
  for (const auto& term : terms) s += std::abs(term.second);
  return s;
}

}  // namespace shearlab
