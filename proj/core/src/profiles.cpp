#include "shearlab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "shearlab/error.hpp"

namespace shearlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kBracketGrid = 1 << 14;
constexpr double kOrderThreshold = 1e-8;
constexpr int kCertificationHalfPoints = 10000;
constexpr double kLowerMargin = 1.05;
constexpr double kUpperMargin = 1.0 + 1e-4;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double wrap(double y) {
  double r = std::fmod(y, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// Roots of u^{(d)} on [0, 2 pi) bracketed by sign changes on a uniform grid.
std::vector<double> bracketed_roots(const ShearProfile& u, int d, double tol) {
  const double h = kTwoPi / kBracketGrid;
  std::vector<double> f(kBracketGrid + 1);
  for (int j = 0; j <= kBracketGrid; ++j) f[j] = u.evaluate(j * h, d);

  std::vector<double> roots;
  for (int j = 0; j < kBracketGrid; ++j) {
    if (f[j] == 0.0) {
      roots.push_back(j * h);
      continue;
    }
    if (f[j] * f[j + 1] >= 0.0) continue;
    double lo = j * h;
    double hi = (j + 1) * h;
    double flo = f[j];
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = u.evaluate(mid, d);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    roots.push_back(wrap(0.5 * (lo + hi)));
  }
  return roots;
}

int detect_order(const ShearProfile& u, double y0) {
  for (int n = 1; n < kMaxDerivative; ++n) {
    if (std::abs(u.evaluate(y0, n + 1)) > kOrderThreshold) return n;
  }
  std::ostringstream msg;
  msg << "critical point at y=" << y0 << " has order above " << kMaxDerivative - 1
      << " (profile is too flat there)";
  throw ComputationError(msg.str());
}

// Halves eta until the two-sided Taylor bounds hold on a dense grid.
void certify_radius(const ShearProfile& u, CriticalPoint& cp, double initial_eta) {
  const int n = cp.order;
  const double lead = std::abs(u.evaluate(cp.location, n + 1));
  const double c1 = lead / (2.0 * factorial(n));
  const double c3 = lead / (2.0 * factorial(n - 1));

  double eta = initial_eta;
  for (int attempt = 0; attempt < 64; ++attempt, eta *= 0.5) {
    bool ok = true;
    double c2 = 0.0;
    double c4 = 0.0;
    for (int i = -kCertificationHalfPoints; i <= kCertificationHalfPoints && ok; ++i) {
      if (i == 0) continue;
      const double dz = eta * static_cast<double>(i) / kCertificationHalfPoints;
      const double z = cp.location + dz;
      const double a = std::abs(dz);
      const double p1 = std::pow(a, n);
      const double p2 = std::pow(a, n - 1);
      const double d1 = std::abs(u.evaluate(z, 1));
      const double d2 = std::abs(u.evaluate(z, 2));
      if (d1 < kLowerMargin * c1 * p1 || d2 < kLowerMargin * c3 * p2) ok = false;
      c2 = std::max(c2, d1 / p1);
      c4 = std::max(c4, d2 / p2);
    }
    if (ok) {
      cp.radius = eta;
      cp.c1 = c1;
      cp.c2 = c2 * kUpperMargin;
      cp.c3 = c3;
      cp.c4 = c4 * kUpperMargin;
      return;
    }
  }
  throw ComputationError("could not certify a Taylor radius around a critical point");
}

}  // namespace

ShearProfile ShearProfile::from_modes(std::span<const TrigMode> modes) {
  ShearProfile p;
  int degree = 0;
  for (const auto& mode : modes) {
    if (mode.m < 1) throw InvalidArgument("profile mode index must be >= 1");
    if (!std::isfinite(mode.a) || !std::isfinite(mode.b)) {
      throw InvalidArgument("profile coefficients must be finite");
    }
    degree = std::max(degree, mode.m);
  }
  p.cos_.assign(degree, 0.0);
  p.sin_.assign(degree, 0.0);
  for (const auto& mode : modes) {
    p.cos_[mode.m - 1] += mode.a;
    p.sin_[mode.m - 1] += mode.b;
  }
  while (!p.cos_.empty() && p.cos_.back() == 0.0 && p.sin_.back() == 0.0) {
    p.cos_.pop_back();
    p.sin_.pop_back();
  }
  if (p.cos_.empty()) throw InvalidArgument("profile must not be constant");
  return p;
}

ShearProfile ShearProfile::preset(std::string_view name) {
  if (name == "sin") {
    const TrigMode m[] = {{1, 0.0, 1.0}};
    return from_modes(m);
  }
  if (name == "cos") {
    const TrigMode m[] = {{1, 1.0, 0.0}};
    return from_modes(m);
  }
  if (name == "sin3") {
    const TrigMode m[] = {{1, 0.0, 0.75}, {3, 0.0, -0.25}};
    return from_modes(m);
  }
  if (name == "cos2") {
    const TrigMode m[] = {{2, 1.0, 0.0}};
    return from_modes(m);
  }
  if (name == "linear") return linear_debug(1.0);
  throw InvalidArgument("unknown profile preset '" + std::string(name) + "'");
}

ShearProfile ShearProfile::linear_debug(double slope) {
  if (!std::isfinite(slope) || slope == 0.0) {
    throw InvalidArgument("linear debug profile needs a finite nonzero slope");
  }
  ShearProfile p;
  p.linear_ = true;
  p.slope_ = slope;
  return p;
}

double ShearProfile::evaluate(double y, int d) const {
  if (d < 0 || d > kMaxDerivative) throw InvalidArgument("derivative order out of range");
  if (linear_) {
    if (d == 0) return slope_ * y;
    return d == 1 ? slope_ : 0.0;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < cos_.size(); ++i) {
    const double a = cos_[i];
    const double b = sin_[i];
    if (a == 0.0 && b == 0.0) continue;
    const double m = static_cast<double>(i + 1);
    const double c = std::cos(m * y);
    const double s = std::sin(m * y);
    double term = 0.0;
    switch (d % 4) {
      case 0: term = a * c + b * s; break;
      case 1: term = -a * s + b * c; break;
      case 2: term = -a * c - b * s; break;
      default: term = a * s - b * c; break;
    }
    sum += std::pow(m, d) * term;
  }
  return sum;
}

std::vector<TrigMode> ShearProfile::modes() const {
  std::vector<TrigMode> out;
  for (std::size_t i = 0; i < cos_.size(); ++i) {
    if (cos_[i] != 0.0 || sin_[i] != 0.0) {
      out.push_back({static_cast<int>(i + 1), cos_[i], sin_[i]});
    }
  }
  return out;
}

double ShearProfile::coefficient_bound(int d) const {
  if (linear_) {
    if (d == 0) return std::numeric_limits<double>::infinity();
    return d == 1 ? std::abs(slope_) : 0.0;
  }
  double bound = 0.0;
  for (std::size_t i = 0; i < cos_.size(); ++i) {
    bound += std::pow(static_cast<double>(i + 1), d) * std::hypot(cos_[i], sin_[i]);
  }
  return bound;
}

double torus_distance(double a, double b) {
  const double d = std::abs(wrap(a) - wrap(b));
  return std::min(d, kTwoPi - d);
}

std::vector<CriticalPoint> critical_points(const ShearProfile& profile, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("root tolerance must be positive");
  if (!profile.periodic()) return {};

  const double accept = 1e-9 * profile.coefficient_bound(1);
  std::vector<double> candidates = bracketed_roots(profile, 1, tol);
  for (double y : bracketed_roots(profile, 2, tol)) {
    if (std::abs(profile.evaluate(y, 1)) <= accept) candidates.push_back(y);
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<double> roots;
  for (double y : candidates) {
    auto same = std::find_if(roots.begin(), roots.end(),
                             [&](double r) { return torus_distance(r, y) < 1e-8; });
    if (same == roots.end()) {
      roots.push_back(y);
    } else if (std::abs(profile.evaluate(y, 1)) < std::abs(profile.evaluate(*same, 1))) {
      *same = y;
    }
  }
  std::sort(roots.begin(), roots.end());

  std::vector<CriticalPoint> points;
  points.reserve(roots.size());
  for (double y : roots) {
    CriticalPoint cp;
    cp.location = y;
    cp.order = detect_order(profile, y);
    points.push_back(cp);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    double gap = std::numbers::pi;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j != i) gap = std::min(gap, torus_distance(points[i].location, points[j].location));
    }
    certify_radius(profile, points[i], 0.5 * gap);
  }
  return points;
}

int max_order(const ShearProfile& profile) {
  int n0 = 0;
  for (const auto& cp : critical_points(profile)) n0 = std::max(n0, cp.order);
  return n0;
}

std::vector<PresetInfo> list_presets() {
  struct Entry {
    const char* name;
    const char* formula;
  };
  static constexpr Entry kEntries[] = {
      {"sin", "u(y) = sin y"},
      {"sin3", "u(y) = (3 sin y - sin 3y)/4 = sin^3 y"},
      {"cos", "u(y) = cos y, critical point at y = 0"},
      {"cos2", "u(y) = cos 2y"},
      {"linear", "u(y) = y, non-periodic debug profile with u' = 1"},
  };
  std::vector<PresetInfo> out;
  for (const auto& e : kEntries) {
    std::ostringstream desc;
    desc << e.formula << "; n0 = " << max_order(ShearProfile::preset(e.name));
    out.push_back({e.name, desc.str()});
  }
  return out;
}

}  // namespace shearlab
