#include "shearlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <json.hpp>

#include "shearlab/error.hpp"

namespace shearlab {
namespace {

// OLS on already transformed coordinates.
FitResult ols(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double xbar = 0.0;
  double ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= static_cast<double>(n);
  ybar /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - xbar;
    const double dy = y[i] - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit needs at least two distinct x values");
  FitResult fit;
  fit.n_points = static_cast<int>(n);
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += r * r;
  }
  fit.slope_stderr = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  return fit;
}

void require_points(std::span<const XY> points) {
  if (points.size() < 3) throw InvalidArgument("fit needs at least 3 points");
  for (const auto& [x, y] : points) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw InvalidArgument("fit points must be finite");
  }
}

nlohmann::ordered_json fit_json(const AxisFit& a, const char* fixed_name) {
  return {{fixed_name, a.fixed},
          {"slope", a.fit.slope},
          {"intercept", a.fit.intercept},
          {"slope_stderr", a.fit.slope_stderr},
          {"r_squared", a.fit.r_squared},
          {"n_points", a.fit.n_points},
          {"target", a.target},
          {"tolerance", a.tolerance},
          {"pass", a.pass}};
}

}  // namespace

FitResult fit_linear(std::span<const XY> points) {
  require_points(points);
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [px, py] : points) {
    x.push_back(px);
    y.push_back(py);
  }
  return ols(x, y);
}

FitResult fit_power_law(std::span<const XY> points) {
  require_points(points);
  std::vector<double> lx;
  std::vector<double> ly;
  int e0 = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [x, y] = points[i];
    if (!(x > 0.0) || !(y > 0.0)) throw InvalidArgument("power-law fit needs positive x and y");
    int e = 0;
    const double mantissa = std::frexp(y, &e);
    if (i == 0) e0 = e;
    lx.push_back(std::log(x));
    ly.push_back(std::log(mantissa) + (e - e0) * std::numbers::ln2);
  }
  FitResult fit = ols(lx, ly);
  fit.intercept += e0 * std::numbers::ln2;
  return fit;
}

ExponentTargets theorem_targets(int n0) {
  if (n0 < 1) throw InvalidArgument("exponent targets need a critical point of order n0 >= 1");
  const double d = n0 + 3.0;
  return {-(n0 + 1.0) / d, -2.0 / d};
}

ExponentReport exponent_report(std::span<const DecayPoint> scan, int n0,
                               const ExponentOptions& options) {
  ExponentReport report;
  report.experiment = options.experiment;
  report.n0 = n0;
  report.targets = theorem_targets(n0);
  report.options = options;

  std::map<int, std::vector<XY>> by_k;
  std::map<double, std::vector<XY>> by_nu;
  for (const auto& p : scan) {
    if (p.k < 1 || !(p.nu > 0.0)) throw InvalidArgument("scan rows need k >= 1 and nu > 0");
    if (!p.t_star || !(*p.t_star > 0.0)) continue;
    if (p.nu / p.k > options.nu_tilde) continue;
    by_k[p.k].emplace_back(p.nu, *p.t_star);
    by_nu[p.nu].emplace_back(static_cast<double>(p.k), *p.t_star);
  }

  auto best = [](const auto& groups) {
    const std::vector<XY>* chosen = nullptr;
    double key = 0.0;
    for (const auto& [fixed, pts] : groups) {
      if (pts.size() >= 4 && (!chosen || pts.size() > chosen->size())) {
        chosen = &pts;
        key = static_cast<double>(fixed);
      }
    }
    return std::make_pair(chosen, key);
  };

  if (const auto [pts, k] = best(by_k); pts) {
    AxisFit a;
    a.fixed = k;
    a.fit = fit_power_law(*pts);
    a.target = report.targets.nu_slope;
    a.tolerance = options.nu_slope_tol;
    a.pass = std::abs(a.fit.slope - a.target) <= a.tolerance;
    report.nu_fit = a;
  }
  if (const auto [pts, nu] = best(by_nu); pts) {
    AxisFit a;
    a.fixed = nu;
    a.fit = fit_power_law(*pts);
    a.target = report.targets.k_slope;
    a.tolerance = options.k_slope_tol;
    a.pass = std::abs(a.fit.slope - a.target) <= a.tolerance;
    report.k_fit = a;
  }
  if (!report.nu_fit && !report.k_fit) {
    throw InvalidArgument("insufficient grid: need 4 reached points along nu or k");
  }
  report.pass = (!report.nu_fit || report.nu_fit->pass) && (!report.k_fit || report.k_fit->pass);
  return report;
}

std::string ExponentReport::to_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["n0"] = n0;
  j["targets"] = {{"nu_slope", targets.nu_slope}, {"k_slope", targets.k_slope}};
  nlohmann::ordered_json fits = nlohmann::ordered_json::object();
  fits["nu"] = nu_fit ? fit_json(*nu_fit, "fixed_k") : nlohmann::ordered_json(nullptr);
  fits["k"] = k_fit ? fit_json(*k_fit, "fixed_nu") : nlohmann::ordered_json(nullptr);
  j["fits"] = fits;
  j["pass"] = pass;
  j["tolerances"] = {{"nu_slope", options.nu_slope_tol},
                     {"k_slope", options.k_slope_tol},
                     {"nu_tilde", options.nu_tilde}};
  return j.dump(2);
}

GevreyFit gevrey_fit(std::span<const std::pair<int, double>> mode_norms, int n0) {
  if (n0 < 1) throw InvalidArgument("Gevrey fit needs n0 >= 1");
  const double power = 2.0 / (n0 + 3.0);
  GevreyFit out;
  std::vector<XY> points;
  for (const auto& [k, norm] : mode_norms) {
    if (k < 1) throw InvalidArgument("Gevrey fit needs modes k >= 1");
    if (!(norm <= 1.0 + 1e-12) || !std::isfinite(norm)) {
      throw InvalidArgument("mode norms must lie in (0, 1]");
    }
    if (norm <= kNormFloor) {
      ++out.excluded;
      continue;
    }
    points.emplace_back(std::pow(static_cast<double>(k), power), std::log(norm));
  }
  if (points.size() < 4) throw InvalidArgument("Gevrey fit needs 4 modes above the solver floor");
  out.fit = fit_linear(points);
  out.lambda = 0.0 - out.fit.slope;
  return out;
}

CrosscheckResult bound_crosscheck(double spectral_norm, double skorokhod_total,
                                  double skorokhod_stderr, int k) {
  if (k < 1) throw InvalidArgument("crosscheck needs k >= 1");
  if (!(spectral_norm >= 0.0) || !std::isfinite(skorokhod_total) || !(skorokhod_stderr >= 0.0)) {
    throw InvalidArgument("crosscheck inputs must be finite with nonnegative norm and stderr");
  }
  CrosscheckResult r;
  r.spectral_norm = spectral_norm;
  r.bound = std::sqrt(std::max(skorokhod_total, 0.0)) / k;
  const double rel = skorokhod_total > 0.0 ? skorokhod_stderr / skorokhod_total : 0.0;
  r.allowance = r.bound * (1.0 + 3.0 * rel);
  r.vacuous = r.bound >= 1.0;
  r.pass = r.vacuous || spectral_norm <= r.allowance;
  return r;
}

CrosscheckResult bound_crosscheck(double spectral_norm, const CrosscheckParams& spectral,
                                  double skorokhod_total, double skorokhod_stderr,
                                  const CrosscheckParams& skorokhod) {
  if (!(spectral == skorokhod)) throw InvalidArgument("crosscheck inputs were computed at different parameters");
  return bound_crosscheck(spectral_norm, skorokhod_total, skorokhod_stderr, spectral.k);
}

}  // namespace shearlab
