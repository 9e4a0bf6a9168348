// Acceptance suite: one [PASS]/[FAIL] line per criterion. Tolerances are
// fixed here and do not come from the configs being checked.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shearlab/config.hpp"
#include "shearlab/experiment.hpp"
#include "shearlab/malliavin.hpp"
#include "shearlab/stochastic.hpp"

using namespace shearlab;
using Json = nlohmann::json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Suite {
  std::filesystem::path out;
  int workers = 1;
  int rerun_workers = 3;
  // Criterion id -> CSV bodies of the first run, compared by criterion 12.
  std::map<int, std::map<std::string, std::string>> bodies;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

ExperimentConfig shipped(const std::string& name, const Suite& s, int workers, const std::string& run) {
  auto c = load_config(std::string(SHEARLAB_CONFIG_DIR) + "/" + name + ".cfg");
  c.workers = workers;
  c.output_dir = (s.out / run / name).string();
  return c;
}

// Runs a shipped config and returns its outcome; a non-passing exit code is
// reported in the detail by the caller.
ExperimentOutcome run_shipped(int id, const std::string& name, Suite& s) {
  auto outcome = run_experiment(shipped(name, s, s.workers, "run1"));
  s.bodies[id] = outcome.csv;
  return outcome;
}

std::string outcome_note(const ExperimentOutcome& o) {
  if (o.exit_code == kExitPass) return "";
  return " (exit " + std::to_string(o.exit_code) + (o.error.empty() ? "" : ": " + o.error) + ")";
}

// 1. Linear shear u' = c: every Malliavin quantity has a closed form.
std::string couette_csv(double& worst) {
  const double c = 1.5;
  const double nu = 0.01;
  const int m = 1 << 12;
  const auto u = ShearProfile::linear_debug(c);
  std::ostringstream csv;
  csv << "t,detM,detM_exact,nu_int_Yg,max_kernel,term1,term1_exact,max_g_err\n";
  csv.precision(17);
  worst = 0.0;
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    const auto path = sample_path(12, 0, t / m, m);
    const auto s = malliavin_sample(u, 0.0, nu, t, path, true);
    const double det_exact = c * c * t * t * t / 12;
    double g_err = 0.0;
    double yg = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double r = i * path.dt;
      g_err = std::max(g_err, std::abs(s.g[i] - c * (t / 2 - r)) / (c * t / 2));
      yg += (i == 0 || i == m ? 0.5 : 1.0) * s.Y[i] * s.g[i];
    }
    yg *= nu * path.dt;
    const MalliavinSample one[] = {s};
    const auto est = skorokhod_variance(one, true);
    const double term1_exact = 12 / (nu * c * c * t * t * t);
    const double kmax = s.kernel->values.cwiseAbs().maxCoeff();
    worst = std::max({worst, rel_err(s.detM, det_exact), std::abs(yg - 1.0), g_err, rel_err(est.term1, term1_exact),
                      kmax, std::abs(est.term2)});
    csv << t << ',' << s.detM << ',' << det_exact << ',' << yg << ',' << kmax << ',' << est.term1 << ','
        << term1_exact << ',' << g_err << '\n';
  }
  return csv.str();
}

Verdict check_couette(Suite& s) {
  double worst = 0.0;
  const auto body = couette_csv(worst);
  s.bodies[1]["couette.csv"] = body;
  std::filesystem::create_directories(s.out / "run1");
  std::ofstream(s.out / "run1" / "couette.csv") << body;
  return {worst <= 1e-6, "max rel err " + fmt("%.2e", worst) + " <= 1e-6"};
}

Verdict exponent(int id, const std::string& name, const char* axis, double target, Suite& s) {
  const auto o = run_shipped(id, name, s);
  if (o.summary_json.empty()) return {false, "no summary" + outcome_note(o)};
  const auto j = Json::parse(o.summary_json);
  const auto& fit = j["fits"][axis];
  if (fit.is_null()) return {false, std::string("no ") + axis + "-fit" + outcome_note(o)};
  const double slope = fit["slope"];
  const bool ok = within(slope, target, 0.1);
  return {ok && o.exit_code == kExitPass,
          std::string(axis) + "-slope " + fmt("%.4f", slope) + " (target " + fmt("%.2f", target) + " +- 0.1, r2 " +
              fmt("%.4f", fit["r_squared"].get<double>()) + ")" + outcome_note(o)};
}

Verdict check_gevrey(Suite& s) {
  const auto o = run_shipped(5, "sin-gevrey", s);
  if (o.summary_json.empty()) return {false, "no summary" + outcome_note(o)};
  const auto j = Json::parse(o.summary_json);
  double worst = 1.0;
  for (const auto& f : j["fits"]) worst = std::min(worst, f["fit"]["r_squared"].get<double>());
  return {worst >= 0.95 && o.exit_code == kExitPass, "r2 " + fmt("%.5f", worst) + " >= 0.95" + outcome_note(o)};
}

Verdict check_feynman_kac(Suite& s) {
  const auto o = run_shipped(6, "fk-sin", s);
  if (o.summary_json.empty()) return {false, "no summary" + outcome_note(o)};
  const double z = Json::parse(o.summary_json)["max_z"];
  return {z <= 3.0 && o.exit_code == kExitPass, "max |z| " + fmt("%.3f", z) + " <= 3" + outcome_note(o)};
}

// Collects fitted slopes of an MC summary by axis.
std::map<std::string, double> mc_slopes(const Json& j) {
  std::map<std::string, double> out;
  for (const auto& f : j["fits"]) out[f["axis"].get<std::string>()] = f["fit"]["slope"];
  return out;
}

Verdict check_inverse_moment_scaling(Suite& s) {
  const auto o = run_shipped(7, "cos-inverse-moment", s);
  if (o.summary_json.empty()) return {false, "no summary" + outcome_note(o)};
  const auto j = Json::parse(o.summary_json);
  const auto slopes = mc_slopes(j);
  if (!slopes.count("t") || !slopes.count("nu")) return {false, "missing fit" + outcome_note(o)};
  const double frac = j["degenerate_fraction"];
  const bool ok = within(slopes.at("t"), -4.0, 0.5) && within(slopes.at("nu"), -1.0, 0.3) && frac <= 1e-4;
  return {ok && o.exit_code == kExitPass, "t-slope " + fmt("%.3f", slopes.at("t")) + " (-4 +- 0.5), nu-slope " +
                                              fmt("%.3f", slopes.at("nu")) + " (-1 +- 0.3), degenerate " +
                                              fmt("%.2e", frac) + outcome_note(o)};
}

Verdict check_skorokhod_scaling(Suite& s) {
  const auto o = run_shipped(8, "cos-skorokhod", s);
  if (o.summary_json.empty()) return {false, "no summary" + outcome_note(o)};
  const auto j = Json::parse(o.summary_json);
  const auto slopes = mc_slopes(j);
  if (!slopes.count("t")) return {false, "missing fit" + outcome_note(o)};
  const long violations = j["entry_envelope_violations"].get<long>() + j["cross_envelope_violations"].get<long>();
  const bool ok = within(slopes.at("t"), -4.0, 0.5) && violations == 0;
  return {ok && o.exit_code == kExitPass, "t-slope " + fmt("%.3f", slopes.at("t")) + " (-4 +- 0.5), envelope violations " +
                                              std::to_string(violations) + outcome_note(o)};
}

// 9. D_z W_r against a central difference of W along a Cameron-Martin
// direction concentrated on a short window of z.
std::string kernel_oracle_csv(double& worst) {
  const auto u = ShearProfile::preset("sin");
  const double nu = 0.05;
  const int m = 128;
  const double eps = 1e-5;
  const int width = 4;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> pick_a(0, m - width);
  std::uniform_int_distribution<int> pick_r(0, m);
  auto weight = [&](double y, const BrownianPath& p) {
    const auto g = g_function(u, y, nu, p, p.horizon());
    return skorokhod_weight(g, malliavin_det(g, p.dt), nu);
  };
  auto ramped = [&](const BrownianPath& p, int a, double e) {
    BrownianPath q = p;
    for (int j = 0; j <= p.n_steps; ++j) q.values[j] += e * std::clamp(static_cast<double>(j - a) / width, 0.0, 1.0);
    return q;
  };
  std::ostringstream csv;
  csv.precision(17);
  csv << "path,y,z_window,r,analytic,finite_difference,rel_err\n";
  worst = 0.0;
  for (int p = 0; p < 10; ++p) {
    const auto path = sample_path(21, p, 4.0 / m, m);
    const double y = 0.3 + 0.5 * p;
    const auto kernel = *malliavin_sample(u, y, nu, path.horizon(), path, true).kernel;
    const double scale = kernel.values.cwiseAbs().maxCoeff();
    for (int trial = 0; trial < 10; ++trial) {
      const int a = pick_a(rng);
      const int r = pick_r(rng);
      const double fd = (weight(y, ramped(path, a, eps))[r] - weight(y, ramped(path, a, -eps))[r]) / (2 * eps);
      double analytic = 0.0;
      for (int l = a + 1; l <= a + width; ++l) analytic += kernel.at(l, r) / width;
      const double err = std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-2 * scale);
      worst = std::max(worst, err);
      csv << p << ',' << y << ',' << a << ',' << r << ',' << analytic << ',' << fd << ',' << err << '\n';
    }
  }
  return csv.str();
}

Verdict check_kernel_oracle(Suite& s) {
  double worst = 0.0;
  const auto body = kernel_oracle_csv(worst);
  s.bodies[9]["kernel_oracle.csv"] = body;
  std::ofstream(s.out / "run1" / "kernel_oracle.csv") << body;
  return {worst <= 1e-3, "max rel err " + fmt("%.2e", worst) + " <= 1e-3 over 100 (z, r) pairs"};
}

Verdict check_crosscheck(Suite& s) {
  const auto o = run_shipped(10, "sin-crosscheck", s);
  if (o.summary_json.empty()) return {false, "no summary" + outcome_note(o)};
  const auto j = Json::parse(o.summary_json);
  bool all = true;
  bool t10_nonvacuous = false;
  std::string detail;
  for (const auto& c : j["checks"]) {
    all = all && c["pass"].get<bool>();
    const double t = c["t"];
    if (t == 10.0 && !c["vacuous"].get<bool>()) t10_nonvacuous = true;
    detail += "t=" + fmt("%g", t) + ": norm " + fmt("%.3e", c["spectral_norm"].get<double>()) + " bound " +
              fmt("%.3e", c["bound"].get<double>()) + (c["vacuous"].get<bool>() ? " (vacuous)" : "") + "; ";
  }
  detail += t10_nonvacuous ? "non-vacuous at t=10" : "bound vacuous at t=10";
  return {all && t10_nonvacuous && o.exit_code == kExitPass, detail + outcome_note(o)};
}

// 11. Random trigonometric polynomials on [0, t] against the interpolation
// inequality with grid sup norms and grid Hoelder constants.
std::string interpolation_csv(long& violations) {
  std::mt19937_64 rng(1729);
  std::uniform_int_distribution<int> degree(1, 8);
  std::normal_distribution<double> coeff;
  std::uniform_real_distribution<double> log_t(std::log(0.1), std::log(10.0));
  const int n = 513;
  std::ostringstream csv;
  csv.precision(17);
  csv << "trial,degree,t,alpha,holds\n";
  violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = degree(rng);
    std::vector<double> a(d + 1);
    std::vector<double> b(d + 1);
    for (int j = 1; j <= d; ++j) {
      a[j] = coeff(rng) / j;
      b[j] = coeff(rng) / j;
    }
    const double t = std::exp(log_t(rng));
    std::vector<double> f(n);
    std::vector<double> df(n);
    for (int i = 0; i < n; ++i) {
      const double x = t * i / (n - 1);
      for (int j = 1; j <= d; ++j) {
        f[i] += a[j] * std::cos(j * x) + b[j] * std::sin(j * x);
        df[i] += j * (b[j] * std::cos(j * x) - a[j] * std::sin(j * x));
      }
    }
    for (double alpha : {0.25, 0.5, 1.0}) {
      const bool holds = check_interpolation(f, df, t, alpha);
      violations += holds ? 0 : 1;
      csv << trial << ',' << d << ',' << t << ',' << alpha << ',' << (holds ? 1 : 0) << '\n';
    }
  }
  return csv.str();
}

Verdict check_interpolation_sweep(Suite& s) {
  long violations = 0;
  const auto body = interpolation_csv(violations);
  s.bodies[11]["interpolation.csv"] = body;
  std::ofstream(s.out / "run1" / "interpolation.csv") << body;
  return {violations == 0, std::to_string(violations) + " violations in 3000 checks"};
}

Verdict check_reproducibility(Suite& s) {
  const std::map<int, std::string> configs = {{2, "sin-n0-1"}, {3, "sin3-n0-2"}, {4, "sin-k-scan"},
                                              {5, "sin-gevrey"}, {6, "fk-sin"}, {7, "cos-inverse-moment"},
                                              {8, "cos-skorokhod"}, {10, "sin-crosscheck"}};
  std::vector<std::string> mismatched;
  int compared = 0;
  for (const auto& [id, first] : s.bodies) {
    std::map<std::string, std::string> second;
    double unused = 0.0;
    long unused_count = 0;
    if (id == 1) second["couette.csv"] = couette_csv(unused);
    if (id == 9) second["kernel_oracle.csv"] = kernel_oracle_csv(unused);
    if (id == 11) second["interpolation.csv"] = interpolation_csv(unused_count);
    if (configs.count(id)) second = run_experiment(shipped(configs.at(id), s, s.rerun_workers, "run2")).csv;
    ++compared;
    if (second != first || first.empty()) mismatched.push_back(std::to_string(id));
  }
  if (compared == 0) return {false, "no runs to compare"};
  std::string detail = std::to_string(compared) + " runs rerun with " + std::to_string(s.rerun_workers) +
                       " workers (first run " + std::to_string(s.workers) + ")";
  if (!mismatched.empty()) {
    detail += "; differing CSV bodies in criteria";
    for (const auto& m : mismatched) detail += " " + m;
  }
  return {mismatched.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  Suite suite;
  std::string out = "acceptance-runs";
  std::vector<int> only;
  app.add_option("--out", out, "Directory for run artifacts");
  app.add_option("--only", only, "Criteria to run (default: all)")->check(CLI::Range(1, 12));
  app.add_option("--workers", suite.workers, "Workers for the first run")->check(CLI::PositiveNumber);
  app.add_option("--rerun-workers", suite.rerun_workers, "Workers for the reproducibility rerun")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  suite.out = out;
  std::filesystem::create_directories(suite.out / "run1");

  const std::vector<std::pair<std::string, std::function<Verdict(Suite&)>>> criteria = {
      {"analytic linear shear", check_couette},
      {"nu-exponent, n0 = 1", [](Suite& s) { return exponent(2, "sin-n0-1", "nu", -0.5, s); }},
      {"nu-exponent, n0 = 2", [](Suite& s) { return exponent(3, "sin3-n0-2", "nu", -0.6, s); }},
      {"k-exponent", [](Suite& s) { return exponent(4, "sin-k-scan", "k", -0.5, s); }},
      {"Gevrey linearity", check_gevrey},
      {"Feynman-Kac vs spectral", check_feynman_kac},
      {"inverse-moment scaling", check_inverse_moment_scaling},
      {"Skorokhod variance scaling", check_skorokhod_scaling},
      {"kernel finite-difference oracle", check_kernel_oracle},
      {"bound cross-check", check_crosscheck},
      {"interpolation inequality sweep", check_interpolation_sweep},
      {"reproducibility across worker counts", check_reproducibility},
  };
  const std::set<int> selected(only.begin(), only.end());

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i].second(suite);
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << id << ". " << criteria[i].first << ": " << v.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
