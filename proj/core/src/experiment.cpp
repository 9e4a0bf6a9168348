#include "shearlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "shearlab/analysis.hpp"
#include "shearlab/malliavin.hpp"
#include "shearlab/parallel.hpp"
#include "shearlab/spectral.hpp"
#include "shearlab/stochastic.hpp"
#include "shearlab/version.hpp"

namespace shearlab {
namespace {

using Json = nlohmann::ordered_json;

std::string real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> columns) {
    bool first = true;
    for (const char* c : columns) {
      text_ += first ? "" : ",";
      text_ += c;
      first = false;
    }
    text_ += '\n';
  }

  Csv& operator<<(double x) { return cell(real(x)); }
  Csv& operator<<(int x) { return cell(std::to_string(x)); }
  Csv& operator<<(long x) { return cell(std::to_string(x)); }
  Csv& operator<<(bool x) { return cell(x ? "true" : "false"); }
  Csv& operator<<(const std::string& x) { return cell(x); }
  Csv& operator<<(std::optional<double> x) { return cell(x ? real(*x) : std::string()); }

  void end_row() {
    text_ += '\n';
    fresh_ = true;
  }
  [[nodiscard]] const std::string& str() const { return text_; }

 private:
  Csv& cell(const std::string& s) {
    if (!fresh_) text_ += ',';
    text_ += s;
    fresh_ = false;
    return *this;
  }
  std::string text_;
  bool fresh_ = true;
};

struct EngineResult {
  Json summary;
  bool pass = true;
  std::map<std::string, std::string> csv;
};

class Log {
 public:
  explicit Log(std::ostream* out) : out_(out) {}
  template <typename... Args>
  void operator()(const Args&... args) const {
    if (!out_) return;
    ((*out_) << ... << args) << '\n';
    out_->flush();
  }

 private:
  std::ostream* out_;
};

MonteCarloOptions mc_options(const ExperimentConfig& c) {
  MonteCarloOptions o;
  o.n_steps = c.n_steps;
  o.workers = c.workers;
  o.bootstrap_resamples = c.bootstrap_resamples;
  return o;
}

Json fit_json(const FitResult& f) {
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"slope_stderr", f.slope_stderr},
          {"r_squared", f.r_squared},
          {"n_points", f.n_points}};
}

// Order of the critical point at y, or 0 when y is not one.
int local_order(const std::vector<CriticalPoint>& cps, double y) {
  for (const auto& cp : cps) {
    if (torus_distance(cp.location, y) < 1e-6) return cp.order;
  }
  return 0;
}

EngineResult run_solve(const ExperimentConfig& c, const Log& log) {
  const auto profile = c.shear_profile();
  const auto datum = c.datum();
  struct Row {
    double t, nu, x, y;
  };
  std::vector<Row> rows;
  for (double t : c.t_grid) {
    for (double nu : c.nu_grid) {
      for (const auto& [x, y] : c.xy_points) rows.push_back({t, nu, x, y});
    }
  }
  std::vector<double> values(rows.size());
  parallel_for(rows.size(), c.workers, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t i = b; i < e; ++i) {
      values[i] = spectral_solution(profile, datum, rows[i].t, rows[i].nu, c.n_y, rows[i].x, rows[i].y);
    }
  });
  Csv csv{"profile", "t", "nu", "x", "y", "value"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv << c.profile << rows[i].t << rows[i].nu << rows[i].x << rows[i].y << values[i];
    csv.end_row();
  }
  log("solve: ", rows.size(), " points");
  EngineResult r;
  r.summary = {{"experiment", c.name}, {"engine", "solve"}, {"points", rows.size()}, {"pass", true}};
  r.csv["solve.csv"] = csv.str();
  return r;
}

EngineResult run_spectral_scan(const ExperimentConfig& c, const Log& log) {
  const auto profile = c.shear_profile();
  const int n0 = max_order(profile);
  std::vector<DecayPoint> scan;
  for (int k : c.k_grid) {
    for (double nu : c.nu_grid) scan.push_back({k, nu, std::nullopt});
  }
  parallel_for(scan.size(), c.workers, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t i = b; i < e; ++i) {
      scan[i].t_star = decay_time(ModeProblem{scan[i].k, scan[i].nu, c.n_y, profile}, c.theta);
    }
  });

  Csv csv{"profile_name", "k", "nu", "n_y", "theta", "t_star", "reached"};
  for (const auto& p : scan) {
    csv << c.profile << p.k << p.nu << c.n_y << c.theta << p.t_star << p.t_star.has_value();
    csv.end_row();
    log("decay k=", p.k, " nu=", real(p.nu), " t*=", p.t_star ? real(*p.t_star) : "not reached");
  }

  EngineResult r;
  r.csv["decay_scan.csv"] = csv.str();

  if (!c.t_grid.empty()) {
    std::vector<std::vector<NormPoint>> curves(scan.size());
    parallel_for(scan.size(), c.workers, [&](std::size_t b, std::size_t e, int) {
      for (std::size_t i = b; i < e; ++i) {
        std::vector<double> times;
        for (double t : c.t_grid) {
          if (t <= 1.0 / scan[i].nu) times.push_back(t);
        }
        std::sort(times.begin(), times.end());
        curves[i] = norm_curve(ModeProblem{scan[i].k, scan[i].nu, c.n_y, profile}, times);
      }
    });
    Csv curve_csv{"profile_name", "k", "nu", "t", "norm"};
    for (std::size_t i = 0; i < scan.size(); ++i) {
      for (const auto& pt : curves[i]) {
        curve_csv << c.profile << scan[i].k << scan[i].nu << pt.t << pt.norm;
        curve_csv.end_row();
      }
    }
    r.csv["norm_curves.csv"] = curve_csv.str();
  }

  ExponentOptions opts;
  opts.experiment = c.name.empty() ? std::string(engine_name(c.engine)) : c.name;
  opts.nu_slope_tol = c.nu_slope_tol;
  opts.k_slope_tol = c.k_slope_tol;
  opts.nu_tilde = c.nu_tilde;
  const auto report = exponent_report(scan, n0, opts);
  r.summary = Json::parse(report.to_json());
  r.pass = report.pass;
  return r;
}

EngineResult run_gevrey_scan(const ExperimentConfig& c, const Log& log) {
  const auto profile = c.shear_profile();
  const int n0 = max_order(profile);
  struct Row {
    int k;
    double nu, t, norm;
  };
  std::vector<Row> rows;
  for (double nu : c.nu_grid) {
    const double t = c.gevrey_time.value_or(1.0 / std::sqrt(nu));
    for (int k : c.k_grid) rows.push_back({k, nu, t, 0.0});
  }
  parallel_for(rows.size(), c.workers, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t i = b; i < e; ++i) {
      const auto gen = build_generator(ModeProblem{rows[i].k, rows[i].nu, c.n_y, profile});
      rows[i].norm = semigroup_norm(propagate(gen, rows[i].t));
    }
  });

  Csv csv{"profile_name", "k", "nu", "t", "norm"};
  for (const auto& row : rows) {
    csv << c.profile << row.k << row.nu << row.t << row.norm;
    csv.end_row();
  }

  EngineResult r;
  Json fits = Json::array();
  for (double nu : c.nu_grid) {
    std::vector<std::pair<int, double>> norms;
    double t = 0.0;
    for (const auto& row : rows) {
      if (row.nu == nu) {
        norms.emplace_back(row.k, row.norm);
        t = row.t;
      }
    }
    const auto g = gevrey_fit(norms, n0);
    const bool pass = g.fit.r_squared >= c.r2_min;
    r.pass = r.pass && pass;
    log("gevrey nu=", real(nu), " t=", real(t), " lambda=", real(g.lambda), " r2=", real(g.fit.r_squared));
    Json f = {{"nu", nu}, {"t", t}, {"lambda", g.lambda}, {"excluded", g.excluded}};
    f["fit"] = fit_json(g.fit);
    f["pass"] = pass;
    fits.push_back(f);
  }
  r.summary = {{"experiment", c.name}, {"engine", "gevrey-scan"}, {"n0", n0},
               {"exponent", 2.0 / (n0 + 3.0)}, {"fits", fits},  {"pass", r.pass},
               {"tolerances", {{"r2_min", c.r2_min}}}};
  r.csv["gevrey.csv"] = csv.str();
  return r;
}

// (y, nu, t) points of a Monte Carlo scan. With slope_nu / slope_t set only
// the t-line at slope_nu and the nu-line at slope_t are evaluated.
struct McPoint {
  double y, nu, t;
};

std::vector<double> with_value(std::vector<double> grid, std::optional<double> v) {
  if (v && std::find(grid.begin(), grid.end(), *v) == grid.end()) grid.push_back(*v);
  return grid;
}

std::vector<McPoint> mc_points(const ExperimentConfig& c) {
  const bool restricted = c.slope_nu.has_value() || c.slope_t.has_value();
  std::vector<McPoint> pts;
  for (double y : c.y_grid) {
    for (double nu : with_value(c.nu_grid, c.slope_nu)) {
      for (double t : with_value(c.t_grid, c.slope_t)) {
        const bool on_t_line = c.slope_nu && nu == *c.slope_nu;
        const bool on_nu_line = c.slope_t && t == *c.slope_t;
        if (!restricted || on_t_line || on_nu_line) pts.push_back({y, nu, t});
      }
    }
  }
  return pts;
}

struct SlopeCheck {
  Json json;
  bool pass = true;
};

// Fits log value against log t along each (y, nu) line and against log nu
// along each (y, t) line that has at least three points.
SlopeCheck mc_slopes(const ExperimentConfig& c, const std::vector<McPoint>& pts,
                     const std::vector<double>& values, const std::vector<CriticalPoint>& cps,
                     double t_rate_offset, double nu_rate_offset, double p_scale) {
  SlopeCheck out;
  out.json = Json::array();
  auto add = [&](const char* axis, double y, double fixed, const std::vector<XY>& xy, double target,
                 double tol) {
    if (xy.size() < 3) return;
    for (const auto& [x, v] : xy) {
      if (!(v > 0.0)) throw ComputationError("Monte Carlo estimate is not positive; cannot fit a power law");
    }
    const auto fit = fit_power_law(xy);
    const bool pass = std::abs(fit.slope - target) <= tol;
    out.pass = out.pass && pass;
    Json j = {{"axis", axis}, {"y", y}, {std::string(axis) == "t" ? "nu" : "t", fixed},
              {"target", target}, {"tolerance", tol}};
    j["fit"] = fit_json(fit);
    j["pass"] = pass;
    out.json.push_back(j);
  };
  for (double y : c.y_grid) {
    const int n = local_order(cps, y);
    for (double nu : with_value(c.nu_grid, c.slope_nu)) {
      if (c.slope_nu && nu != *c.slope_nu) continue;
      std::vector<XY> xy;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].y == y && pts[i].nu == nu) xy.emplace_back(pts[i].t, values[i]);
      }
      add("t", y, nu, xy, -p_scale * (n + t_rate_offset), c.mc_slope_tol);
    }
    for (double t : with_value(c.t_grid, c.slope_t)) {
      if (c.slope_t && t != *c.slope_t) continue;
      std::vector<XY> xy;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].y == y && pts[i].t == t) xy.emplace_back(pts[i].nu, values[i]);
      }
      add("nu", y, t, xy, -p_scale * (n + nu_rate_offset), c.mc_nu_slope_tol);
    }
  }
  return out;
}

EngineResult run_inverse_moment(const ExperimentConfig& c, const Log& log) {
  const auto profile = c.shear_profile();
  const auto cps = critical_points(profile);
  const auto pts = mc_points(c);
  const auto opts = mc_options(c);
  Csv csv{"profile", "y", "nu", "t", "p", "n_samples", "estimate", "ci_lo", "ci_hi", "tail_frac"};
  std::vector<double> estimates;
  long degenerate = 0;
  for (const auto& pt : pts) {
    const auto res = inverse_moment(profile, pt.y, pt.nu, pt.t, c.p, c.n_samples, *c.seed, opts);
    degenerate += static_cast<long>(res.degenerate.size());
    estimates.push_back(res.estimate);
    csv << c.profile << pt.y << pt.nu << pt.t << c.p << c.n_samples << res.estimate << res.ci_lo
        << res.ci_hi << res.tail_fraction;
    csv.end_row();
    log("inverse moment y=", real(pt.y), " nu=", real(pt.nu), " t=", real(pt.t), " E=", real(res.estimate),
        " tail=", real(res.tail_fraction));
  }
  EngineResult r;
  r.csv["inverse_moment.csv"] = csv.str();
  // E detM^{-p} ~ t^{-p(n+3)} nu^{-p n} at a critical point of order n.
  auto slopes = c.p == 0 ? SlopeCheck{Json::array(), true} : mc_slopes(c, pts, estimates, cps, 3.0, 0.0, c.p);
  const long total = static_cast<long>(pts.size()) * c.n_samples;
  r.pass = slopes.pass;
  r.summary = {{"experiment", c.name},
               {"engine", "mc-inverse-moment"},
               {"n0", max_order(profile)},
               {"p", c.p},
               {"fits", slopes.json},
               {"degenerate_samples", degenerate},
               {"degenerate_fraction", total > 0 ? static_cast<double>(degenerate) / total : 0.0},
               {"pass", r.pass},
               {"tolerances", {{"t_slope", c.mc_slope_tol}, {"nu_slope", c.mc_nu_slope_tol}}}};
  return r;
}

struct SkorokhodRow {
  McPoint pt;
  SkorokhodEstimate est;
};

Csv skorokhod_csv(const std::string& profile, const std::vector<SkorokhodRow>& rows) {
  Csv csv{"profile", "y", "nu", "t", "term1", "term2", "stderr1", "stderr2"};
  for (const auto& row : rows) {
    csv << profile << row.pt.y << row.pt.nu << row.pt.t << row.est.term1 << row.est.term2
        << row.est.std_error1 << row.est.std_error2;
    csv.end_row();
  }
  return csv;
}

EngineResult run_skorokhod(const ExperimentConfig& c, const Log& log) {
  const auto profile = c.shear_profile();
  const auto cps = critical_points(profile);
  const auto pts = mc_points(c);
  const auto opts = mc_options(c);
  std::vector<SkorokhodRow> rows;
  std::vector<double> totals;
  long entry_violations = 0;
  long cross_violations = 0;
  for (const auto& pt : pts) {
    const auto est = skorokhod_scan(profile, pt.y, pt.nu, pt.t, c.n_samples, *c.seed, c.with_kernel, opts);
    rows.push_back({pt, est});
    totals.push_back(est.total());
    entry_violations += est.entry_envelope_violations;
    cross_violations += est.cross_envelope_violations;
    log("skorokhod y=", real(pt.y), " nu=", real(pt.nu), " t=", real(pt.t), " term1=", real(est.term1),
        " term2=", real(est.term2));
  }
  EngineResult r;
  r.csv["skorokhod.csv"] = skorokhod_csv(c.profile, rows).str();
  // E (delta W)^2 ~ t^{-(n+3)} nu^{-(n+1)} at a critical point of order n.
  const auto slopes = mc_slopes(c, pts, totals, cps, 3.0, 1.0, 1.0);
  r.pass = slopes.pass && entry_violations == 0 && cross_violations == 0;
  r.summary = {{"experiment", c.name},
               {"engine", "mc-skorokhod"},
               {"n0", max_order(profile)},
               {"with_kernel", c.with_kernel},
               {"fits", slopes.json},
               {"entry_envelope_violations", entry_violations},
               {"cross_envelope_violations", cross_violations},
               {"pass", r.pass},
               {"tolerances", {{"t_slope", c.mc_slope_tol}, {"nu_slope", c.mc_nu_slope_tol}}}};
  return r;
}

EngineResult run_feynman_kac(const ExperimentConfig& c, const Log& log) {
  const auto profile = c.shear_profile();
  const auto datum = c.datum();
  const auto opts = mc_options(c);
  Csv csv{"profile", "t", "nu", "x", "y", "spectral", "estimate", "std_error", "z"};
  EngineResult r;
  double worst = 0.0;
  for (double t : c.t_grid) {
    for (double nu : c.nu_grid) {
      for (const auto& [x, y] : c.xy_points) {
        const double exact = spectral_solution(profile, datum, t, nu, c.n_y, x, y);
        const auto est = feynman_kac(profile, datum, t, nu, x, y, c.n_samples, *c.seed, opts);
        const double diff = std::abs(est.value - exact);
        const double z = est.std_error > 0.0 ? diff / est.std_error : (diff == 0.0 ? 0.0 : INFINITY);
        worst = std::max(worst, z);
        r.pass = r.pass && z <= c.fk_sigma;
        csv << c.profile << t << nu << x << y << exact << est.value << est.std_error << z;
        csv.end_row();
        log("feynman-kac t=", real(t), " nu=", real(nu), " (", real(x), ", ", real(y), ") spectral=",
            real(exact), " mc=", real(est.value), " z=", real(z));
      }
    }
  }
  r.csv["fk_check.csv"] = csv.str();
  r.summary = {{"experiment", c.name}, {"engine", "feynman-kac-check"}, {"max_z", worst},
               {"pass", r.pass},       {"tolerances", {{"fk_sigma", c.fk_sigma}}}};
  return r;
}

std::vector<double> crosscheck_y_grid(const ExperimentConfig& c, const std::vector<CriticalPoint>& cps) {
  std::vector<double> ys = c.y_grid;
  if (ys.empty()) {
    for (int i = 0; i < 16; ++i) ys.push_back(2.0 * std::numbers::pi * i / 16.0);
  }
  for (const auto& cp : cps) ys.push_back(cp.location);
  std::sort(ys.begin(), ys.end());
  std::vector<double> out;
  for (double y : ys) {
    if (out.empty() || torus_distance(out.back(), y) > 1e-9) out.push_back(y);
  }
  return out;
}

EngineResult run_crosscheck(const ExperimentConfig& c, const Log& log) {
  const auto profile = c.shear_profile();
  const auto cps = critical_points(profile);
  const auto ys = crosscheck_y_grid(c, cps);
  const auto opts = mc_options(c);

  // The Skorokhod side does not depend on k; compute it once per (nu, t).
  std::vector<SkorokhodRow> rows;
  for (double nu : c.nu_grid) {
    for (double t : c.t_grid) {
      for (double y : ys) {
        rows.push_back({{y, nu, t}, skorokhod_scan(profile, y, nu, t, c.n_samples, *c.seed, c.with_kernel, opts)});
        log("crosscheck skorokhod y=", real(y), " nu=", real(nu), " t=", real(t), " total=",
            real(rows.back().est.total()));
      }
    }
  }

  Csv csv{"profile", "k", "nu", "t", "spectral_norm", "sup_y", "term1", "term2", "total", "stderr_total",
          "bound", "allowance", "vacuous", "pass"};
  EngineResult r;
  Json checks = Json::array();
  for (int k : c.k_grid) {
    for (double nu : c.nu_grid) {
      const auto gen = build_generator(ModeProblem{k, nu, c.n_y, profile});
      for (double t : c.t_grid) {
        const SkorokhodRow* sup = nullptr;
        for (const auto& row : rows) {
          if (row.pt.nu == nu && row.pt.t == t && (!sup || row.est.total() > sup->est.total())) sup = &row;
        }
        const double norm = semigroup_norm(propagate(gen, t));
        const CrosscheckParams params{c.profile, k, nu, t};
        const auto check = bound_crosscheck(norm, params, sup->est.total(), sup->est.std_error_total, params);
        r.pass = r.pass && check.pass;
        csv << c.profile << k << nu << t << norm << sup->pt.y << sup->est.term1 << sup->est.term2
            << sup->est.total() << sup->est.std_error_total << check.bound << check.allowance
            << check.vacuous << check.pass;
        csv.end_row();
        checks.push_back({{"k", k}, {"nu", nu}, {"t", t}, {"spectral_norm", norm}, {"sup_y", sup->pt.y},
                          {"bound", check.bound}, {"vacuous", check.vacuous}, {"pass", check.pass}});
        log("crosscheck k=", k, " nu=", real(nu), " t=", real(t), " norm=", real(norm), " bound=",
            real(check.bound), check.vacuous ? " (vacuous)" : "");
      }
    }
  }
  r.csv["crosscheck.csv"] = csv.str();
  r.csv["crosscheck_skorokhod.csv"] = skorokhod_csv(c.profile, rows).str();
  r.summary = {{"experiment", c.name}, {"engine", "bound-crosscheck"}, {"checks", checks}, {"pass", r.pass}};
  return r;
}

EngineResult run_engine(const ExperimentConfig& c, Engine e, const Log& log);

EngineResult run_full_report(const ExperimentConfig& c, const Log& log) {
  EngineResult r;
  Json reports = Json::object();
  int ran = 0;
  for (Engine e : {Engine::SpectralScan, Engine::GevreyScan, Engine::McInverseMoment, Engine::McSkorokhod,
                   Engine::FeynmanKacCheck, Engine::BoundCrosscheck}) {
    ExperimentConfig sub = c;
    sub.engine = e;
    try {
      validate(sub);
    } catch (const ConfigError&) {
      continue;
    }
    ++ran;
    auto part = run_engine(sub, e, log);
    r.pass = r.pass && part.pass;
    reports[std::string(engine_name(e))] = part.summary;
    r.csv.merge(part.csv);
  }
  if (ran == 0) {
    throw ConfigError(ConfigError::Kind::Missing, 0, "", "full-report found no engine with complete inputs");
  }
  r.summary = {{"experiment", c.name}, {"engine", "full-report"}, {"reports", reports}, {"pass", r.pass}};
  return r;
}

EngineResult run_engine(const ExperimentConfig& c, Engine e, const Log& log) {
  switch (e) {
    case Engine::Solve: return run_solve(c, log);
    case Engine::SpectralScan: return run_spectral_scan(c, log);
    case Engine::GevreyScan: return run_gevrey_scan(c, log);
    case Engine::McInverseMoment: return run_inverse_moment(c, log);
    case Engine::McSkorokhod: return run_skorokhod(c, log);
    case Engine::FeynmanKacCheck: return run_feynman_kac(c, log);
    case Engine::BoundCrosscheck: return run_crosscheck(c, log);
    case Engine::FullReport: return run_full_report(c, log);
  }
  throw InvalidArgument("unknown engine");
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : emit_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentOutcome outcome;
  const Log log(options.log);
  std::string status = "pass";
  Json error = nullptr;
  try {
    validate(config);
    auto result = run_engine(config, config.engine, log);
    outcome.summary_json = result.summary.dump(2) + "\n";
    outcome.csv = std::move(result.csv);
    if (!result.pass) {
      outcome.exit_code = kExitTolerance;
      status = "tolerance-failure";
    }
  } catch (const ConfigError& e) {
    outcome.exit_code = kExitConfig;
    status = "config-error";
    outcome.error = e.what();
    error = {{"kind", std::string(kind_name(e.kind()))}, {"key", e.key()}, {"message", e.what()}};
  } catch (const std::exception& e) {
    outcome.exit_code = kExitComputation;
    status = "computation-failure";
    outcome.error = e.what();
    const char* kind = dynamic_cast<const DegenerateSampleError*>(&e) ? "degenerate-sample"
                       : dynamic_cast<const InvalidArgument*>(&e) ? "invalid-argument"
                                                                  : "computation";
    error = {{"kind", kind}, {"message", e.what()}};
  }

  Json artifacts = Json::array();
  for (const auto& [name, body] : outcome.csv) artifacts.push_back(name);
  if (!outcome.summary_json.empty()) artifacts.push_back("summary.json");
  const Json manifest = {{"name", config.name},
                         {"engine", std::string(engine_name(config.engine))},
                         {"config_hash", hex(config_hash(config))},
                         {"seed", config.seed ? Json(*config.seed) : Json(nullptr)},
                         {"version", kVersion},
                         {"status", status},
                         {"exit_code", outcome.exit_code},
                         {"error", error},
                         {"artifacts", artifacts},
                         {"config", emit_config(config)}};
  outcome.manifest_json = manifest.dump(2) + "\n";

  if (options.write_files && !config.output_dir.empty()) {
    try {
      const std::filesystem::path dir(config.output_dir);
      std::filesystem::create_directories(dir);
      for (const auto& [name, body] : outcome.csv) write_file(dir / name, body);
      if (!outcome.summary_json.empty()) write_file(dir / "summary.json", outcome.summary_json);
      write_file(dir / "manifest.json", outcome.manifest_json);
    } catch (const std::exception& e) {
      if (outcome.exit_code == kExitPass || outcome.exit_code == kExitTolerance) {
        outcome.exit_code = kExitComputation;
        outcome.error = e.what();
      }
    }
  }
  return outcome;
}

}  // namespace shearlab
