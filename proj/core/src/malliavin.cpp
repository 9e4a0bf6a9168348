#include "shearlab/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shearlab/error.hpp"
#include "shearlab/parallel.hpp"
#include "shearlab/stats.hpp"

namespace shearlab {
namespace {

constexpr std::uint64_t kBootstrapTag = 0xd1b54a32d192ed03ULL;
constexpr int kHullGrid = 257;

double trapezoid_weight(int j, int m, double dt) { return (j == 0 || j == m) ? 0.5 * dt : dt; }

// Weights omega_j with sum_j omega_j f_j = sum_i w_i sum_j w^{(i)}_j f_j, i.e.
// the trapezoid rule applied twice, which is the discrete form of
// int_0^t int_r^t f ds dr = int_0^t s f(s) ds.
double fubini_weight(int j, int m, double dt) {
  if (j == 0) return 0.25 * dt * dt;
  if (j == m) return 0.5 * dt * (m * dt - 0.5 * dt);
  return dt * (j * dt);
}

std::vector<double> along_path(const ShearProfile& profile, double y, double nu,
                               const BrownianPath& path, int m, int d) {
  const double amp = std::sqrt(nu);
  std::vector<double> f(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) f[j] = profile.evaluate(y + amp * path.values[j], d);
  return f;
}

// Backward cumulative trapezoid: out[i] = int_{s_i}^{s_m} f.
std::vector<double> tail_trapezoid(std::span<const double> f, double dt) {
  const int m = static_cast<int>(f.size()) - 1;
  std::vector<double> out(f.size(), 0.0);
  CompensatedSum acc;
  for (int i = m - 1; i >= 0; --i) {
    acc.add(0.5 * dt * (f[i] + f[i + 1]));
    out[i] = acc.value();
  }
  return out;
}

void require_nondegenerate(double detM) {
  if (!(detM > kDetFloor)) {
    std::ostringstream msg;
    msg << "degenerate Malliavin determinant detM = " << detM;
    throw DegenerateSampleError(msg.str());
  }
}

void fill_kernel(const ShearProfile& profile, double y, double nu, const BrownianPath& path,
                 std::span<const double> g, double detM, Eigen::MatrixXd& kernel) {
  require_nondegenerate(detM);
  const int m = static_cast<int>(g.size()) - 1;
  if (m < 1) throw InvalidArgument("kernel needs at least one step");
  const double dt = path.dt;
  const double horizon = m * dt;
  const auto f2 = along_path(profile, y, nu, path, m, 2);
  const auto t2 = tail_trapezoid(f2, dt);

  // right[l] = sum_{j>=l} c_j f2_j with interior weights dt and dt/2 at s_m;
  // moment[l] = sum_{j>=l} omega_j f2_j.
  std::vector<double> right(static_cast<std::size_t>(m) + 2, 0.0);
  std::vector<double> moment(right.size(), 0.0);
  {
    CompensatedSum r;
    CompensatedSum s;
    for (int l = m; l >= 1; --l) {
      r.add((l == m ? 0.5 * dt : dt) * f2[l]);
      s.add(fubini_weight(l, m, dt) * f2[l]);
      right[l] = r.value();
      moment[l] = s.value();
    }
  }

  // q[l] = sum_i w_i g_i G(l, i), split by whether l <= i.
  std::vector<double> weighted_g(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) weighted_g[i] = trapezoid_weight(i, m, dt) * g[i];
  const double total_wg = compensated_sum(weighted_g);
  std::vector<double> prefix_wg(static_cast<std::size_t>(m) + 2, 0.0);
  for (int l = 1; l <= m + 1; ++l) prefix_wg[l] = prefix_wg[l - 1] + weighted_g[l - 1];
  std::vector<double> suffix_wgt(static_cast<std::size_t>(m) + 2, 0.0);
  for (int l = m; l >= 0; --l) suffix_wgt[l] = suffix_wgt[l + 1] + weighted_g[l] * t2[l];

  const double inv_d = 1.0 / detM;
  std::vector<double> q_term(static_cast<std::size_t>(m) + 1, 0.0);
  for (int l = 1; l <= m; ++l) {
    const double q = right[l] * prefix_wg[l] + suffix_wgt[l] - moment[l] / horizon * total_wg;
    q_term[l] = 2.0 * q * inv_d * inv_d;
  }

  kernel.resize(m, m + 1);
  for (int i = 0; i <= m; ++i) {
    double* col = kernel.col(i).data();
    for (int l = 1; l <= m; ++l) {
      const double gl = (l <= i ? t2[i] : right[l]) - moment[l] / horizon;
      col[l - 1] = gl * inv_d - g[i] * q_term[l];
    }
  }
}

double cross_integral(const Eigen::MatrixXd& kernel, double dt) {
  const Eigen::Index m = kernel.rows();
  const Eigen::MatrixXd averaged = 0.5 * (kernel.leftCols(m) + kernel.rightCols(m));
  return dt * dt * averaged.cwiseProduct(averaged.transpose()).sum();
}

long count_envelope_violations(const Eigen::MatrixXd& kernel, std::span<const double> g,
                               double detM, double t, double h, double dt) {
  const int m = static_cast<int>(g.size()) - 1;
  double abs_g = 0.0;
  for (int i = 0; i <= m; ++i) abs_g += trapezoid_weight(i, m, dt) * std::abs(g[i]);
  const double a = KernelEnvelope::kEntryConst1 * t * h / detM;
  const double b = KernelEnvelope::kEntryConst2 * t * h * abs_g / (detM * detM);
  long violations = 0;
  for (int i = 0; i <= m; ++i) {
    const double bound = (a + b * std::abs(g[i])) * (1.0 + 1e-9) + 1e-300;
    violations += (kernel.col(i).array().abs() > bound).count();
  }
  return violations;
}

double cross_envelope(double detM, double t, double h) {
  return KernelEnvelope::kCrossConst * t * t * (t * h) * (t * h) / (detM * detM);
}

MalliavinSample core_sample(const ShearProfile& profile, double y, double nu, double t,
                            const BrownianPath& path) {
  MalliavinSample s;
  s.y = y;
  s.nu = nu;
  s.t = t;
  s.dt = path.dt;
  s.g = g_function(profile, y, nu, path, t);
  s.detM = malliavin_det(s.g, path.dt);
  s.Y = y_weight(s.g, s.detM, nu);
  s.h_sup = h_sup(profile, y, nu, path, t);
  return s;
}

}  // namespace

std::vector<double> g_function(const ShearProfile& profile, double y, double nu,
                               const BrownianPath& path, double t) {
  if (!(nu >= 0.0)) throw InvalidArgument("diffusivity must be >= 0");
  const int m = steps_for(path, t);
  if (m < 1) throw InvalidArgument("g_function needs t > 0");
  const double dt = path.dt;
  const double horizon = m * dt;
  const auto f1 = along_path(profile, y, nu, path, m, 1);
  auto g = tail_trapezoid(f1, dt);
  CompensatedSum moment;
  for (int j = 0; j <= m; ++j) moment.add(fubini_weight(j, m, dt) * f1[j]);
  const double shift = moment.value() / horizon;
  for (double& v : g) v -= shift;
  return g;
}

double malliavin_det(std::span<const double> g, double dt) {
  if (g.size() < 2) throw InvalidArgument("g needs at least two grid values");
  const int m = static_cast<int>(g.size()) - 1;
  CompensatedSum acc;
  for (int i = 0; i <= m; ++i) acc.add(trapezoid_weight(i, m, dt) * g[i] * g[i]);
  return acc.value();
}

std::vector<double> y_weight(std::span<const double> g, double detM, double nu) {
  require_nondegenerate(detM);
  if (!(nu > 0.0)) throw InvalidArgument("diffusivity must be positive");
  std::vector<double> y(g.begin(), g.end());
  const double scale = 1.0 / (nu * detM);
  for (double& v : y) v *= scale;
  return y;
}

std::vector<double> skorokhod_weight(std::span<const double> g, double detM, double nu) {
  require_nondegenerate(detM);
  if (!(nu > 0.0)) throw InvalidArgument("diffusivity must be positive");
  std::vector<double> w(g.begin(), g.end());
  const double scale = 1.0 / (std::sqrt(nu) * detM);
  for (double& v : w) v *= scale;
  return w;
}

double h_sup(const ShearProfile& profile, double y, double nu, const BrownianPath& path, double t) {
  const int m = steps_for(path, t);
  const double amp = std::sqrt(nu);
  double lo = 0.0;
  double hi = 0.0;
  double best = 0.0;
  for (int j = 0; j <= m; ++j) {
    const double b = path.values[j];
    lo = std::min(lo, b);
    hi = std::max(hi, b);
    best = std::max(best, std::abs(profile.evaluate(y + amp * b, 2)));
  }
  for (int i = 0; i < kHullGrid; ++i) {
    const double b = lo + (hi - lo) * i / (kHullGrid - 1);
    best = std::max(best, std::abs(profile.evaluate(y + amp * b, 2)));
  }
  return best;
}

MalliavinKernel malliavin_kernel(const ShearProfile& profile, double y, double nu,
                                 const BrownianPath& path, std::span<const double> g, double detM,
                                 double t) {
  const int m = steps_for(path, t);
  if (static_cast<int>(g.size()) != m + 1) throw InvalidArgument("g does not match the path grid");
  MalliavinKernel k;
  k.dt = path.dt;
  fill_kernel(profile, y, nu, path, g, detM, k.values);
  return k;
}

MalliavinSample malliavin_sample(const ShearProfile& profile, double y, double nu, double t,
                                 const BrownianPath& path, bool with_kernel) {
  MalliavinSample s = core_sample(profile, y, nu, t, path);
  if (with_kernel) s.kernel = malliavin_kernel(profile, y, nu, path, s.g, s.detM, t);
  return s;
}

void check_sample_invariants(const MalliavinSample& s) {
  const int m = static_cast<int>(s.g.size()) - 1;
  double integral = 0.0;
  double abs_integral = 0.0;
  double normalization = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double w = trapezoid_weight(i, m, s.dt);
    integral += w * s.g[i];
    abs_integral += w * std::abs(s.g[i]);
    if (!s.Y.empty()) normalization += w * s.Y[i] * s.g[i];
  }
  auto fail = [&](const char* what) {
    std::ostringstream msg;
    msg << "Malliavin sample invariant violated: " << what << " (y=" << s.y << ", nu=" << s.nu
        << ", t=" << s.t << ")";
    throw ComputationError(msg.str());
  };
  if (std::abs(integral) > 1e-10 * abs_integral + 1e-300) fail("int g = 0");
  if (!(s.detM >= 0.0)) fail("detM >= 0");
  if (s.detM > kDetFloor && std::abs(s.nu * normalization - 1.0) > 1e-10) fail("nu int Y g = 1");
  if (abs_integral * abs_integral > s.t * s.detM * (1.0 + 1e-10)) fail("(int |g|)^2 <= t detM");
}

double kernel_cross_integral(const MalliavinKernel& kernel) {
  return cross_integral(kernel.values, kernel.dt);
}

long envelope_violations(const MalliavinSample& s) {
  if (!s.kernel) throw InvalidArgument("sample has no kernel");
  return count_envelope_violations(s.kernel->values, s.g, s.detM, s.t, s.h_sup, s.dt);
}

double cross_integral_envelope(const MalliavinSample& s) { return cross_envelope(s.detM, s.t, s.h_sup); }

namespace {

SkorokhodEstimate summarize(std::span<const double> term1, std::span<const double> term2,
                            bool with_kernel, int resamples, std::uint64_t seed) {
  SkorokhodEstimate est;
  est.n_samples = static_cast<long>(term1.size());
  const auto b1 = bootstrap_mean(term1, resamples, seed ^ kBootstrapTag);
  est.term1 = b1.mean;
  est.std_error1 = b1.std_error;
  if (with_kernel) {
    const auto b2 = bootstrap_mean(term2, resamples, (seed ^ kBootstrapTag) + 1);
    std::vector<double> total(term1.size());
    for (std::size_t i = 0; i < total.size(); ++i) total[i] = term1[i] + term2[i];
    const auto bt = bootstrap_mean(total, resamples, (seed ^ kBootstrapTag) + 2);
    est.term2 = b2.mean;
    est.std_error2 = b2.std_error;
    est.std_error_total = bt.std_error;
  } else {
    est.std_error_total = b1.std_error;
  }
  return est;
}

double term1_of(const MalliavinSample& s) {
  const auto w = skorokhod_weight(s.g, s.detM, s.nu);
  const int m = static_cast<int>(w.size()) - 1;
  CompensatedSum acc;
  for (int i = 0; i <= m; ++i) acc.add(trapezoid_weight(i, m, s.dt) * w[i] * w[i]);
  return acc.value();
}

}  // namespace

SkorokhodEstimate skorokhod_variance(std::span<const MalliavinSample> samples, bool with_kernel,
                                     int resamples, std::uint64_t seed) {
  if (samples.empty()) throw InvalidArgument("skorokhod_variance needs at least one sample");
  const auto& first = samples.front();
  std::vector<double> term1(samples.size());
  std::vector<double> term2(samples.size(), 0.0);
  long entry_violations = 0;
  long cross_violations = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.y != first.y || s.nu != first.nu || s.t != first.t) {
      throw InvalidArgument("samples must share (y, nu, t)");
    }
    if (with_kernel && !s.kernel) throw InvalidArgument("sample is missing its kernel");
    term1[i] = term1_of(s);
    if (with_kernel) {
      term2[i] = kernel_cross_integral(*s.kernel);
      entry_violations += envelope_violations(s);
      if (std::abs(term2[i]) > cross_integral_envelope(s)) ++cross_violations;
    }
  }
  auto est = summarize(term1, term2, with_kernel, std::max(resamples, 2), seed);
  est.entry_envelope_violations = entry_violations;
  est.cross_envelope_violations = cross_violations;
  return est;
}

SkorokhodEstimate skorokhod_scan(const ShearProfile& profile, double y, double nu, double t,
                                 int n_samples, std::uint64_t seed, bool with_kernel,
                                 const MonteCarloOptions& options) {
  if (n_samples < kMinMonteCarloSamples) throw InvalidArgument("Monte Carlo estimates need at least 100 samples");
  if (!(t > 0.0) || !(nu > 0.0)) throw InvalidArgument("skorokhod_scan needs t > 0 and nu > 0");
  const double dt = t / options.n_steps;
  const auto n = static_cast<std::size_t>(n_samples);
  std::vector<double> term1(n);
  std::vector<double> term2(n, 0.0);
  std::vector<long> entry_violations(n, 0);
  std::vector<char> cross_violation(n, 0);

  parallel_for(n, options.workers, [&](std::size_t begin, std::size_t end, int) {
    Eigen::MatrixXd scratch;
    for (std::size_t i = begin; i < end; ++i) {
      const auto path = sample_path(seed, i, dt, options.n_steps);
      MalliavinSample s;
      try {
        s = core_sample(profile, y, nu, path.horizon(), path);
      } catch (const DegenerateSampleError& e) {
        std::ostringstream msg;
        msg << e.what() << " at seed " << seed << ", sample " << i;
        throw DegenerateSampleError(msg.str());
      }
      check_sample_invariants(s);
      term1[i] = term1_of(s);
      if (with_kernel) {
        fill_kernel(profile, y, nu, path, s.g, s.detM, scratch);
        term2[i] = cross_integral(scratch, dt);
        entry_violations[i] = count_envelope_violations(scratch, s.g, s.detM, s.t, s.h_sup, dt);
        cross_violation[i] = std::abs(term2[i]) > cross_envelope(s.detM, s.t, s.h_sup) ? 1 : 0;
      }
    }
  });

  auto est = summarize(term1, term2, with_kernel, options.bootstrap_resamples, seed);
  for (std::size_t i = 0; i < n; ++i) {
    est.entry_envelope_violations += entry_violations[i];
    est.cross_envelope_violations += cross_violation[i];
  }
  return est;
}

InverseMomentResult inverse_moment(const ShearProfile& profile, double y, double nu, double t,
                                   int p, int n_samples, std::uint64_t seed,
                                   const MonteCarloOptions& options) {
  if (p < 0 || p > 2) throw InvalidArgument("inverse moments are supported for p in {0, 1, 2}");
  if (n_samples < kMinInverseMomentSamples) throw InvalidArgument("inverse moments need at least 10^4 samples");
  if (!(t > 0.0) || !(nu > 0.0)) throw InvalidArgument("inverse_moment needs t > 0 and nu > 0");
  InverseMomentResult out;
  out.n_samples = n_samples;
  if (p == 0) {
    out.estimate = out.ci_lo = out.ci_hi = 1.0;
    return out;
  }

  const double dt = t / options.n_steps;
  const auto n = static_cast<std::size_t>(n_samples);
  std::vector<double> det(n);
  parallel_for(n, options.workers, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto path = sample_path(seed, i, dt, options.n_steps);
      const auto g = g_function(profile, y, nu, path, path.horizon());
      det[i] = malliavin_det(g, dt);
    }
  });

  std::vector<double> values;
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (det[i] > kDetFloor) {
      values.push_back(std::pow(det[i], -p));
    } else {
      out.degenerate.push_back({seed, i, det[i]});
    }
  }
  if (static_cast<double>(out.degenerate.size()) > kMaxDegenerateFraction * static_cast<double>(n)) {
    std::ostringstream msg;
    msg << out.degenerate.size() << " of " << n << " samples have a degenerate determinant";
    throw DegenerateSampleError(msg.str());
  }
  const auto boot = bootstrap_mean(values, options.bootstrap_resamples, seed ^ kBootstrapTag);
  out.estimate = boot.mean;
  out.ci_lo = boot.ci_lo;
  out.ci_hi = boot.ci_hi;
  out.std_error = boot.std_error;
  out.tail_fraction = tail_mass_fraction(values, 0.01);
  return out;
}

bool check_interpolation(std::span<const double> f, std::span<const double> df, double t,
                         double alpha) {
  if (f.size() != df.size() || f.size() < 2) throw InvalidArgument("need matching samples of f and f'");
  if (!(t > 0.0)) throw InvalidArgument("interval length must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0, 1]");
  const std::size_t n = f.size();
  const double h = t / static_cast<double>(n - 1);
  double f_sup = 0.0;
  double df_sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f_sup = std::max(f_sup, std::abs(f[i]));
    df_sup = std::max(df_sup, std::abs(df[i]));
  }
  if (f_sup == 0.0) return df_sup == 0.0;
  double holder = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = std::pow(static_cast<double>(j - i) * h, alpha);
      holder = std::max(holder, std::abs(df[j] - df[i]) / gap);
    }
  }
  const double rhs = 4.0 * std::max(f_sup / t, std::pow(f_sup, alpha / (1.0 + alpha)) *
                                                   std::pow(holder, 1.0 / (1.0 + alpha)));
  return df_sup <= rhs * (1.0 + 1e-12);
}

}  // namespace shearlab
