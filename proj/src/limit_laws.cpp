#include "zrec/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace zrec {

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

double erfcx(double x) {
  if (x < 0.0) {
    // erfcx(-x) = 2 e^{x^2} - erfcx(x); only small |x| occur on this branch.
    const double e = std::exp(x * x);
    return 2.0 * e - erfcx(-x);
  }
  if (x < 9.0) {
    // Direct product is exact here: exp(x^2) <= e^81 and erfc(x) >= 1e-37,
    // both well inside double range.
    return std::exp(x * x) * std::erfc(x);
  }
  // Asymptotic series erfcx(x) ~ (1/(x sqrt pi)) sum_k (-1)^k (2k-1)!!/(2x^2)^k.
  // At x >= 9 the truncation error is far below 1e-16 relative.
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 20; ++k) {
    term *= -(2.0 * k - 1.0) * inv2x2;
    sum += term;
    if (std::abs(term) < 1e-18 * sum) break;
  }
  return sum / (x * 1.7724538509055160273);  // sqrt(pi)
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1,1] (7-point Gauss embedded).
constexpr double kGK15Nodes[15] = {
    -0.9914553711208126, -0.9491079123427585, -0.8648644233597691,
    -0.7415311855993944, -0.5860872354676911, -0.4058451513773972,
    -0.2077849550078985, 0.0,
    0.2077849550078985,  0.4058451513773972,  0.5860872354676911,
    0.7415311855993944,  0.8648644233597691,  0.9491079123427585,
    0.9914553711208126};
constexpr double kGK15Weights[15] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278, 0.2044329400752989,
    0.1903505780647854, 0.1690047266392679, 0.1406532597155259,
    0.1047900103222502, 0.0630920926299786, 0.0229353220105292};
constexpr double kG7Weights[7] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
    0.1294849661688697};

struct SegResult {
  double value;
  double error;
};

SegResult gk15(double (*f)(double, const void*), const void* ctx, double a,
               double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double fx = f(c + h * kGK15Nodes[i], ctx);
    kron += kGK15Weights[i] * fx;
    if (i % 2 == 1) gauss += kG7Weights[i / 2] * fx;
  }
  kron *= h;
  gauss *= h;
  const double diff = std::abs(kron - gauss);
  return {kron, std::pow(200.0 * diff, 1.5)};
}

void integrate_rec(double (*f)(double, const void*), const void* ctx, double a,
                   double b, double tol, int depth, double* acc) {
  const SegResult r = gk15(f, ctx, a, b);
  if (r.error <= tol || (b - a) < 1e-14 * (1.0 + std::abs(a))) {
    if (depth > 48) throw std::runtime_error("quadrature did not converge");
    *acc += r.value;
    return;
  }
  if (depth > 48) throw std::runtime_error("quadrature did not converge");
  const double m = 0.5 * (a + b);
  integrate_rec(f, ctx, a, m, 0.5 * tol, depth + 1, acc);
  integrate_rec(f, ctx, m, b, 0.5 * tol, depth + 1, acc);
}

}  // namespace

double integrate(double (*f)(double, const void*), const void* ctx, double a,
                 double b, double abs_tol) {
  double acc = 0.0;
  integrate_rec(f, ctx, a, b, abs_tol, 0, &acc);
  return acc;
}

// ---------------------------------------------------------------------------
// Reference laws
// ---------------------------------------------------------------------------

ReferenceLaw ReferenceLaw::exp_over_abs_normal(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("ExpOverAbsNormal: scale must be > 0");
  ReferenceLaw l;
  l.kind = LawKind::ExpOverAbsNormal;
  l.scale = scale;
  return l;
}

ReferenceLaw ReferenceLaw::inverse_normal_squared() {
  ReferenceLaw l;
  l.kind = LawKind::InverseNormalSquared;
  return l;
}

ReferenceLaw ReferenceLaw::exponential() {
  ReferenceLaw l;
  l.kind = LawKind::ExponentialMeanOne;
  return l;
}

ReferenceLaw ReferenceLaw::gaussian(double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("Gaussian: variance must be > 0");
  ReferenceLaw l;
  l.kind = LawKind::Gaussian;
  l.variance = variance;
  return l;
}

double cdf(const ReferenceLaw& law, double t) {
  switch (law.kind) {
    case LawKind::ExpOverAbsNormal: {
      if (t <= 0.0) return 0.0;
      const double z = t / law.scale;
      return 1.0 - erfcx(z * 0.7071067811865475244);
    }
    case LawKind::InverseNormalSquared: {
      if (t <= 0.0) return 0.0;
      return std::erfc(1.0 / std::sqrt(2.0 * t));
    }
    case LawKind::ExponentialMeanOne:
      return t <= 0.0 ? 0.0 : -std::expm1(-t);
    case LawKind::Gaussian:
      return normal_cdf(t / std::sqrt(law.variance));
  }
  return 0.0;
}

double sample(const ReferenceLaw& law, RngStream& rng) {
  switch (law.kind) {
    case LawKind::ExpOverAbsNormal: {
      const double e = rng.next_exponential();
      double n;
      do { n = rng.next_gaussian(); } while (n == 0.0);
      return law.scale * e / std::abs(n);
    }
    case LawKind::InverseNormalSquared: {
      double n;
      do { n = rng.next_gaussian(); } while (n == 0.0);
      return 1.0 / (n * n);
    }
    case LawKind::ExponentialMeanOne:
      return rng.next_exponential();
    case LawKind::Gaussian:
      return std::sqrt(law.variance) * rng.next_gaussian();
  }
  return 0.0;
}

double quantile(const ReferenceLaw& law, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile: p must be in (0,1)");
  double lo, hi;
  if (law.kind == LawKind::Gaussian) {
    lo = -1.0;
    hi = 1.0;
    while (cdf(law, lo) > p) lo *= 2.0;
  } else {
    lo = 0.0;
    hi = 1.0;
  }
  while (cdf(law, hi) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    if (cdf(law, m) < p) lo = m; else hi = m;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Empirical distributions and KS
// ---------------------------------------------------------------------------

EmpiricalDistribution EmpiricalDistribution::from_samples(std::vector<double> values) {
  EmpiricalDistribution e;
  std::sort(values.begin(), values.end());
  e.n = values.size();
  e.samples = std::move(values);
  return e;
}

EmpiricalDistribution EmpiricalDistribution::from_censored(
    std::vector<double> uncensored, std::size_t censored_count, double threshold) {
  EmpiricalDistribution e;
  std::sort(uncensored.begin(), uncensored.end());
  e.n = uncensored.size() + censored_count;
  e.samples = std::move(uncensored);
  e.censor_threshold = threshold;
  return e;
}

double ks_distance(const EmpiricalDistribution& emp, const ReferenceLaw& law) {
  if (emp.n == 0) throw std::invalid_argument("ks_distance: empty sample set");
  const double n = static_cast<double>(emp.n);
  const double thr = emp.censor_threshold.value_or(
      std::numeric_limits<double>::infinity());
  double d = 0.0;
  std::size_t i = 0;
  for (; i < emp.samples.size(); ++i) {
    const double x = emp.samples[i];
    if (x >= thr) break;
    const double F = cdf(law, x);
    d = std::max(d, std::abs(F - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
  }
  // Approach to the threshold from below (F continuous up to thr).
  if (emp.censor_threshold) {
    const double F = cdf(law, thr);
    d = std::max(d, std::abs(F - static_cast<double>(i) / n));
  } else if (!emp.samples.empty()) {
    d = std::max(d, 1.0 - cdf(law, emp.samples.back()));
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty input");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_threshold_99(std::size_t n) {
  return 1.628 / std::sqrt(static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Identity checks
// ---------------------------------------------------------------------------

namespace {

double levy_laplace_integrand(double y, const void* ctx) {
  const double t = *static_cast<const double*>(ctx);
  if (y <= 0.0) return 0.0;
  return std::exp(-t / (y * y) - 0.5 * y * y);
}

struct IntEqCtx {
  double t;
  double scale;
};

double int_eq_integrand(double v, const void* ctx) {
  const auto* c = static_cast<const IntEqCtx*>(ctx);
  const double arg = c->t * std::sqrt(std::max(0.0, 1.0 - v * v));
  // survival of scale*E/|N|:
  return erfcx(arg / (c->scale * 1.4142135623730950488));
}

}  // namespace

double laplace_check_inverse_normal_sq(const std::vector<double>& t_list) {
  double worst = 0.0;
  for (double t : t_list) {
    if (t < 0.0) throw std::invalid_argument("laplace_check_inverse_normal_sq: t must be >= 0");
    // E[e^{-t N^{-2}}] = sqrt(2/pi) Int_0^inf e^{-t/y^2 - y^2/2} dy  (y = |N|)
    const double I = integrate(levy_laplace_integrand, &t, 0.0, 42.0, 1e-12);
    const double val = I * 0.7978845608028653559;  // sqrt(2/pi)
    worst = std::max(worst, std::abs(val - std::exp(-std::sqrt(2.0 * t))));
  }
  return worst;
}

double laplace_check_w(double c_beta, const std::vector<double>& s_list,
                       RngStream& rng, std::size_t n_draws,
                       double* max_in_std_errors) {
  if (!(c_beta > 0.0)) throw std::invalid_argument("laplace_check_w: c_beta must be > 0");
  const double a2 = 0.5 * c_beta * c_beta;  // W = (c_beta/sqrt2)^2 E^2/N^2
  std::vector<double> sum(s_list.size(), 0.0), sumsq(s_list.size(), 0.0);
  for (std::size_t i = 0; i < n_draws; ++i) {
    const double e = rng.next_exponential();
    double g;
    do { g = rng.next_gaussian(); } while (g == 0.0);
    const double w = a2 * e * e / (g * g);
    for (std::size_t j = 0; j < s_list.size(); ++j) {
      const double x = std::exp(-s_list[j] * w);
      sum[j] += x;
      sumsq[j] += x * x;
    }
  }
  double worst = 0.0, worst_se = 0.0;
  for (std::size_t j = 0; j < s_list.size(); ++j) {
    const double mean = sum[j] / static_cast<double>(n_draws);
    const double var = std::max(0.0, sumsq[j] / static_cast<double>(n_draws) - mean * mean);
    const double se = std::sqrt(var / static_cast<double>(n_draws));
    const double theo = 1.0 / (1.0 + c_beta * std::sqrt(s_list[j]));
    const double dev = std::abs(mean - theo);
    worst = std::max(worst, dev);
    if (se > 0.0) worst_se = std::max(worst_se, dev / se);
  }
  if (max_in_std_errors) *max_in_std_errors = worst_se;
  return worst;
}

double integral_equation_solution_scale(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  return 1.0 / (beta * 2.5066282746310005024);  // 1/(beta sqrt(2 pi))
}

double integral_equation_residual(double beta, double candidate_scale,
                                  const std::vector<double>& t_list,
                                  double quad_tol) {
  if (!(beta > 0.0) || !(candidate_scale > 0.0))
    throw std::invalid_argument("integral_equation_residual: beta, scale must be > 0");
  double worst = 0.0;
  for (double t : t_list) {
    if (!(t > 0.0)) throw std::invalid_argument("integral_equation_residual: t must be > 0");
    IntEqCtx ctx{t, candidate_scale};
    // Int_0^1 S(t sqrt(1-u))/sqrt(u) du = 2 Int_0^1 S(t sqrt(1-v^2)) dv
    const double I = 2.0 * integrate(int_eq_integrand, &ctx, 0.0, 1.0, quad_tol);
    const double surv = erfcx(t / (candidate_scale * 1.4142135623730950488));
    worst = std::max(worst, std::abs(1.0 - surv - beta * t * I));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Regression and fluctuations
// ---------------------------------------------------------------------------

RegressionResult exponent_regression(const std::vector<double>& x,
                                     const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("regression: size mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("regression: need at least 3 points");
  const double nx = static_cast<double>(n);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / nx;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / nx;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("regression: degenerate abscissae");
  RegressionResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return r;
}

FluctuationReport fluctuation_test(const std::vector<double>& samples,
                                   double sigma2_h) {
  if (sigma2_h <= 1e-10)
    throw std::invalid_argument(
        "fluctuation_test: sigma2_h vanishes; the measure of maximal entropy "
        "is excluded by the corollary hypothesis");
  if (samples.size() < 2) throw std::invalid_argument("fluctuation_test: need >= 2 samples");
  FluctuationReport rep;
  rep.n = samples.size();
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double var = ss / (n - 1.0);
  rep.variance_ratio = var / (2.0 * sigma2_h);
  const double sd = std::sqrt(var);
  rep.mean_over_sd = sd > 0.0 ? mean / sd : 0.0;
  rep.mean_std_errors = sd > 0.0 ? std::abs(mean) / (sd / std::sqrt(n)) : 0.0;
  rep.ks_vs_gaussian = ks_distance(EmpiricalDistribution::from_samples(samples),
                                   ReferenceLaw::gaussian(2.0 * sigma2_h));
  return rep;
}

}  // namespace zrec
