// Closed-form reference distributions and the statistical machinery used to
// verify limit laws: Kolmogorov-Smirnov distances, exponent regression, and
// numerical closure of the integral-equation / Laplace-transform identities
// satisfied by the E/|N| limit family.
//
// Reference CDFs (Phi = standard normal CDF, erfcx(x) = e^{x^2} erfc(x)):
//   ExpOverAbsNormal(s):   F(t) = 1 - 2 e^{(t/s)^2/2} (1 - Phi(t/s))
//                               = 1 - erfcx(t/(s sqrt 2)),  t >= 0
//   InverseNormalSquared:  F(t) = 2 (1 - Phi(1/sqrt t)) = erfc(1/sqrt(2t))
//   ExponentialMeanOne:    F(t) = 1 - e^{-t}
//   Gaussian(v):           F(t) = Phi(t / sqrt v)

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "zrec/rng.hpp"

namespace zrec {

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

// Scaled complementary error function, accurate to ~1e-15 relative for x >= 0.
double erfcx(double x);

// Standard normal CDF.
double normal_cdf(double x);

// Adaptive quadrature (Gauss-Kronrod 15-point, recursive bisection).
// Throws std::runtime_error if the requested tolerance is unreachable.
double integrate(double (*f)(double, const void*), const void* ctx, double a,
                 double b, double abs_tol);

// ---------------------------------------------------------------------------
// Reference laws
// ---------------------------------------------------------------------------

enum class LawKind {
  ExpOverAbsNormal,      // scale * E/|N|
  InverseNormalSquared,  // N^{-2} (the Levy(1/2) law)
  ExponentialMeanOne,
  Gaussian,              // mean 0, given variance
};

struct ReferenceLaw {
  LawKind kind = LawKind::ExponentialMeanOne;
  double scale = 1.0;     // ExpOverAbsNormal only; must be > 0
  double variance = 1.0;  // Gaussian only; must be > 0

  static ReferenceLaw exp_over_abs_normal(double scale);
  static ReferenceLaw inverse_normal_squared();
  static ReferenceLaw exponential();
  static ReferenceLaw gaussian(double variance);
};

double cdf(const ReferenceLaw& law, double t);

// One draw from the law (exact samplers built on RngStream).
double sample(const ReferenceLaw& law, RngStream& rng);

// CDF inverse by bisection (monotone F; used for medians and scale fits).
double quantile(const ReferenceLaw& law, double p);

// ---------------------------------------------------------------------------
// Empirical distributions and KS
// ---------------------------------------------------------------------------

struct EmpiricalDistribution {
  std::vector<double> samples;             // sorted ascending, uncensored
  std::size_t n = 0;                       // total count incl. censored mass
  std::optional<double> censor_threshold;  // censored mass only above this

  // Sorts and validates; censored_count entries are known only to lie at or
  // above `threshold` and enter the total count n but not `samples`.
  static EmpiricalDistribution from_samples(std::vector<double> values);
  static EmpiricalDistribution from_censored(std::vector<double> uncensored,
                                             std::size_t censored_count,
                                             double threshold);
};

// Sup-distance between the empirical CDF and the reference on the valid
// range: all of R without censoring, (-inf, censor_threshold) with it
// (censored samples count as mass above the threshold; no renormalisation is
// applied, so this is exact wherever it is evaluated).
// Throws std::invalid_argument on an empty sample set.
double ks_distance(const EmpiricalDistribution& emp, const ReferenceLaw& law);

// Two-sample KS statistic (test utility for distributional agreement).
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// 99% Kolmogorov critical value c/sqrt(n) with c = 1.628.
double ks_threshold_99(std::size_t n);

// ---------------------------------------------------------------------------
// Identity checks for the limit-law chain
// ---------------------------------------------------------------------------

// max_t |quadrature E[e^{-tX}] - e^{-sqrt(2t)}| for X ~ InverseNormalSquared.
double laplace_check_inverse_normal_sq(const std::vector<double>& t_list);

// Monte Carlo Laplace transform of W = (c_beta^2/2) E^2/N^2 against
// 1/(1 + c_beta sqrt s).  (The factor 1/2 is required for the identity to
// hold: E[e^{-s E^2/N^2}] = 1/(1+sqrt(2s)) exactly.)  Returns the maximum
// over s_list of |empirical - closed form| and, via out-param, the largest
// deviation measured in Monte Carlo standard errors.
double laplace_check_w(double c_beta, const std::vector<double>& s_list,
                       RngStream& rng, std::size_t n_draws,
                       double* max_in_std_errors = nullptr);

// Residual of  1 = P(X>t) + beta t Int_0^1 P(X > t sqrt(1-u)) / sqrt(u) du
// for the candidate law X = scale * E/|N|.  The candidate solving the
// equation has scale = 1/(beta sqrt(2 pi)); callers pass any scale (wrong
// scales are legitimate negative controls).  The 1/sqrt(u) endpoint
// singularity is removed by u = v^2 before quadrature.
double integral_equation_residual(double beta, double candidate_scale,
                                  const std::vector<double>& t_list,
                                  double quad_tol = 1e-10);

// Scale of the candidate law that closes the integral equation for a given
// beta (equals c_beta/sqrt(2) with c_beta = 1/(beta*Gamma(1/2))).
double integral_equation_solution_scale(double beta);

// ---------------------------------------------------------------------------
// Regression and fluctuation summaries
// ---------------------------------------------------------------------------

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares on (x, y) pairs; >= 3 points, non-degenerate x.
RegressionResult exponent_regression(const std::vector<double>& x,
                                     const std::vector<double>& y);

struct FluctuationReport {
  double ks_vs_gaussian = 0.0;
  double variance_ratio = 0.0;    // sample variance / (2 sigma_h^2)
  double mean_over_sd = 0.0;      // centering diagnostic
  double mean_std_errors = 0.0;   // |mean| / (sd/sqrt n)
  std::size_t n = 0;
};

// Samples are values of (log sqrt(tau) - k d)/sqrt(k) at fixed k; compared
// against N(0, 2 sigma2_h).  sigma2_h == 0 (maximal entropy measure) is an
// error: the corollary excludes that case.
FluctuationReport fluctuation_test(const std::vector<double>& samples,
                                   double sigma2_h);

}  // namespace zrec
