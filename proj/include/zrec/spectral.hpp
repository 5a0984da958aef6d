// Twisted transfer operators P_u(a,b) = pi(a,b) e^{i u phi(a,b)} on the
// finite Markov level, their leading-eigenvalue curve u -> lambda_u, variance
// identities (-lambda''(0) = sigma_phi^2, cross-checked against Green-Kubo),
// non-arithmeticity certification by spectral-radius scan, and an exact
// dynamic-programming oracle for cylinder events of the form
//   P( A at 0,  S_n phi = 0,  B at offset n ).
//
// The doubly-local limit theorem is normalised with the standard local-CLT
// constant: P(...) ~ nu(A) nu(B) / (sigma_phi sqrt(2 pi n)).

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "zrec/gibbs.hpp"

namespace zrec {

struct TwistedOperator {
  int alphabet = 0;
  double u = 0.0;
  std::vector<std::complex<double>> matrix;  // row-major A x A
};

TwistedOperator make_twisted(const GibbsMarkov& g, const StepFunction& step,
                             double u);

struct LeadingEig {
  std::complex<double> lambda{0.0, 0.0};  // valid only when simple
  double radius = 0.0;                    // spectral radius (always valid)
  bool simple = true;  // false: two largest moduli within 1e-10, lambda unset
};

// Power iteration with Rayleigh quotient; on slow convergence or a
// non-simple dominant eigenvalue falls back to the full (small) spectrum and
// returns a flagged radius-only result.
LeadingEig leading_eigenvalue(const TwistedOperator& op);

struct SpectralCurve {
  std::vector<double> grid;                   // ordered, in [-pi, pi]
  std::vector<std::complex<double>> leading;  // lambda_u per grid point
  std::vector<double> radius;                 // spectral radius per point
  double sigma2_phi = 0.0;
  bool nonarithmetic = false;
  std::optional<double> offending_u;  // radius >= 1-delta_scan at this u
};

// Spectral radius over a uniform grid of (0, pi] (grid_size >= 64) plus a
// golden-section refinement pass around the grid maximum; nonarithmetic
// iff the refined maximum stays <= 1 - 1e-6.  The returned curve is the
// symmetric extension to [-pi, pi] (lambda_{-u} = conj lambda_u).
SpectralCurve nonarithmeticity_scan(const GibbsMarkov& g, const StepFunction& step,
                                    int grid_size = 1024);

struct Sigma2Result {
  double spectral = 0.0;    // -Re lambda''(0), fourth-order differences
  double green_kubo = 0.0;  // Var + 2 sum Cov
};

// Computes both routes and enforces agreement (1e-6 relative, with an
// absolute floor for degenerate sigma2 = 0 coboundary cases).
Sigma2Result sigma2_from_curve(const GibbsMarkov& g, const StepFunction& step);

struct DpLimits {
  std::size_t max_cells = 400000000;  // states x sum-range budget
};

// Exact probability P(x in A, S_n phi = 0, word B occurs at positions
// n..n+|B|-1), A anchored with its centre at position 0.  Dynamic programming
// over (state, partial sum) with exact per-step sum bounds.
double exact_return_probability(const GibbsMarkov& g, const StepFunction& step,
                                const CylinderWord& word_a,
                                const std::vector<int>& word_b, std::int64_t n,
                                const DpLimits& limits = {});

struct LltRow {
  std::int64_t n = 0;
  double p_zero = 0.0;       // P(S_n phi = 0), exact DP marginal
  double normalized = 0.0;   // p_zero * sigma_phi * sqrt(2 pi n)
  bool structurally_zero = false;  // no path attains S_n = 0 (lattice period)
};

// Exact marginal P(S_n = 0) for each n, with the local-CLT normalisation.
// Entries whose probability is combinatorially zero (period does not divide
// n) are flagged rather than reported as ratios.
std::vector<LltRow> llt_lattice_check(const GibbsMarkov& g, const StepFunction& step,
                                      const std::vector<std::int64_t>& n_list,
                                      const DpLimits& limits = {});

// Asymptotic variance of the step function via Green-Kubo.
double sigma2_step(const GibbsMarkov& g, const StepFunction& step);

}  // namespace zrec
