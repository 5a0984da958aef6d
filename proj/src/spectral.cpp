#include "zrec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace zrec {

namespace {

constexpr double kPi = 3.1415926535897932385;
constexpr double kEigTol = 5e-14;
constexpr int kPowerBudget = 200000;
constexpr double kDeltaScan = 1e-6;

struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

using cd = std::complex<double>;

// Spectral radius by normalised repeated squaring:
// rho = lim ||A^{2^k}||^{1/2^k}; 60 squarings reach machine precision and
// the estimate is indifferent to ties among dominant eigenvalues.
double radius_by_squaring(std::vector<cd> m, int a) {
  double log_scale = 0.0;   // accumulated log of normalisations, weighted
  double weight = 1.0;      // 1/2^k applied to the current matrix norm
  std::vector<cd> tmp(m.size());
  for (int k = 0; k < 60; ++k) {
    double norm = 0.0;
    for (const cd& v : m) norm = std::max(norm, std::abs(v));
    if (norm == 0.0) return 0.0;
    for (cd& v : m) v /= norm;
    log_scale += weight * std::log(norm);
    weight *= 0.5;
    // m <- m * m
    for (int i = 0; i < a; ++i)
      for (int j = 0; j < a; ++j) {
        cd s(0.0, 0.0);
        for (int l = 0; l < a; ++l) s += m[i * a + l] * m[l * a + j];
        tmp[i * a + j] = s;
      }
    m.swap(tmp);
  }
  double norm = 0.0;
  for (const cd& v : m) norm = std::max(norm, std::abs(v));
  if (norm == 0.0) return 0.0;
  return std::exp(log_scale + weight * std::log(norm));
}

}  // namespace

TwistedOperator make_twisted(const GibbsMarkov& g, const StepFunction& step,
                             double u) {
  const int a = g.alphabet();
  TwistedOperator op;
  op.alphabet = a;
  op.u = u;
  op.matrix.assign(static_cast<std::size_t>(a) * a, cd(0.0, 0.0));
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) {
      const double pij = g.pi(i, j);
      if (pij <= 0.0) continue;
      const double phase = u * static_cast<double>(step.value(i, j, a));
      op.matrix[static_cast<std::size_t>(i) * a + j] =
          pij * cd(std::cos(phase), std::sin(phase));
    }
  return op;
}

LeadingEig leading_eigenvalue(const TwistedOperator& op) {
  const int a = op.alphabet;
  const auto& m = op.matrix;

  // deterministic quasi-random start, never orthogonal to anything by luck
  std::vector<cd> v(a), w(a);
  for (int i = 0; i < a; ++i) {
    const double t = 0.7548776662466927 * (i + 1);
    v[i] = cd(1.0 + 0.25 * std::cos(2 * kPi * t), 0.25 * std::sin(2 * kPi * t));
  }
  double nrm = 0.0;
  for (const cd& x : v) nrm += std::norm(x);
  nrm = std::sqrt(nrm);
  for (cd& x : v) x /= nrm;

  double max_entry = 0.0;
  for (const cd& x : m) max_entry = std::max(max_entry, std::abs(x));
  if (max_entry == 0.0) return {cd(0.0, 0.0), 0.0, true};

  cd lambda(0.0, 0.0);
  for (int it = 0; it < kPowerBudget; ++it) {
    for (int i = 0; i < a; ++i) {
      cd s(0.0, 0.0);
      for (int j = 0; j < a; ++j) s += m[static_cast<std::size_t>(i) * a + j] * v[j];
      w[i] = s;
    }
    cd ray(0.0, 0.0);
    double wn = 0.0;
    for (int i = 0; i < a; ++i) {
      ray += std::conj(v[i]) * w[i];
      wn += std::norm(w[i]);
    }
    wn = std::sqrt(wn);
    if (wn < 1e-280) return {cd(0.0, 0.0), 0.0, true};  // nilpotent collapse
    lambda = ray;
    double resid = 0.0;
    for (int i = 0; i < a; ++i) resid += std::norm(w[i] - lambda * v[i]);
    resid = std::sqrt(resid);
    for (int i = 0; i < a; ++i) v[i] = w[i] / wn;
    if (resid <= kEigTol * std::max(1.0, max_entry)) {
      return {lambda, std::abs(lambda), true};
    }
  }
  // Slow convergence: dominant eigenvalue not simple enough; report the
  // radius only, from the tie-proof squaring estimate.
  return {cd(0.0, 0.0), radius_by_squaring(m, a), false};
}

namespace {

double radius_at(const GibbsMarkov& g, const StepFunction& step, double u) {
  return leading_eigenvalue(make_twisted(g, step, u)).radius;
}

}  // namespace

SpectralCurve nonarithmeticity_scan(const GibbsMarkov& g, const StepFunction& step,
                                    int grid_size) {
  if (grid_size < 64)
    throw std::invalid_argument("nonarithmeticity_scan: grid_size must be >= 64");

  std::vector<double> us(grid_size);
  std::vector<LeadingEig> eig(grid_size);
  for (int j = 0; j < grid_size; ++j) us[j] = kPi * (j + 1) / grid_size;

#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 8)
#endif
  for (int j = 0; j < grid_size; ++j)
    eig[j] = leading_eigenvalue(make_twisted(g, step, us[j]));

  // refinement around the grid maximum (golden-section on the radius)
  int jmax = 0;
  for (int j = 1; j < grid_size; ++j)
    if (eig[j].radius > eig[jmax].radius) jmax = j;
  double lo = us[std::max(0, jmax - 1)] - (jmax == 0 ? us[0] : 0.0);
  double hi = us[std::min(grid_size - 1, jmax + 1)];
  lo = std::max(lo, 1e-12);
  const double gr = 0.6180339887498949;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = radius_at(g, step, x1), f2 = radius_at(g, step, x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = radius_at(g, step, x2);
    } else {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = radius_at(g, step, x1);
    }
  }
  const double u_ref = f1 > f2 ? x1 : x2;
  const double r_ref = std::max(f1, f2);

  double worst_r = eig[jmax].radius;
  double worst_u = us[jmax];
  if (r_ref > worst_r) { worst_r = r_ref; worst_u = u_ref; }

  SpectralCurve curve;
  curve.grid.reserve(2 * grid_size + 1);
  curve.leading.reserve(2 * grid_size + 1);
  curve.radius.reserve(2 * grid_size + 1);
  for (int j = grid_size - 1; j >= 0; --j) {
    curve.grid.push_back(-us[j]);
    curve.leading.push_back(std::conj(eig[j].lambda));
    curve.radius.push_back(eig[j].radius);
  }
  curve.grid.push_back(0.0);
  curve.leading.push_back(cd(1.0, 0.0));
  curve.radius.push_back(1.0);
  for (int j = 0; j < grid_size; ++j) {
    curve.grid.push_back(us[j]);
    curve.leading.push_back(eig[j].lambda);
    curve.radius.push_back(eig[j].radius);
  }
  curve.sigma2_phi = sigma2_step(g, step);
  curve.nonarithmetic = worst_r <= 1.0 - kDeltaScan;
  if (!curve.nonarithmetic) curve.offending_u = worst_u;
  return curve;
}

double sigma2_step(const GibbsMarkov& g, const StepFunction& step) {
  const int a = g.alphabet();
  std::vector<double> f(static_cast<std::size_t>(a) * a, 0.0);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j)
      f[static_cast<std::size_t>(i) * a + j] =
          static_cast<double>(step.value(i, j, a));
  return green_kubo_sigma2(g, f);
}

namespace {

cd lambda_simple(const GibbsMarkov& g, const StepFunction& step, double u) {
  const LeadingEig e = leading_eigenvalue(make_twisted(g, step, u));
  if (!e.simple)
    throw std::runtime_error("sigma2_from_curve: non-simple dominant eigenvalue near u=0");
  return e.lambda;
}

// fourth-order central second derivative of Re lambda at 0
double second_derivative(const GibbsMarkov& g, const StepFunction& step, double h) {
  const double f0 = 1.0;  // lambda_0 = 1 for a stochastic matrix
  const double f1 = std::real(lambda_simple(g, step, h));
  const double f2 = std::real(lambda_simple(g, step, 2.0 * h));
  const double fm1 = std::real(lambda_simple(g, step, -h));
  const double fm2 = std::real(lambda_simple(g, step, -2.0 * h));
  return (-f2 + 16.0 * f1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
}

}  // namespace

Sigma2Result sigma2_from_curve(const GibbsMarkov& g, const StepFunction& step) {
  Sigma2Result r;
  const double d3 = second_derivative(g, step, 1e-3);
  const double d4 = second_derivative(g, step, 1e-4);
  // Richardson consistency: both stencils are O(h^4), so they must agree far
  // below the acceptance tolerance; disagreement flags a broken model.
  if (std::abs(d3 - d4) > 1e-5 * std::max(1.0, std::abs(d3)))
    throw std::runtime_error("sigma2_from_curve: finite-difference stencils disagree");
  r.spectral = -d3;
  r.green_kubo = sigma2_step(g, step);
  const double scale = std::max({std::abs(r.spectral), std::abs(r.green_kubo), 1e-9});
  if (std::abs(r.spectral - r.green_kubo) > 1e-6 * scale)
    throw std::runtime_error(
        "sigma2_from_curve: spectral and Green-Kubo variances disagree "
        "(model violates assumptions?)");
  return r;
}

// ---------------------------------------------------------------------------
// Exact dynamic programming
// ---------------------------------------------------------------------------

namespace {

struct DpPlan {
  std::int64_t smin = 0, smax = 0;  // global sum range
  std::vector<std::int64_t> lo, hi; // per-completed-step reachable range
};

DpPlan plan_sums(std::int64_t n, long long vmin, long long vmax) {
  DpPlan plan;
  plan.lo.resize(n + 1);
  plan.hi.resize(n + 1);
  plan.smin = 0;
  plan.smax = 0;
  for (std::int64_t t = 0; t <= n; ++t) {
    const std::int64_t fwd_lo = t * vmin, fwd_hi = t * vmax;
    const std::int64_t bwd_lo = -(n - t) * vmax, bwd_hi = -(n - t) * vmin;
    plan.lo[t] = std::max(fwd_lo, bwd_lo);
    plan.hi[t] = std::min(fwd_hi, bwd_hi);
    if (plan.lo[t] > plan.hi[t]) { plan.lo[t] = 0; plan.hi[t] = -1; }  // empty
    plan.smin = std::min(plan.smin, plan.lo[t]);
    plan.smax = std::max(plan.smax, plan.hi[t]);
  }
  return plan;
}

}  // namespace

double exact_return_probability(const GibbsMarkov& g, const StepFunction& step,
                                const CylinderWord& word_a,
                                const std::vector<int>& word_b, std::int64_t n,
                                const DpLimits& limits) {
  const int a = g.alphabet();
  if (n < 1) throw std::invalid_argument("exact_return_probability: n must be >= 1");
  const std::int64_t q = word_a.radius;
  const std::int64_t i0 = -(q - 1);
  const std::int64_t i1 = std::max<std::int64_t>(
      n, word_b.empty() ? n : n + static_cast<std::int64_t>(word_b.size()) - 1);
  if (n <= q - 1)
    throw std::invalid_argument(
        "exact_return_probability: n must clear the A-window (n >= radius)");
  for (int s : word_b)
    if (s < 0 || s >= a)
      throw std::invalid_argument("exact_return_probability: B symbol out of range");

  long long vmin = 0, vmax = 0;
  bool first = true;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j)
      if (g.spec.allowed(i, j)) {
        const long long v = step.value(i, j, a);
        vmin = first ? v : std::min(vmin, v);
        vmax = first ? v : std::max(vmax, v);
        first = false;
      }

  const DpPlan plan = plan_sums(n, vmin, vmax);
  const std::int64_t width = plan.smax - plan.smin + 1;
  if (static_cast<std::size_t>(width) * a > limits.max_cells)
    throw std::invalid_argument(
        "exact_return_probability: DP state budget exceeded; reduce n or |phi|");

  const auto constrained = [&](std::int64_t pos) -> int {
    if (pos >= i0 && pos <= q - 1) return word_a.symbols[pos - i0];
    if (!word_b.empty() && pos >= n &&
        pos < n + static_cast<std::int64_t>(word_b.size()))
      return word_b[pos - n];
    return -1;
  };

  std::vector<double> cur(static_cast<std::size_t>(width) * a, 0.0);
  std::vector<double> nxt(cur.size());
  const auto idx = [&](int state, std::int64_t s) {
    return static_cast<std::size_t>(state) * width + static_cast<std::size_t>(s - plan.smin);
  };

  {
    const int c0 = constrained(i0);
    for (int s = 0; s < a; ++s)
      if (c0 < 0 || s == c0) cur[idx(s, 0)] = g.stationary[s];
  }

  for (std::int64_t pos = i0; pos < i1; ++pos) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    const int want_from = constrained(pos);
    const int want_to = constrained(pos + 1);
    const bool counting = pos >= 0 && pos < n;
    const std::int64_t t_from = counting ? std::clamp<std::int64_t>(pos, 0, n) : (pos < 0 ? 0 : n);
    const std::int64_t lo = pos < 0 ? 0 : plan.lo[t_from];
    const std::int64_t hi = pos < 0 ? 0 : plan.hi[t_from];
    for (int s_from = 0; s_from < a; ++s_from) {
      if (want_from >= 0 && s_from != want_from) continue;
      for (int s_to = 0; s_to < a; ++s_to) {
        if (want_to >= 0 && s_to != want_to) continue;
        const double pij = g.pi(s_from, s_to);
        if (pij <= 0.0) continue;
        const std::int64_t shift = counting ? step.value(s_from, s_to, a) : 0;
        for (std::int64_t s = lo; s <= hi; ++s) {
          const double w = cur[idx(s_from, s)];
          if (w == 0.0) continue;
          const std::int64_t s2 = s + shift;
          if (s2 < plan.smin || s2 > plan.smax) continue;
          nxt[idx(s_to, s2)] += pij * w;
        }
      }
    }
    cur.swap(nxt);
  }

  Kahan total;
  for (int s = 0; s < a; ++s) total.add(cur[idx(s, 0)]);
  return total.sum;
}

std::vector<LltRow> llt_lattice_check(const GibbsMarkov& g, const StepFunction& step,
                                      const std::vector<std::int64_t>& n_list,
                                      const DpLimits& limits) {
  const double sigma = std::sqrt(sigma2_step(g, step));
  std::vector<LltRow> rows;
  rows.reserve(n_list.size());
  const int a = g.alphabet();

  for (std::int64_t n : n_list) {
    if (n < 1) throw std::invalid_argument("llt_lattice_check: n must be >= 1");
    long long vmin = 0, vmax = 0;
    bool first = true;
    for (int i = 0; i < a; ++i)
      for (int j = 0; j < a; ++j)
        if (g.spec.allowed(i, j)) {
          const long long v = step.value(i, j, a);
          vmin = first ? v : std::min(vmin, v);
          vmax = first ? v : std::max(vmax, v);
          first = false;
        }
    const DpPlan plan = plan_sums(n, vmin, vmax);
    const std::int64_t width = plan.smax - plan.smin + 1;
    if (static_cast<std::size_t>(width) * a > limits.max_cells)
      throw std::invalid_argument("llt_lattice_check: DP state budget exceeded");

    std::vector<double> cur(static_cast<std::size_t>(width) * a, 0.0);
    std::vector<double> nxt(cur.size());
    const auto idx = [&](int state, std::int64_t s) {
      return static_cast<std::size_t>(state) * width +
             static_cast<std::size_t>(s - plan.smin);
    };
    for (int s = 0; s < a; ++s) cur[idx(s, 0)] = g.stationary[s];

    for (std::int64_t t = 0; t < n; ++t) {
      std::fill(nxt.begin(), nxt.end(), 0.0);
      for (int s_from = 0; s_from < a; ++s_from)
        for (int s_to = 0; s_to < a; ++s_to) {
          const double pij = g.pi(s_from, s_to);
          if (pij <= 0.0) continue;
          const std::int64_t shift = step.value(s_from, s_to, a);
          for (std::int64_t s = plan.lo[t]; s <= plan.hi[t]; ++s) {
            const double w = cur[idx(s_from, s)];
            if (w == 0.0) continue;
            const std::int64_t s2 = s + shift;
            if (s2 < plan.smin || s2 > plan.smax) continue;
            nxt[idx(s_to, s2)] += pij * w;
          }
        }
      cur.swap(nxt);
    }

    LltRow row;
    row.n = n;
    Kahan total;
    for (int s = 0; s < a; ++s) total.add(cur[idx(s, 0)]);
    row.p_zero = total.sum;
    row.structurally_zero = row.p_zero == 0.0;
    row.normalized =
        row.p_zero * sigma * std::sqrt(2.0 * kPi * static_cast<double>(n));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace zrec
