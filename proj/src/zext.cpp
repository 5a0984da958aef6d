#include "zrec/zext.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace zrec {
namespace zext {

namespace {

// Row-CDF tables for fast inverse sampling of pi and the reversed kernel.
struct KernelTables {
  int a = 0;
  std::vector<double> fwd_cum;  // row-major cumulative pi
  std::vector<double> bwd_cum;  // row-major cumulative reversed kernel

  explicit KernelTables(const GibbsMarkov& g) : a(g.alphabet()) {
    fwd_cum.resize(static_cast<std::size_t>(a) * a);
    bwd_cum.resize(fwd_cum.size());
    const std::vector<double> rev = g.reversed_kernel();
    for (int i = 0; i < a; ++i) {
      double cf = 0.0, cb = 0.0;
      for (int j = 0; j < a; ++j) {
        cf += g.pi(i, j);
        cb += rev[static_cast<std::size_t>(i) * a + j];
        fwd_cum[static_cast<std::size_t>(i) * a + j] = cf;
        bwd_cum[static_cast<std::size_t>(i) * a + j] = cb;
      }
      // guard the top against rounding
      fwd_cum[static_cast<std::size_t>(i) * a + (a - 1)] = 1.0;
      bwd_cum[static_cast<std::size_t>(i) * a + (a - 1)] = 1.0;
    }
  }

  int draw(const std::vector<double>& cum, int row, double u) const {
    const double* base = cum.data() + static_cast<std::size_t>(row) * a;
    int j = 0;
    while (j + 1 < a && u >= base[j]) ++j;
    return j;
  }
};

int draw_initial(const GibbsMarkov& g, double u) {
  double c = 0.0;
  const int a = g.alphabet();
  for (int s = 0; s < a; ++s) {
    c += g.stationary[s];
    if (u < c || s == a - 1) return s;
  }
  return a - 1;
}

// matching window in block indices: [-k, k - (block_length-1)]
int window_hi(const GibbsMarkov& g, int k) {
  const int hi = k - (g.block_length - 1);
  if (hi < 0)
    throw std::invalid_argument("zext: radius k smaller than the recoding block");
  return hi;
}

}  // namespace

TwoSidedTrajectory::TwoSidedTrajectory(const GibbsMarkov& g, const StepFunction& f,
                                       RngStream r)
    : model(&g), step(&f), rng(r) {
  forward.push_back(draw_initial(g, rng.next_unit()));
  birkhoff.push_back(0);
}

void TwoSidedTrajectory::ensure_forward(std::int64_t n) {
  const int a = model->alphabet();
  while (static_cast<std::int64_t>(forward.size()) <= n) {
    const int prev = forward.back();
    const double u = rng.next_unit();
    double c = 0.0;
    int next = a - 1;
    for (int j = 0; j < a; ++j) {
      c += model->pi(prev, j);
      if (u < c) { next = j; break; }
    }
    forward.push_back(next);
    birkhoff.push_back(birkhoff.back() + step->value(prev, next, a));
  }
}

void TwoSidedTrajectory::ensure_backward(std::int64_t n) {
  if (reversed_.empty()) reversed_ = model->reversed_kernel();
  const int a = model->alphabet();
  while (static_cast<std::int64_t>(backward.size()) < n) {
    const int cur = backward.empty() ? forward[0] : backward.back();
    const double u = rng.next_unit();
    double c = 0.0;
    int prev = a - 1;
    for (int j = 0; j < a; ++j) {
      c += reversed_[static_cast<std::size_t>(cur) * a + j];
      if (u < c) { prev = j; break; }
    }
    backward.push_back(prev);
  }
}

double TwoSidedTrajectory::ball_measure(int k) {
  const int hi = window_hi(*model, k);
  ensure_backward(k);
  ensure_forward(hi);
  double m = model->stationary[symbol(-k)];
  for (int i = -k; i < hi; ++i) m *= model->pi(symbol(i), symbol(i + 1));
  return m;
}

TwoSidedTrajectory sample_trajectory(const GibbsMarkov& g, const StepFunction& f,
                                     RngStream rng) {
  return TwoSidedTrajectory(g, f, rng);
}

// ---------------------------------------------------------------------------
// Stored-trajectory scanners (reference)
// ---------------------------------------------------------------------------

namespace {

ReturnSample scan_stored(TwoSidedTrajectory& t, int k, std::uint64_t step_cap,
                         bool require_zero) {
  if (k < 1) throw std::invalid_argument("zext scan: k must be >= 1");
  if (step_cap == 0) throw std::invalid_argument("zext scan: step_cap must be > 0");
  const GibbsMarkov& g = *t.model;
  const int hi = window_hi(g, k);

  ReturnSample out;
  out.k = k;
  t.ensure_backward(k);
  out.cylinder_prob = t.ball_measure(k);

  std::deque<std::int64_t> pending;
  std::int64_t head = static_cast<std::int64_t>(t.forward.size()) - 1;

  const auto test_window = [&](std::int64_t n) {
    for (int i = -k; i <= hi; ++i)
      if (t.symbol(n + i) != t.symbol(i)) return false;
    return true;
  };

  std::int64_t m = 0;
  while (true) {
    ++m;
    t.ensure_forward(m);
    if ((require_zero ? t.birkhoff_sum(m) == 0 : true) &&
        m <= static_cast<std::int64_t>(step_cap))
      pending.push_back(m);
    head = m;
    // test every pending candidate whose right edge is available
    while (!pending.empty() && pending.front() + hi <= head) {
      const std::int64_t n = pending.front();
      pending.pop_front();
      out.steps_used = static_cast<std::uint64_t>(head);
      if (test_window(n)) {
        out.tau = static_cast<std::uint64_t>(n);
        return out;
      }
    }
    if (m >= static_cast<std::int64_t>(step_cap) && pending.empty()) break;
  }
  out.tau = step_cap;
  out.censored = true;
  out.steps_used = static_cast<std::uint64_t>(head);
  return out;
}

}  // namespace

ReturnSample tau_epsilon(TwoSidedTrajectory& t, int k, std::uint64_t step_cap) {
  return scan_stored(t, k, step_cap, /*require_zero=*/true);
}

ReturnSample hirata_return(TwoSidedTrajectory& t, int k, std::uint64_t step_cap) {
  return scan_stored(t, k, step_cap, /*require_zero=*/false);
}

ReturnSample tau_epsilon_bruteforce(TwoSidedTrajectory& t, int k,
                                    std::uint64_t step_cap) {
  const GibbsMarkov& g = *t.model;
  const int hi = window_hi(g, k);
  ReturnSample out;
  out.k = k;
  out.cylinder_prob = t.ball_measure(k);
  for (std::int64_t n = 1; n <= static_cast<std::int64_t>(step_cap); ++n) {
    t.ensure_forward(n + hi);
    if (t.birkhoff_sum(n) != 0) continue;
    bool match = true;
    for (int i = -k; i <= hi; ++i)
      if (t.symbol(n + i) != t.symbol(i)) { match = false; break; }
    if (match) {
      out.tau = static_cast<std::uint64_t>(n);
      out.steps_used = static_cast<std::uint64_t>(n + hi);
      return out;
    }
  }
  out.tau = step_cap;
  out.censored = true;
  return out;
}

// ---------------------------------------------------------------------------
// Streaming scanners: O(k) memory, identical draw sequence
// ---------------------------------------------------------------------------

namespace {

ReturnSample scan_streaming(const GibbsMarkov& g, const StepFunction& f,
                            RngStream rng, int k, std::uint64_t step_cap,
                            bool require_zero) {
  if (k < 1) throw std::invalid_argument("zext scan: k must be >= 1");
  if (step_cap == 0) throw std::invalid_argument("zext scan: step_cap must be > 0");
  const int a = g.alphabet();
  const int hi = window_hi(g, k);
  const int wlen = k + hi + 1;  // window symbols -k..hi

  const KernelTables tables(g);

  ReturnSample out;
  out.k = k;

  // pattern: draw x_0, then backwards to -k, then forward on demand
  std::vector<int> pattern(wlen);  // pattern[i+k] = x_i
  pattern[k] = draw_initial(g, rng.next_unit());
  for (int i = 1; i <= k; ++i)
    pattern[k - i] =
        tables.draw(tables.bwd_cum, pattern[k - i + 1], rng.next_unit());

  // ring of the last `wlen` forward symbols; ring[(pos) & mask]
  int ring_bits = 1;
  while ((1 << ring_bits) < wlen + 1) ++ring_bits;
  const std::uint32_t mask = (1u << ring_bits) - 1;
  std::vector<int> ring(static_cast<std::size_t>(mask) + 1);
  for (int i = -k; i <= 0; ++i) ring[static_cast<std::uint32_t>(i + k) & mask] = pattern[i + k];
  // note: positions -k..0 seeded so early candidates can look left

  int cur = pattern[k];
  std::int64_t s_run = 0;
  std::int64_t head = 0;
  // draw pattern symbols 1..hi (they are both pattern and trajectory)
  for (int i = 1; i <= hi; ++i) {
    const int nxt = tables.draw(tables.fwd_cum, cur, rng.next_unit());
    s_run += f.value(cur, nxt, a);
    cur = nxt;
    ++head;
    pattern[k + i] = nxt;
    ring[static_cast<std::uint32_t>(head + k) & mask] = nxt;
  }
  double cyl = g.stationary[pattern[0]];
  for (int i = -k; i < hi; ++i) cyl *= g.pi(pattern[i + k], pattern[i + k + 1]);
  out.cylinder_prob = cyl;

  // pending zero-set candidates (n, ...) awaiting their right edge n+hi
  std::deque<std::int64_t> pending;
  // candidates from the pattern-prefix region: n in 1..hi already passed
  for (std::int64_t n = 1; n <= head; ++n) {
    if (n > static_cast<std::int64_t>(step_cap)) break;
    // S_n from pattern prefix
    std::int64_t s = 0;
    for (std::int64_t j = 0; j < n; ++j)
      s += f.value(pattern[k + j], pattern[k + j + 1], a);
    if (!require_zero || s == 0) pending.push_back(n);
  }

  const auto test_candidate = [&](std::int64_t n) {
    for (int i = -k; i <= hi; ++i) {
      const int sym = ring[static_cast<std::uint32_t>(n + i + k) & mask];
      if (sym != pattern[i + k]) return false;
    }
    return true;
  };

  while (true) {
    while (!pending.empty() && pending.front() + hi <= head) {
      const std::int64_t n = pending.front();
      pending.pop_front();
      out.steps_used = static_cast<std::uint64_t>(head);
      if (test_candidate(n)) {
        out.tau = static_cast<std::uint64_t>(n);
        return out;
      }
    }
    if (head >= static_cast<std::int64_t>(step_cap) && pending.empty()) break;
    const int nxt = tables.draw(tables.fwd_cum, cur, rng.next_unit());
    s_run += f.value(cur, nxt, a);
    cur = nxt;
    ++head;
    ring[static_cast<std::uint32_t>(head + k) & mask] = nxt;
    if ((!require_zero || s_run == 0) && head <= static_cast<std::int64_t>(step_cap))
      pending.push_back(head);
  }
  out.tau = step_cap;
  out.censored = true;
  out.steps_used = static_cast<std::uint64_t>(head);
  return out;
}

}  // namespace

ReturnSample tau_epsilon_streaming(const GibbsMarkov& g, const StepFunction& f,
                                   RngStream rng, int k, std::uint64_t step_cap) {
  return scan_streaming(g, f, rng, k, step_cap, /*require_zero=*/true);
}

ReturnSample hirata_return_streaming(const GibbsMarkov& g, const StepFunction& f,
                                     RngStream rng, int k, std::uint64_t step_cap) {
  return scan_streaming(g, f, rng, k, step_cap, /*require_zero=*/false);
}

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

namespace {

ExperimentTable run_experiment_impl(const GibbsMarkov& g, const StepFunction& f,
                                    const std::vector<int>& k_list,
                                    std::size_t n_samples,
                                    const std::vector<std::uint64_t>& step_caps,
                                    std::uint64_t master_seed, ReturnKind kind,
                                    bool parallel) {
  if (k_list.empty()) throw std::invalid_argument("run_tau_experiment: empty k_list");
  if (step_caps.size() != 1 && step_caps.size() != k_list.size())
    throw std::invalid_argument("run_tau_experiment: step_caps must match k_list");

  ExperimentTable table;
  table.k_list = k_list;
  table.rows.resize(k_list.size() * n_samples);
  table.censor_fraction.assign(k_list.size(), 0.0);

  for (std::size_t ki = 0; ki < k_list.size(); ++ki) {
    const int k = k_list[ki];
    const std::uint64_t cap = step_caps[step_caps.size() == 1 ? 0 : ki];
    ExperimentRow* rows = table.rows.data() + ki * n_samples;
    std::int64_t censored = 0;

#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : censored) if (parallel)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_samples); ++i) {
      const std::uint64_t stream =
          ki * static_cast<std::uint64_t>(n_samples) + static_cast<std::uint64_t>(i);
      RngStream rng(master_seed, stream);
      const ReturnSample s =
          kind == ReturnKind::TauEpsilon
              ? tau_epsilon_streaming(g, f, rng, k, cap)
              : hirata_return_streaming(g, f, rng, k, cap);
      ExperimentRow& row = rows[i];
      row.sample_index = static_cast<std::uint64_t>(i);
      row.k = k;
      row.tau = s.tau;
      row.censored = s.censored;
      row.cyl_prob = s.cylinder_prob;
      if (s.censored) censored += 1;
    }
    table.censor_fraction[ki] =
        static_cast<double>(censored) / static_cast<double>(n_samples);
  }
  return table;
}

}  // namespace

ExperimentTable run_tau_experiment(const GibbsMarkov& g, const StepFunction& f,
                                   const std::vector<int>& k_list,
                                   std::size_t n_samples,
                                   const std::vector<std::uint64_t>& step_caps,
                                   std::uint64_t master_seed, ReturnKind kind) {
  return run_experiment_impl(g, f, k_list, n_samples, step_caps, master_seed,
                             kind, /*parallel=*/true);
}

ExperimentTable run_tau_experiment_serial(const GibbsMarkov& g,
                                          const StepFunction& f,
                                          const std::vector<int>& k_list,
                                          std::size_t n_samples,
                                          const std::vector<std::uint64_t>& step_caps,
                                          std::uint64_t master_seed,
                                          ReturnKind kind) {
  return run_experiment_impl(g, f, k_list, n_samples, step_caps, master_seed,
                             kind, /*parallel=*/false);
}

}  // namespace zext
}  // namespace zrec
