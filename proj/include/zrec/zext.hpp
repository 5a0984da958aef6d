// Monte Carlo engine for the Z-extension T(x,l) = (theta x, l + phi(x)):
// stationary two-sided trajectory sampling, return times
//   tau(k) = min{ n >= 1 : S_n phi = 0  and  x_{n+i} = x_i for all |i| <= k }
// (agreement on |i| <= k decodes d(theta^n x, x) < e^{-k} under the strict
// metric inequality; the off-by-one here would silently shift every measured
// exponent), and Hirata cylinder returns R_k (window match without the
// Birkhoff constraint).
//
// Two scanner implementations exist on purpose: a stored-trajectory
// reference (grows symbol arrays, scans the zero set of S) and a streaming
// kernel with O(k) memory (ring buffer + deferred window tests).  Tests pin
// them against each other; the experiment driver uses the streaming kernel,
// OpenMP-parallel over samples with one RNG stream per sample index.
//
// For recoded models (block_length > 1) each chain state covers
// block_length original symbols, so the matching window in block indices is
// [-k, k - (block_length - 1)]; measures are unchanged.

#pragma once

#include <cstdint>
#include <vector>

#include "zrec/gibbs.hpp"
#include "zrec/rng.hpp"

namespace zrec {
namespace zext {

struct TwoSidedTrajectory {
  const GibbsMarkov* model = nullptr;
  const StepFunction* step = nullptr;
  std::vector<int> forward;             // symbols at 0,1,2,...
  std::vector<int> backward;            // symbols at -1,-2,...
  std::vector<std::int64_t> birkhoff;   // birkhoff[n] = S_n phi
  std::vector<double> reversed_;        // time-reversed kernel, filled lazily
  RngStream rng;

  TwoSidedTrajectory(const GibbsMarkov& g, const StepFunction& f, RngStream r);

  void ensure_forward(std::int64_t n);   // symbols up to index n inclusive
  void ensure_backward(std::int64_t n);  // symbols down to index -n inclusive
  int symbol(std::int64_t i) const {
    return i >= 0 ? forward[static_cast<std::size_t>(i)]
                  : backward[static_cast<std::size_t>(-i) - 1];
  }
  // S_n phi for 0 <= n <= grown length (S_0 = 0).
  std::int64_t birkhoff_sum(std::int64_t n) const {
    return birkhoff[static_cast<std::size_t>(n)];
  }
  // nu of the matching window around 0 for radius k (the eps = e^{-k} ball).
  double ball_measure(int k);
};

TwoSidedTrajectory sample_trajectory(const GibbsMarkov& g, const StepFunction& f,
                                     RngStream rng);

struct ReturnSample {
  int k = 0;
  std::uint64_t tau = 0;
  double cylinder_prob = 0.0;  // nu(C_k(x)) of the starting window
  bool censored = false;
  std::uint64_t steps_used = 0;
};

// Stored-trajectory scanners (reference implementations).
ReturnSample tau_epsilon(TwoSidedTrajectory& t, int k, std::uint64_t step_cap);
ReturnSample hirata_return(TwoSidedTrajectory& t, int k, std::uint64_t step_cap);
// Brute-force n-by-n scan (no zero-set shortcut); test oracle only.
ReturnSample tau_epsilon_bruteforce(TwoSidedTrajectory& t, int k,
                                    std::uint64_t step_cap);

// Streaming scanners: identical semantics and identical draws (same RNG
// consumption order) with O(k) memory.
ReturnSample tau_epsilon_streaming(const GibbsMarkov& g, const StepFunction& f,
                                   RngStream rng, int k, std::uint64_t step_cap);
ReturnSample hirata_return_streaming(const GibbsMarkov& g, const StepFunction& f,
                                     RngStream rng, int k, std::uint64_t step_cap);

enum class ReturnKind { TauEpsilon, Hirata };

struct ExperimentRow {
  std::uint64_t sample_index = 0;
  int k = 0;
  std::uint64_t tau = 0;
  bool censored = false;
  double cyl_prob = 0.0;
};

struct ExperimentTable {
  std::vector<ExperimentRow> rows;           // sorted by (k, sample_index)
  std::vector<double> censor_fraction;       // per k entry
  std::vector<int> k_list;
  bool nonarithmetic_warning = false;        // attached by callers
};

// Batch driver: parallel map over samples; sample i of radius k uses stream
// (master_seed, stream of (k,i)); outputs sorted by index, bit-identical for
// any worker count.
ExperimentTable run_tau_experiment(const GibbsMarkov& g, const StepFunction& f,
                                   const std::vector<int>& k_list,
                                   std::size_t n_samples,
                                   const std::vector<std::uint64_t>& step_caps,
                                   std::uint64_t master_seed,
                                   ReturnKind kind = ReturnKind::TauEpsilon);
ExperimentTable run_tau_experiment_serial(const GibbsMarkov& g,
                                          const StepFunction& f,
                                          const std::vector<int>& k_list,
                                          std::size_t n_samples,
                                          const std::vector<std::uint64_t>& step_caps,
                                          std::uint64_t master_seed,
                                          ReturnKind kind = ReturnKind::TauEpsilon);

}  // namespace zext
}  // namespace zrec
