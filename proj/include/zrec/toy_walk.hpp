// Toy recurrence model: M_n = (S_n, 0) + Y_n with S_n the simple symmetric
// random walk on Z and Y_n i.i.d. uniform on (0,1)^d.  The return time
// decomposes as tau_eps = R_{T_eps}: R_n is the n-th zero of the walk and
// T_eps the (geometric) number of zeros needed until the uniform component
// lands back in the eps-ball.
//
// R_1 is sampled exactly: P(R_1 = 2n) = C(2n,n) / ((2n-1) 4^n), which is the
// coefficient series of E[s^{R_1}] = 1 - sqrt(1-s^2).  A CDF table covers
// 2n <= 2^16; beyond it the tail P(R_1 > 2n) = C(2n,n)/4^n is inverted
// exactly by bisection on its log-gamma form.  Direct step-by-step
// simulation has infinite expected cost per draw, hence the table.

#pragma once

#include <cstdint>
#include <vector>

#include "zrec/rng.hpp"

namespace zrec {
namespace toy {

enum class TauMode { Idealized, Faithful };
enum class BallNorm { Euclidean, Max };

struct ToyConfig {
  int dim = 1;
  double eps = 0.0;  // requires 0 < eps < 1/2 and ball_constant*eps^dim < 1
  TauMode mode = TauMode::Idealized;
  BallNorm norm = BallNorm::Euclidean;
  double ball_constant = 2.0;  // Lebesgue measure of the unit ball

  // Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
  double hit_probability() const;  // c * eps^d
};

// Closed-form unit-ball volume: Euclidean pi^{d/2}/Gamma(d/2+1), max-norm 2^d.
double unit_ball_volume(int dim, BallNorm norm = BallNorm::Euclidean);

struct TauSample {
  std::uint64_t tau = 0;      // value of tau_eps (== r_total)
  std::uint64_t t_count = 0;  // value of T_eps
  std::uint64_t r_total = 0;  // R_{T_eps}
  bool censored = false;      // tau capped at step_cap
};

// Exact sampler for the first return time R_1 (always even).
// Throws std::overflow_error if the tail inversion exceeds the uint64 range.
std::uint64_t sample_first_return(RngStream& rng);

// P(R_1 = 2n) from the frozen table (n >= 1); exact to double precision.
double first_return_pmf(std::uint64_t n);
// P(R_1 > 2n).
double first_return_tail(std::uint64_t n);

// R_n as the sum of n independent first returns.  Overflow of the uint64
// accumulator is reported, never wrapped.
std::uint64_t sample_r_n(std::uint64_t n, RngStream& rng);

// tau_eps sampler; censors at step_cap (censored samples carry tau = step_cap).
TauSample sample_tau(const ToyConfig& config, RngStream& rng,
                     std::uint64_t step_cap);

struct WalkReturn {
  std::uint64_t steps = 0;
  bool censored = false;
};

// Direct step-by-step SSRW simulation of R_1; cross-validation oracle for
// sample_first_return only.
WalkReturn simulate_walk_until_return(RngStream& rng, std::uint64_t step_cap);

// ---------------------------------------------------------------------------
// Batch drivers (OpenMP-parallel over independent streams; sample i uses
// stream(master_seed, stream_offset + i), so output is schedule-independent).
// Serial twins are the reference implementations used by tests and the
// benchmark.
// ---------------------------------------------------------------------------

std::vector<TauSample> sample_tau_batch(const ToyConfig& config,
                                        std::uint64_t master_seed,
                                        std::uint64_t stream_offset,
                                        std::size_t n_samples,
                                        std::uint64_t step_cap);
std::vector<TauSample> sample_tau_batch_serial(const ToyConfig& config,
                                               std::uint64_t master_seed,
                                               std::uint64_t stream_offset,
                                               std::size_t n_samples,
                                               std::uint64_t step_cap);

// n_samples draws of R_n/n^2 (double-valued for distributional tests).
std::vector<double> sample_rn_scaled_batch(std::uint64_t n,
                                           std::uint64_t master_seed,
                                           std::uint64_t stream_offset,
                                           std::size_t n_samples);
std::vector<double> sample_rn_scaled_batch_serial(std::uint64_t n,
                                                  std::uint64_t master_seed,
                                                  std::uint64_t stream_offset,
                                                  std::size_t n_samples);

}  // namespace toy
}  // namespace zrec
