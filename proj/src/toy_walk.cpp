#include "zrec/toy_walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace zrec {
namespace toy {

namespace {

constexpr std::uint64_t kTableN = 1u << 15;  // table covers 2n <= 2^16
constexpr double kLog4 = 1.3862943611198906188;

// cum[m-1] = P(R_1 <= 2m) = 1 - u_m with u_m = C(2m,m)/4^m, via the exact
// product recurrence u_m = u_{m-1} (2m-1)/(2m) in long double.
struct FirstReturnTable {
  std::vector<double> cum;   // size kTableN
  std::vector<double> pmf;   // pmf[m-1] = P(R_1 = 2m)
  double tail_weight;        // u_{kTableN}

  FirstReturnTable() {
    cum.resize(kTableN);
    pmf.resize(kTableN);
    long double u_prev = 1.0L;
    for (std::uint64_t m = 1; m <= kTableN; ++m) {
      const long double u = u_prev * (2.0L * m - 1.0L) / (2.0L * m);
      pmf[m - 1] = static_cast<double>(u_prev - u);
      cum[m - 1] = static_cast<double>(1.0L - u);
      u_prev = u;
    }
    tail_weight = static_cast<double>(u_prev);
  }
};

const FirstReturnTable& table() {
  static const FirstReturnTable t;
  return t;
}

// log P(R_1 > 2m) = log C(2m,m) - m log 4.
double log_tail(double m) {
  return std::lgamma(2.0 * m + 1.0) - 2.0 * std::lgamma(m + 1.0) - m * kLog4;
}

// Smallest m > kTableN with u_m <= target, by bisection on the monotone
// log-gamma form; exact discrete inversion of the tail CDF.
std::uint64_t invert_tail(double target) {
  const double log_target = std::log(target);
  std::uint64_t lo = kTableN;  // u_lo > target
  std::uint64_t hi = kTableN;
  // bracket: grow geometrically, guided by u_m ~ 1/sqrt(pi m)
  while (log_tail(static_cast<double>(hi)) > log_target) {
    if (hi > (1ull << 61))
      throw std::overflow_error("sample_first_return: tail value exceeds uint64 range");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (log_tail(static_cast<double>(mid)) > log_target) lo = mid; else hi = mid;
  }
  return hi;
}

}  // namespace

double unit_ball_volume(int dim, BallNorm norm) {
  if (dim < 1) throw std::invalid_argument("unit_ball_volume: dim must be >= 1");
  if (norm == BallNorm::Max) return std::pow(2.0, dim);
  const double d = static_cast<double>(dim);
  return std::pow(3.1415926535897932385, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

void ToyConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("ToyConfig.dim: must be a positive integer");
  if (!(eps > 0.0) || !(eps < 0.5))
    throw std::invalid_argument("ToyConfig.eps: must satisfy 0 < eps < 1/2");
  const double c = unit_ball_volume(dim, norm);
  if (std::abs(ball_constant - c) > 1e-9 * std::max(1.0, c))
    throw std::invalid_argument(
        "ToyConfig.ball_constant: expected the closed-form unit-ball volume " +
        std::to_string(c) + " for dim " + std::to_string(dim) + ", got " +
        std::to_string(ball_constant));
  if (!(hit_probability() < 1.0))
    throw std::invalid_argument("ToyConfig: c*eps^dim must be < 1");
}

double ToyConfig::hit_probability() const {
  return ball_constant * std::pow(eps, static_cast<double>(dim));
}

double first_return_pmf(std::uint64_t n) {
  if (n == 0) return 0.0;
  if (n <= kTableN) return table().pmf[n - 1];
  const double m = static_cast<double>(n);
  return std::exp(log_tail(m)) / (2.0 * m - 1.0);
}

double first_return_tail(std::uint64_t n) {
  if (n == 0) return 1.0;
  if (n <= kTableN) return 1.0 - table().cum[n - 1];
  return std::exp(log_tail(static_cast<double>(n)));
}

std::uint64_t sample_first_return(RngStream& rng) {
  const FirstReturnTable& t = table();
  const double u = rng.next_unit();
  if (u < t.cum.back()) {
    const auto it = std::upper_bound(t.cum.begin(), t.cum.end(), u);
    const std::uint64_t m = static_cast<std::uint64_t>(it - t.cum.begin()) + 1;
    return 2 * m;
  }
  // Tail: find min m with P(R_1 <= 2m) >= u, i.e. u_m <= 1-u.
  const double target = 1.0 - u;  // in (0, tail_weight]
  return 2 * invert_tail(target);
}

std::uint64_t sample_r_n(std::uint64_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_r_n: n must be >= 1");
  unsigned __int128 acc = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    acc += sample_first_return(rng);
    if (acc > std::numeric_limits<std::uint64_t>::max())
      throw std::overflow_error("sample_r_n: accumulator exceeded uint64 range");
  }
  return static_cast<std::uint64_t>(acc);
}

namespace {

// Y0 uniform on (0,1)^d conditioned on B(Y0,eps) inside the cube, by
// rejection.  Exhaustion is impossible under eps < 1/2; the bound guards
// against misuse.
void draw_conditioned_center(const ToyConfig& cfg, RngStream& rng, double* y0) {
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    bool ok = true;
    for (int j = 0; j < cfg.dim; ++j) {
      y0[j] = rng.next_unit();
      if (y0[j] <= cfg.eps || y0[j] >= 1.0 - cfg.eps) { ok = false; break; }
    }
    if (ok) return;
  }
  throw std::runtime_error("sample_tau: rejection for Y0 exhausted (eps too large?)");
}

bool in_ball(const ToyConfig& cfg, const double* y0, const double* y) {
  if (cfg.norm == BallNorm::Max) {
    for (int j = 0; j < cfg.dim; ++j)
      if (std::abs(y[j] - y0[j]) >= cfg.eps) return false;
    return true;
  }
  double s = 0.0;
  for (int j = 0; j < cfg.dim; ++j) s += (y[j] - y0[j]) * (y[j] - y0[j]);
  return s < cfg.eps * cfg.eps;
}

TauSample sample_tau_idealized(const ToyConfig& cfg, RngStream& rng,
                               std::uint64_t step_cap) {
  const double lambda = cfg.hit_probability();
  const std::uint64_t t_count = rng.next_geometric(lambda);
  unsigned __int128 acc = 0;
  TauSample s;
  for (std::uint64_t i = 0; i < t_count; ++i) {
    acc += sample_first_return(rng);
    if (acc > step_cap) {
      s.tau = s.r_total = step_cap;
      s.t_count = i + 1;
      s.censored = true;
      return s;
    }
  }
  s.tau = s.r_total = static_cast<std::uint64_t>(acc);
  s.t_count = t_count;
  return s;
}

TauSample sample_tau_faithful(const ToyConfig& cfg, RngStream& rng,
                              std::uint64_t step_cap) {
  double y0[16], y[16];
  if (cfg.dim > 16) throw std::invalid_argument("sample_tau: dim > 16 unsupported");
  draw_conditioned_center(cfg, rng, y0);
  // Walk directly; the uniform component needs testing only at walk zeros
  // (|S_n| >= 1 makes the ball test impossible once the ball fits the cube).
  std::int64_t pos = 0;
  std::uint64_t t_count = 0;
  TauSample s;
  for (std::uint64_t n = 1; n <= step_cap; ++n) {
    pos += (rng.next_u64() & 1ull) ? 1 : -1;
    if (pos != 0) continue;
    ++t_count;
    for (int j = 0; j < cfg.dim; ++j) y[j] = rng.next_unit();
    if (in_ball(cfg, y0, y)) {
      s.tau = s.r_total = n;
      s.t_count = t_count;
      return s;
    }
  }
  s.tau = s.r_total = step_cap;
  s.t_count = t_count;  // zeros seen before the cap; may be 0 when censored
  s.censored = true;
  return s;
}

}  // namespace

TauSample sample_tau(const ToyConfig& config, RngStream& rng,
                     std::uint64_t step_cap) {
  config.validate();
  if (step_cap == 0) throw std::invalid_argument("sample_tau: step_cap must be > 0");
  return config.mode == TauMode::Idealized
             ? sample_tau_idealized(config, rng, step_cap)
             : sample_tau_faithful(config, rng, step_cap);
}

WalkReturn simulate_walk_until_return(RngStream& rng, std::uint64_t step_cap) {
  if (step_cap == 0) throw std::invalid_argument("simulate_walk_until_return: step_cap must be > 0");
  std::int64_t pos = 0;
  for (std::uint64_t n = 1; n <= step_cap; ++n) {
    pos += (rng.next_u64() & 1ull) ? 1 : -1;
    if (pos == 0) return {n, false};
  }
  return {step_cap, true};
}

std::vector<TauSample> sample_tau_batch_serial(const ToyConfig& config,
                                               std::uint64_t master_seed,
                                               std::uint64_t stream_offset,
                                               std::size_t n_samples,
                                               std::uint64_t step_cap) {
  config.validate();
  std::vector<TauSample> out(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    RngStream rng(master_seed, stream_offset + i);
    out[i] = sample_tau(config, rng, step_cap);
  }
  return out;
}

std::vector<TauSample> sample_tau_batch(const ToyConfig& config,
                                        std::uint64_t master_seed,
                                        std::uint64_t stream_offset,
                                        std::size_t n_samples,
                                        std::uint64_t step_cap) {
  config.validate();
  std::vector<TauSample> out(n_samples);
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 64)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_samples); ++i) {
    RngStream rng(master_seed, stream_offset + static_cast<std::uint64_t>(i));
    out[i] = sample_tau(config, rng, step_cap);
  }
  return out;
}

std::vector<double> sample_rn_scaled_batch_serial(std::uint64_t n,
                                                  std::uint64_t master_seed,
                                                  std::uint64_t stream_offset,
                                                  std::size_t n_samples) {
  std::vector<double> out(n_samples);
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  for (std::size_t i = 0; i < n_samples; ++i) {
    RngStream rng(master_seed, stream_offset + i);
    out[i] = static_cast<double>(sample_r_n(n, rng)) / n2;
  }
  return out;
}

std::vector<double> sample_rn_scaled_batch(std::uint64_t n,
                                           std::uint64_t master_seed,
                                           std::uint64_t stream_offset,
                                           std::size_t n_samples) {
  std::vector<double> out(n_samples);
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 64)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_samples); ++i) {
    RngStream rng(master_seed, stream_offset + static_cast<std::uint64_t>(i));
    out[i] = static_cast<double>(sample_r_n(n, rng)) / n2;
  }
  return out;
}

}  // namespace toy
}  // namespace zrec
