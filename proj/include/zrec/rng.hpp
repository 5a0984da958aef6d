// Splittable counter-based random number streams.
//
// Stream i of a master seed is an independent generator: each stream owns a
// (state, gamma) pair derived by hashing (master, i), and advances by the
// SplitMix construction of Steele, Lea and Flood ("Fast splittable
// pseudorandom number generators", OOPSLA 2014).  Sample index -> stream
// index gives reproducible parallel experiments: results depend only on
// (master seed, stream index), never on thread count or schedule.

#pragma once

#include <cmath>
#include <cstdint>

namespace zrec {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;

// 64-bit finalizer (Stafford variant 13, the SplitMix64 output function).
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

inline int popcount64(std::uint64_t x) noexcept {
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_popcountll(x);
#else
  int c = 0;
  while (x) { x &= x - 1; ++c; }
  return c;
#endif
}

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : master_(master_seed), index_(stream_index) {
    const std::uint64_t h = mix64(master_seed + kGoldenGamma * (stream_index + 1));
    state_ = mix64(h ^ 0x63d36b9d47a2f1a7ull);
    gamma_ = mix64(h + kGoldenGamma) | 1ull;
    // Reject weak gammas (too-regular bit patterns), as in SplittableRandom.
    if (popcount64(gamma_ ^ (gamma_ >> 1)) < 24) gamma_ ^= 0xaaaaaaaaaaaaaaaaull;
  }

  std::uint64_t next_u64() noexcept {
    state_ += gamma_;
    return mix64(state_);
  }

  // Uniform on [0,1), 53 random bits.
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0,1); safe under log().
  double next_unit_open() noexcept {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  // Standard normal via Marsaglia polar; second deviate is cached.
  double next_gaussian() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  // Exponential of mean 1.
  double next_exponential() noexcept { return -std::log(next_unit_open()); }

  // Geometric on {1,2,...} with success probability p in (0,1).
  std::uint64_t next_geometric(double p) noexcept {
    if (p >= 1.0) return 1;
    const double u = next_unit_open();
    const double g = std::floor(std::log(u) / std::log1p(-p));
    return 1 + static_cast<std::uint64_t>(g);
  }

  std::uint64_t master() const noexcept { return master_; }
  std::uint64_t stream_index() const noexcept { return index_; }

 private:
  std::uint64_t master_;
  std::uint64_t index_;
  std::uint64_t state_;
  std::uint64_t gamma_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace zrec
