#pragma once

#include <cstdint>

namespace socsim {

// Counter-based random substreams. Every stochastic site in the simulator
// draws from a stream keyed by (seed, entity id, round), so results do not
// depend on iteration order or worker count, and the same key always yields
// the same draws on any platform (no std::uniform_*_distribution, whose
// output is implementation-defined).

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t state, std::uint64_t key) {
  return splitmix64(state + kGolden + key * 0xD6E8FEB86659FD93ULL);
}

}  // namespace detail

class Substream {
 public:
  explicit Substream(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::splitmix64(state_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double next_double(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [0, n). n == 0 is a caller bug; returns 0.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) return 0;
    // Lemire multiply-shift; bias is below 2^-64 per draw.
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

 private:
  std::uint64_t state_;
};

inline Substream substream(std::uint64_t seed, std::uint64_t a,
                           std::uint64_t b) {
  std::uint64_t s = detail::splitmix64(seed);
  s = detail::mix_key(s, a);
  s = detail::mix_key(s, b);
  return Substream(s);
}

inline Substream substream(std::uint64_t seed, std::uint64_t a,
                           std::uint64_t b, std::uint64_t c) {
  std::uint64_t s = detail::splitmix64(seed);
  s = detail::mix_key(s, a);
  s = detail::mix_key(s, b);
  s = detail::mix_key(s, c);
  return Substream(s);
}

// Child seed for replication k. k == 0 keeps the parent seed so that a
// single replicate reproduces the original run byte for byte.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  if (k == 0) return seed;
  return detail::mix_key(detail::splitmix64(seed), k);
}

// Child seed keyed by two indices; (a, b) pairs never collide the way
// chained derive_seed calls can.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b) {
  std::uint64_t s = detail::splitmix64(seed);
  s = detail::mix_key(s, a);
  return detail::mix_key(s, b);
}

}  // namespace socsim
