#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace avwc {

// Deterministic counter-based randomness. Every draw is a pure function of
// (seed, stream, counter), so results do not depend on call order across
// workers and are identical on every platform.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)))) {}

  std::uint64_t next_u64() {
    state_ = splitmix64(state_);
    return state_;
  }

  // uniform in [0,1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) {
    // rejection sampling keeps the draw exactly uniform
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // standard normal via Box-Muller
  double next_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // uniform point on the probability simplex of dimension d (Dirichlet(1))
  std::vector<double> next_simplex(std::size_t d) {
    std::vector<double> v(d);
    double sum = 0.0;
    for (auto& x : v) {
      double u = next_double();
      while (u <= 0.0) u = next_double();
      x = -std::log(u);
      sum += x;
    }
    for (auto& x : v) x /= sum;
    return v;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::uint64_t state_;
};

// Key derivation for per-index draws: an Rng whose stream is a hash of the
// index tuple. Used by codebook generation so draw (k,l,gamma) depends only
// on the seed and the index.
inline Rng indexed_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(a + 0x100000001b3ULL);
  h = splitmix64(h ^ (b + 0xcbf29ce484222325ULL));
  h = splitmix64(h ^ (c + 0x27d4eb2f165667c5ULL));
  return Rng(seed, h);
}

} // namespace avwc
