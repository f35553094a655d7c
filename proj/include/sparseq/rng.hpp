#pragma once

#include <cstdint>

namespace sparseq {

// SplitMix64 (Steele, Lea, Flood 2014). Small, fast, and trivially portable:
// all trial results in this project must be reproducible from a single uint64
// seed, so we keep one stream type everywhere instead of relying on the
// library distributions, whose output is implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Fixed-point multiply (Lemire); avoids modulo
  // bias well below anything observable at our draw counts.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

// Derives an independent child seed from (master, stream index). Used for the
// splittable per-trial / per-purpose streams: trial seed = derive(master, trial),
// then env / weights / actions / replay each get derive(trial_seed, tag).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  SplitMix64 g(master ^ (0xA0761D6478BD642Full * (stream + 1)));
  g.next();
  return g.next();
}

}  // namespace sparseq
